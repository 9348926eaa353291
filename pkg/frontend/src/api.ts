// Typed client for the projection service. Every number the UI shows comes
// out of these responses untouched.

export interface StatesDoc {
  states: string[];
  enrolled: string[];
  absorbing: string[];
  default_initial: Record<string, number> | null;
  default_horizon: number;
}

export interface ModelDoc {
  states: string[];
  enrolled: string[];
  absorbing: string[];
  matrix: number[][];
  inflow: Record<string, number>;
  meta: Record<string, unknown>;
}

export interface FlowsDto {
  inflow_total: number;
  outflow_total: number;
  per_absorbing: Record<string, number>;
}

export interface PointDto {
  step: number;
  counts: Record<string, number>;
  total: number;
  flows: FlowsDto;
}

export interface TrajectoryDto {
  horizon: number;
  points: PointDto[];
}

export interface DeltaDto {
  step: number;
  by_state: Record<string, number>;
  total: number;
}

export interface ProjectResponse {
  baseline: TrajectoryDto;
  scenario: TrajectoryDto | null;
  deltas: DeltaDto[] | null;
}

export interface ProjectRequest {
  initial: Record<string, number> | "from_model_data";
  horizon: number;
  scenario: Record<string, unknown> | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message);
}

export async function getStates(base = ""): Promise<StatesDoc> {
  const response = await fetch(`${base}/api/states`);
  await raiseForStatus(response);
  return (await response.json()) as StatesDoc;
}

export async function getModel(base = ""): Promise<ModelDoc> {
  const response = await fetch(`${base}/api/model`);
  await raiseForStatus(response);
  return (await response.json()) as ModelDoc;
}

export async function postProject(
  body: ProjectRequest,
  options: { base?: string; signal?: AbortSignal } = {},
): Promise<ProjectResponse> {
  const response = await fetch(`${options.base ?? ""}/api/project`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
    signal: options.signal,
  });
  await raiseForStatus(response);
  return (await response.json()) as ProjectResponse;
}
