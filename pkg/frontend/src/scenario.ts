// Scenario draft state and client-side validation. Validation here is
// deliberately weaker than the server's: it only rejects what can never be
// accepted (probabilities outside [0, 1], pinned cells in one row summing
// past 1); everything else is the server's call and its 422 message is
// surfaced verbatim.

const KEY_SEPARATOR = "";

export type InflowMode = "none" | "multiplier" | "absolute";

export interface ScenarioDraft {
  overrides: Map<string, number>;
  inflowMode: InflowMode;
  inflowMultiplier: number;
  inflowAbsolute: Map<string, number>;
  horizon: number;
}

export function cellKey(fromState: string, toState: string): string {
  return `${fromState}${KEY_SEPARATOR}${toState}`;
}

export function splitKey(key: string): [string, string] {
  const at = key.indexOf(KEY_SEPARATOR);
  return [key.slice(0, at), key.slice(at + 1)];
}

export function emptyDraft(horizon = 8): ScenarioDraft {
  return {
    overrides: new Map(),
    inflowMode: "none",
    inflowMultiplier: 1,
    inflowAbsolute: new Map(),
    horizon,
  };
}

export function isIdentity(draft: ScenarioDraft): boolean {
  return draft.overrides.size === 0 && draft.inflowMode === "none";
}

export interface DraftIssue {
  kind: "range" | "row-sum";
  row: string;
  message: string;
}

export function overrideSumsByRow(draft: ScenarioDraft): Map<string, number> {
  const sums = new Map<string, number>();
  for (const [key, value] of draft.overrides) {
    const [fromState] = splitKey(key);
    sums.set(fromState, (sums.get(fromState) ?? 0) + value);
  }
  return sums;
}

export function validateDraft(draft: ScenarioDraft): DraftIssue[] {
  const issues: DraftIssue[] = [];
  for (const [key, value] of draft.overrides) {
    const [fromState, toState] = splitKey(key);
    if (!Number.isFinite(value) || value < 0 || value > 1) {
      issues.push({
        kind: "range",
        row: fromState,
        message: `${fromState} → ${toState} must be between 0 and 1`,
      });
    }
  }
  for (const [row, sum] of overrideSumsByRow(draft)) {
    if (sum > 1 + 1e-12) {
      issues.push({
        kind: "row-sum",
        row,
        message: `pinned cells in row ${row} sum to ${sum.toFixed(3)}`,
      });
    }
  }
  for (const [state, value] of draft.inflowAbsolute) {
    if (draft.inflowMode === "absolute" && (!Number.isFinite(value) || value < 0)) {
      issues.push({ kind: "range", row: state, message: `inflow for ${state} must be ≥ 0` });
    }
  }
  if (draft.inflowMode === "multiplier" && (!Number.isFinite(draft.inflowMultiplier) || draft.inflowMultiplier < 0)) {
    issues.push({ kind: "range", row: "", message: "inflow multiplier must be ≥ 0" });
  }
  return issues;
}

/** JSON scenario object for the service; an identity draft becomes {}. */
export function draftToSpec(draft: ScenarioDraft): Record<string, unknown> {
  const spec: Record<string, unknown> = {};
  if (draft.overrides.size > 0) {
    spec.cell_overrides = [...draft.overrides.entries()].map(([key, probability]) => {
      const [from_state, to_state] = splitKey(key);
      return { from_state, to_state, probability };
    });
  }
  if (draft.inflowMode === "multiplier") {
    spec.inflow_multiplier = draft.inflowMultiplier;
  } else if (draft.inflowMode === "absolute" && draft.inflowAbsolute.size > 0) {
    spec.inflow_absolute = Object.fromEntries(draft.inflowAbsolute);
  }
  return spec;
}

/** Row name out of a service 422 message like "... row 'Freshman' ...". */
export function offendingRow(message: string): string | null {
  const match = /row '([^']+)'/.exec(message);
  return match ? match[1] : null;
}
