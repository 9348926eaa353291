// Scenario explorer: edit transition probabilities and inflow, pick a
// horizon, and watch projected headcounts against the baseline. All numbers
// on screen are lifted from service responses.

import { ApiError, getModel, getStates, postProject } from "./api.js";
import type { ModelDoc, ProjectResponse, StatesDoc } from "./api.js";
import { renderChart, colorFor } from "./chart.js";
import { LatestWins, SUPERSEDED, debounce } from "./requests.js";
import {
  cellKey,
  draftToSpec,
  emptyDraft,
  isIdentity,
  offendingRow,
  overrideSumsByRow,
  validateDraft,
} from "./scenario.js";
import type { ScenarioDraft } from "./scenario.js";
import { deltaRows, extractSeries } from "./series.js";

const DEBOUNCE_MS = 300;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const ui = {
  banner: () => byId<HTMLDivElement>("banner"),
  bannerMessage: () => byId<HTMLSpanElement>("banner-message"),
  retry: () => byId<HTMLButtonElement>("retry"),
  badge: () => byId<HTMLSpanElement>("badge"),
  stale: () => byId<HTMLSpanElement>("stale"),
  matrix: () => byId<HTMLTableElement>("matrix"),
  inflowMode: () => byId<HTMLSelectElement>("inflow-mode"),
  inflowMultiplier: () => byId<HTMLInputElement>("inflow-multiplier"),
  inflowAbsolute: () => byId<HTMLDivElement>("inflow-absolute"),
  initialPanel: () => byId<HTMLDivElement>("initial-panel"),
  horizon: () => byId<HTMLInputElement>("horizon"),
  run: () => byId<HTMLButtonElement>("run"),
  reset: () => byId<HTMLButtonElement>("reset"),
  chart: () => byId<HTMLElement>("chart") as unknown as SVGSVGElement,
  legend: () => byId<HTMLDivElement>("legend"),
  deltas: () => byId<HTMLTableElement>("deltas"),
  issues: () => byId<HTMLDivElement>("issues"),
};

interface AppState {
  states: StatesDoc;
  model: ModelDoc;
  draft: ScenarioDraft;
  requests: LatestWins;
}

let app: AppState | null = null;

function showBanner(message: string): void {
  ui.bannerMessage().textContent = message;
  ui.banner().classList.remove("hidden");
}

function hideBanner(): void {
  ui.banner().classList.add("hidden");
}

function markStale(stale: boolean): void {
  ui.stale().classList.toggle("hidden", !stale);
}

function baselineProbability(model: ModelDoc, fromState: string, toState: string): number {
  const row = model.enrolled.indexOf(fromState);
  const column = model.states.indexOf(toState);
  return model.matrix[row][column];
}

function renderMatrixEditor(state: AppState): void {
  const table = ui.matrix();
  table.replaceChildren();

  const head = table.createTHead().insertRow();
  head.appendChild(document.createElement("th")).textContent = "from \\ to";
  for (const toState of state.model.states) {
    const cell = document.createElement("th");
    cell.textContent = toState;
    head.appendChild(cell);
  }
  head.appendChild(document.createElement("th")).textContent = "row sum";

  const body = table.createTBody();
  for (const fromState of state.model.enrolled) {
    const row = body.insertRow();
    row.dataset.row = fromState;
    const label = document.createElement("th");
    label.textContent = fromState;
    row.appendChild(label);
    for (const toState of state.model.states) {
      const cell = row.insertCell();
      const input = document.createElement("input");
      input.type = "number";
      input.min = "0";
      input.max = "1";
      input.step = "0.001";
      input.value = baselineProbability(state.model, fromState, toState).toFixed(3);
      input.dataset.from = fromState;
      input.dataset.to = toState;
      input.addEventListener("input", () => onCellEdited(state, input));
      cell.appendChild(input);
    }
    const sumCell = row.insertCell();
    sumCell.className = "row-sum";
    row.appendChild(sumCell);
  }
  refreshRowIndicators(state);
}

function refreshRowIndicators(state: AppState): void {
  const pinnedSums = overrideSumsByRow(state.draft);
  for (const row of ui.matrix().tBodies[0]?.rows ?? []) {
    const fromState = row.dataset.row ?? "";
    let displayedSum = 0;
    let edited = 0;
    for (const input of row.querySelectorAll("input")) {
      displayedSum += Number(input.value) || 0;
      if (input.classList.contains("edited")) edited += 1;
    }
    const sumCell = row.querySelector<HTMLTableCellElement>(".row-sum");
    if (!sumCell) continue;
    const pinned = pinnedSums.get(fromState) ?? 0;
    sumCell.textContent = edited > 0
      ? `Σ ${displayedSum.toFixed(3)} (pinned ${pinned.toFixed(3)})`
      : `Σ ${displayedSum.toFixed(3)}`;
    const invalid = pinned > 1 + 1e-12;
    row.classList.toggle("invalid", invalid);
  }
}

function onCellEdited(state: AppState, input: HTMLInputElement): void {
  const fromState = input.dataset.from ?? "";
  const toState = input.dataset.to ?? "";
  input.classList.add("edited");
  state.draft.overrides.set(cellKey(fromState, toState), Number(input.value));
  afterDraftChange(state);
}

function renderStateInputs(container: HTMLElement, labels: string[], values: Record<string, number>, cls: string): void {
  container.replaceChildren();
  for (const label of labels) {
    const wrap = document.createElement("label");
    wrap.textContent = label + " ";
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.step = "1";
    input.className = cls;
    input.dataset.state = label;
    input.value = String(values[label] ?? 0);
    wrap.appendChild(input);
    container.appendChild(wrap);
  }
}

function readStateInputs(container: HTMLElement, cls: string): Record<string, number> {
  const values: Record<string, number> = {};
  for (const input of container.querySelectorAll<HTMLInputElement>(`input.${cls}`)) {
    values[input.dataset.state ?? ""] = Number(input.value) || 0;
  }
  return values;
}

function renderIssues(state: AppState): boolean {
  const issues = validateDraft(state.draft);
  const container = ui.issues();
  container.replaceChildren();
  for (const issue of issues) {
    const line = document.createElement("div");
    line.className = "issue";
    line.textContent = issue.message;
    container.appendChild(line);
  }
  ui.run().disabled = issues.length > 0;
  return issues.length === 0;
}

function highlightRow(rowName: string | null, message: string): void {
  clearRowHighlights();
  const container = ui.issues();
  const line = document.createElement("div");
  line.className = "issue server";
  line.textContent = message;
  container.appendChild(line);
  if (!rowName) return;
  for (const row of ui.matrix().tBodies[0]?.rows ?? []) {
    if (row.dataset.row === rowName) row.classList.add("invalid");
  }
}

function clearRowHighlights(): void {
  for (const row of ui.matrix().tBodies[0]?.rows ?? []) row.classList.remove("invalid");
}

function renderLegend(state: AppState, data: ReturnType<typeof extractSeries>): void {
  const legend = ui.legend();
  legend.replaceChildren();
  for (const series of data.series.filter((s) => s.kind === "baseline")) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = colorFor(series, state.model.enrolled);
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(series.label));
    legend.appendChild(item);
  }
  if (data.series.some((s) => s.kind === "scenario")) {
    const note = document.createElement("span");
    note.className = "legend-item";
    note.textContent = "dashed = scenario";
    legend.appendChild(note);
  }
}

function renderDeltas(state: AppState, response: ProjectResponse): void {
  const table = ui.deltas();
  table.replaceChildren();
  const rows = deltaRows(response);
  if (rows.length === 0) {
    const caption = table.createCaption();
    caption.textContent = "No scenario edits — deltas are all zero.";
    return;
  }
  const head = table.createTHead().insertRow();
  for (const column of ["step", ...state.model.enrolled, "total"]) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    tr.insertCell().textContent = String(row.step);
    for (const stateName of state.model.enrolled) {
      tr.insertCell().textContent = Math.round(row.byState[stateName]).toLocaleString();
    }
    const total = tr.insertCell();
    total.textContent = Math.round(row.total).toLocaleString();
    total.className = "total";
  }
}

function renderResults(state: AppState, response: ProjectResponse): void {
  const data = extractSeries(response, state.model.enrolled);
  renderChart(ui.chart(), data.steps, data.series, state.model.enrolled);
  renderLegend(state, data);
  renderDeltas(state, response);
  ui.badge().classList.toggle("hidden", !isIdentity(state.draft));
  markStale(false);
}

function currentRequestBody(state: AppState) {
  state.draft.horizon = Math.max(1, Number(ui.horizon().value) || 1);
  state.draft.inflowMode = ui.inflowMode().value as ScenarioDraft["inflowMode"];
  state.draft.inflowMultiplier = Number(ui.inflowMultiplier().value) || 0;
  state.draft.inflowAbsolute = new Map(
    Object.entries(readStateInputs(ui.inflowAbsolute(), "inflow-abs")),
  );
  return {
    initial: readStateInputs(ui.initialPanel(), "initial"),
    horizon: state.draft.horizon,
    scenario: draftToSpec(state.draft),
  };
}

async function runScenario(state: AppState): Promise<void> {
  if (!renderIssues(state)) return;
  clearRowHighlights();
  const body = currentRequestBody(state);
  try {
    const result = await state.requests.run((signal) => postProject(body, { signal }));
    if (result === SUPERSEDED) return;
    hideBanner();
    renderResults(state, result);
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      highlightRow(offendingRow(error.message), error.message);
      return;
    }
    markStale(true);
    showBanner(error instanceof Error ? `Projection failed: ${error.message}` : "Projection failed");
  }
}

function afterDraftChange(state: AppState): void {
  refreshRowIndicators(state);
  renderIssues(state);
  debouncedRun();
}

let debouncedRun: () => void = () => undefined;

function resetDraft(state: AppState): void {
  state.draft = emptyDraft(Number(ui.horizon().value) || 8);
  ui.inflowMode().value = "none";
  ui.inflowMultiplier().value = "2";
  renderMatrixEditor(state);
  renderStateInputs(
    ui.inflowAbsolute(),
    state.model.enrolled,
    state.model.inflow,
    "inflow-abs",
  );
  renderIssues(state);
  void runScenario(state); // failure marks the chart stale
}

function updateInflowVisibility(): void {
  const mode = ui.inflowMode().value;
  ui.inflowMultiplier().parentElement?.classList.toggle("hidden", mode !== "multiplier");
  ui.inflowAbsolute().classList.toggle("hidden", mode !== "absolute");
}

async function boot(): Promise<void> {
  try {
    const [states, model] = await Promise.all([getStates(), getModel()]);
    hideBanner();
    const state: AppState = {
      states,
      model,
      draft: emptyDraft(states.default_horizon),
      requests: new LatestWins(),
    };
    app = state;

    debouncedRun = debounce(() => void runScenario(state), DEBOUNCE_MS);

    ui.horizon().value = String(states.default_horizon);
    renderMatrixEditor(state);
    renderStateInputs(
      ui.initialPanel(),
      model.enrolled,
      states.default_initial ?? Object.fromEntries(model.enrolled.map((s) => [s, 0])),
      "initial",
    );
    renderStateInputs(ui.inflowAbsolute(), model.enrolled, model.inflow, "inflow-abs");
    updateInflowVisibility();

    ui.inflowMode().addEventListener("change", () => {
      updateInflowVisibility();
      afterDraftChange(state);
    });
    ui.inflowMultiplier().addEventListener("input", () => afterDraftChange(state));
    ui.inflowAbsolute().addEventListener("input", () => afterDraftChange(state));
    ui.initialPanel().addEventListener("input", () => debouncedRun());
    ui.horizon().addEventListener("input", () => debouncedRun());
    ui.run().addEventListener("click", () => void runScenario(state));
    ui.reset().addEventListener("click", () => resetDraft(state));

    await runScenario(state);
  } catch (error) {
    showBanner(
      error instanceof Error ? `Service unreachable: ${error.message}` : "Service unreachable",
    );
  }
}

ui.retry().addEventListener("click", () => void boot());
void boot();
