// Map service responses to chart series and delta-table rows. Pure
// passthrough: values are lifted out of the response, never recomputed.

import type { ProjectResponse, TrajectoryDto } from "./api.js";

export interface SeriesSpec {
  label: string;
  state: string | null; // null for the total line
  kind: "baseline" | "scenario";
  values: number[];
}

export interface ChartData {
  steps: number[];
  series: SeriesSpec[];
}

function stateValues(trajectory: TrajectoryDto, state: string): number[] {
  return trajectory.points.map((point) => point.counts[state]);
}

function totalValues(trajectory: TrajectoryDto): number[] {
  return trajectory.points.map((point) => point.total);
}

export function extractSeries(response: ProjectResponse, enrolled: string[]): ChartData {
  const steps = response.baseline.points.map((point) => point.step);
  const series: SeriesSpec[] = [];
  for (const state of enrolled) {
    series.push({
      label: state,
      state,
      kind: "baseline",
      values: stateValues(response.baseline, state),
    });
  }
  series.push({ label: "Total", state: null, kind: "baseline", values: totalValues(response.baseline) });
  if (response.scenario) {
    for (const state of enrolled) {
      series.push({
        label: `${state} (scenario)`,
        state,
        kind: "scenario",
        values: stateValues(response.scenario, state),
      });
    }
    series.push({
      label: "Total (scenario)",
      state: null,
      kind: "scenario",
      values: totalValues(response.scenario),
    });
  }
  return { steps, series };
}

export interface DeltaRow {
  step: number;
  total: number;
  byState: Record<string, number>;
}

export function deltaRows(response: ProjectResponse): DeltaRow[] {
  if (!response.deltas) return [];
  return response.deltas.map((delta) => ({
    step: delta.step,
    total: delta.total,
    byState: delta.by_state,
  }));
}
