import { describe, expect, test } from "vitest";

import type { ProjectResponse, TrajectoryDto } from "../src/api.js";
import { deltaRows, extractSeries } from "../src/series.js";

const ENROLLED = ["A", "B"];

function trajectory(countsPerStep: Array<Record<string, number>>, totals: number[]): TrajectoryDto {
  return {
    horizon: countsPerStep.length - 1,
    points: countsPerStep.map((counts, step) => ({
      step,
      counts,
      total: totals[step],
      flows: { inflow_total: 0, outflow_total: 0, per_absorbing: {} },
    })),
  };
}

const RESPONSE: ProjectResponse = {
  baseline: trajectory(
    [{ A: 10.25, B: 4 }, { A: 11, B: 3.5 }],
    [14.25, 14.5],
  ),
  scenario: trajectory(
    [{ A: 10.25, B: 4 }, { A: 12, B: 5 }],
    [14.25, 17],
  ),
  deltas: [
    { step: 0, by_state: { A: 0, B: 0 }, total: 0 },
    { step: 1, by_state: { A: 1, B: 1.5 }, total: 2.5 },
  ],
};

describe("extractSeries", () => {
  test("values pass through from the response untouched", () => {
    const { steps, series } = extractSeries(RESPONSE, ENROLLED);
    expect(steps).toEqual([0, 1]);
    const byLabel = Object.fromEntries(series.map((s) => [s.label, s.values]));
    expect(byLabel["A"]).toEqual([10.25, 11]);
    expect(byLabel["B"]).toEqual([4, 3.5]);
    expect(byLabel["Total"]).toEqual([14.25, 14.5]);
    expect(byLabel["A (scenario)"]).toEqual([10.25, 12]);
    expect(byLabel["Total (scenario)"]).toEqual([14.25, 17]);
  });

  test("totals come from the server total field, not a client sum", () => {
    const tampered: ProjectResponse = {
      baseline: trajectory([{ A: 1, B: 1 }], [999]),
      scenario: null,
      deltas: null,
    };
    const { series } = extractSeries(tampered, ENROLLED);
    expect(series.find((s) => s.label === "Total")?.values).toEqual([999]);
  });

  test("no scenario series without a scenario", () => {
    const { series } = extractSeries({ ...RESPONSE, scenario: null, deltas: null }, ENROLLED);
    expect(series.every((s) => s.kind === "baseline")).toBe(true);
  });
});

describe("deltaRows", () => {
  test("passthrough of the deltas array", () => {
    const rows = deltaRows(RESPONSE);
    expect(rows).toEqual([
      { step: 0, total: 0, byState: { A: 0, B: 0 } },
      { step: 1, total: 2.5, byState: { A: 1, B: 1.5 } },
    ]);
  });

  test("empty without deltas", () => {
    expect(deltaRows({ ...RESPONSE, deltas: null })).toEqual([]);
  });
});
