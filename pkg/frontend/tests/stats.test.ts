import { describe, expect, it } from "vitest";

import type { ExperimentRow } from "../src/csv.js";
import { finalValueSummary, schemeSeries } from "../src/stats.js";

function row(
  seed: number,
  grid: number,
  scheme: string,
  metric: string,
  value: number,
): ExperimentRow {
  return { seed, grid_value: grid, scheme, metric, value };
}

describe("schemeSeries", () => {
  it("aggregates seeds to mean/min/max per grid value, sorted", () => {
    const rows = [
      row(0, 2, "alg1", "mi_nats", 4),
      row(1, 2, "alg1", "mi_nats", 6),
      row(0, 1, "alg1", "mi_nats", 7),
      row(1, 1, "alg1", "mi_nats", 9),
      row(0, 1, "alg1", "min_rate", 3), // other metric: ignored
      row(0, 1, "cbo", "mi_nats", 5),
    ];
    const series = schemeSeries(rows, "mi_nats");
    expect(series.map((s) => s.scheme)).toEqual(["alg1", "cbo"]);
    expect(series[0].points).toEqual([
      { x: 1, mean: 8, min: 7, max: 9 },
      { x: 2, mean: 5, min: 4, max: 6 },
    ]);
    expect(series[1].points).toEqual([{ x: 1, mean: 5, min: 5, max: 5 }]);
  });
});

describe("finalValueSummary", () => {
  it("keeps the last grid value per seed and aggregates across seeds", () => {
    const rows = [
      row(0, 1, "alg1", "cumulative_wall_ms", 100),
      row(0, 2, "alg1", "cumulative_wall_ms", 250),
      row(1, 1, "alg1", "cumulative_wall_ms", 120),
      row(1, 3, "alg1", "cumulative_wall_ms", 350),
    ];
    const [summary] = finalValueSummary(rows, "cumulative_wall_ms");
    expect(summary.scheme).toBe("alg1");
    expect(summary.points[0]).toEqual({ x: 0, mean: 300, min: 250, max: 350 });
  });
});
