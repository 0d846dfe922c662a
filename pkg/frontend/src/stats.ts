/** Seed aggregation: multi-seed series become mean curves with min-max bands. */

import type { ExperimentRow } from "./csv.js";

export interface BandPoint {
  x: number;
  mean: number;
  min: number;
  max: number;
}

export interface SchemeSeries {
  scheme: string;
  points: BandPoint[];
}

/** Group one metric of an experiment table into per-scheme banded curves,
 *  ordered by grid value. */
export function schemeSeries(
  rows: ExperimentRow[],
  metric: string,
): SchemeSeries[] {
  const bySchemeAndX = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    if (row.metric !== metric) continue;
    let byX = bySchemeAndX.get(row.scheme);
    if (!byX) {
      byX = new Map();
      bySchemeAndX.set(row.scheme, byX);
    }
    const bucket = byX.get(row.grid_value) ?? [];
    bucket.push(row.value);
    byX.set(row.grid_value, bucket);
  }
  const series: SchemeSeries[] = [];
  for (const [scheme, byX] of bySchemeAndX) {
    const points = [...byX.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([x, values]) => ({
        x,
        mean: values.reduce((acc, v) => acc + v, 0) / values.length,
        min: Math.min(...values),
        max: Math.max(...values),
      }));
    series.push({ scheme, points });
  }
  series.sort((a, b) => a.scheme.localeCompare(b.scheme));
  return series;
}

/** Per-scheme scalar summary (used for the timing bars): the last grid value
 *  of each seed's curve, aggregated to mean/min/max across seeds. */
export function finalValueSummary(
  rows: ExperimentRow[],
  metric: string,
): SchemeSeries[] {
  const byScheme = new Map<string, Map<number, ExperimentRow>>();
  for (const row of rows) {
    if (row.metric !== metric) continue;
    let bySeed = byScheme.get(row.scheme);
    if (!bySeed) {
      bySeed = new Map();
      byScheme.set(row.scheme, bySeed);
    }
    const current = bySeed.get(row.seed);
    if (!current || row.grid_value > current.grid_value) {
      bySeed.set(row.seed, row);
    }
  }
  const series: SchemeSeries[] = [];
  for (const [scheme, bySeed] of byScheme) {
    const values = [...bySeed.values()].map((row) => row.value);
    series.push({
      scheme,
      points: [
        {
          x: 0,
          mean: values.reduce((acc, v) => acc + v, 0) / values.length,
          min: Math.min(...values),
          max: Math.max(...values),
        },
      ],
    });
  }
  series.sort((a, b) => a.scheme.localeCompare(b.scheme));
  return series;
}
