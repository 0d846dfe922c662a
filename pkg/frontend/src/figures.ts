/** Figure recipes: one per experiment id, rendering harness CSVs to SVG. */

import {
  parseBeampatternCsv,
  parseExperimentCsv,
  type ExperimentRow,
} from "./csv.js";
import { finalValueSummary, schemeSeries, type SchemeSeries } from "./stats.js";
import {
  axes,
  bandPath,
  document,
  HEIGHT,
  linearScale,
  MARGIN,
  polylinePath,
  WIDTH,
  type AxisLabels,
} from "./svg.js";

export type FigureId =
  | "convergence"
  | "mi_vs_rate"
  | "mi_vs_elements"
  | "mi_vs_clutter"
  | "beampattern"
  | "timing";

export interface FigureRecipe {
  figure: FigureId;
  /** Raw CSV text produced by the experiment harness. */
  csvText: string;
  /** Config hash from the run manifest, embedded in the caption. */
  configHash: string;
  title?: string;
}

export const SCHEME_STYLE: Record<string, { color: string; label: string }> = {
  alg1: { color: "#d62728", label: "joint (simplified)" },
  alg2: { color: "#1f77b4", label: "joint (generalized)" },
  cbo: { color: "#2ca02c", label: "comm-only" },
  so: { color: "#9467bd", label: "separate opt." },
  random: { color: "#7f7f7f", label: "random phases" },
};

const X_LABELS: Record<Exclude<FigureId, "beampattern" | "timing">, string> = {
  convergence: "outer iteration",
  mi_vs_rate: "rate threshold r (bits/s/Hz)",
  mi_vs_elements: "reflecting elements M",
  mi_vs_clutter: "clutter sources",
};

export const BEAMPATTERN_FLOOR_DB = -50;

function styleOf(scheme: string) {
  return SCHEME_STYLE[scheme] ?? { color: "#000", label: scheme };
}

function caption(hash: string): string {
  return `config ${hash.slice(0, 12)}`;
}

function plotArea() {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right] as [number, number],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top] as [number, number],
  };
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

function padded([lo, hi]: [number, number], frac = 0.06): [number, number] {
  const pad = (hi - lo || 1) * frac;
  return [lo - pad, hi + pad];
}

function legend(series: SchemeSeries[]): string {
  return series
    .map(({ scheme }, i) => {
      const { color, label } = styleOf(scheme);
      const y = MARGIN.top + 16 + 18 * i;
      const x = WIDTH - MARGIN.right - 150;
      return (
        `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>` +
        `<text x="${x + 28}" y="${y}" font-size="12">${label}</text>`
      );
    })
    .join("\n");
}

function bandedLines(
  rows: ExperimentRow[],
  figure: Exclude<FigureId, "beampattern" | "timing">,
  hash: string,
  title: string,
): string {
  const series = schemeSeries(rows, "mi_nats");
  const area = plotArea();
  const allPoints = series.flatMap((s) => s.points);
  const xScale = linearScale(extent(allPoints.map((p) => p.x)), area.x);
  const yScale = linearScale(
    padded(extent(allPoints.flatMap((p) => [p.min, p.max]))),
    area.y,
  );
  const body: string[] = [];
  for (const { scheme, points } of series) {
    const { color } = styleOf(scheme);
    const upper = points.map(
      (p) => [xScale(p.x), yScale(p.max)] as [number, number],
    );
    const lower = points.map(
      (p) => [xScale(p.x), yScale(p.min)] as [number, number],
    );
    const mean = points.map(
      (p) => [xScale(p.x), yScale(p.mean)] as [number, number],
    );
    if (points.length > 1) {
      body.push(
        `<path d="${bandPath(upper, lower)}" fill="${color}" opacity="0.15"/>`,
      );
    }
    body.push(
      `<path d="${polylinePath(mean)}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
    for (const [px, py] of mean) {
      body.push(`<circle cx="${px}" cy="${py}" r="3" fill="${color}"/>`);
    }
  }
  const labels: AxisLabels = {
    x: X_LABELS[figure],
    y: "sensing MI (nats)",
    title,
    caption: caption(hash),
  };
  body.push(axes(xScale, yScale, labels), legend(series));
  return document(body.join("\n"));
}

function beampatternFigure(csvText: string, hash: string, title: string): string {
  const rows = parseBeampatternCsv(csvText);
  const area = plotArea();
  const xScale = linearScale([-90, 90], area.x);
  const yScale = linearScale([BEAMPATTERN_FLOOR_DB, 2], area.y);
  const curve = rows.map(
    (row) =>
      [
        xScale(row.angle_deg),
        yScale(Math.max(row.gain_db, BEAMPATTERN_FLOOR_DB)),
      ] as [number, number],
  );
  const labels: AxisLabels = {
    x: "angle (degrees)",
    y: "normalized gain (dB)",
    title,
    caption: caption(hash),
  };
  const body = [
    `<path d="${polylinePath(curve)}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>`,
    axes(xScale, yScale, labels, [-90, -60, -30, 0, 30, 60, 90]),
  ];
  return document(body.join("\n"));
}

function timingFigure(rows: ExperimentRow[], hash: string, title: string): string {
  const summary = finalValueSummary(rows, "cumulative_wall_ms");
  const area = plotArea();
  const xScale = linearScale([0, summary.length], area.x);
  const yScale = linearScale(
    [0, Math.max(...summary.map((s) => s.points[0].max)) * 1.1e-3],
    area.y,
  );
  const body: string[] = [];
  const barWidth = (area.x[1] - area.x[0]) / Math.max(summary.length, 1) / 2;
  summary.forEach(({ scheme, points }, i) => {
    const { color, label } = styleOf(scheme);
    const [p] = points;
    const cx = xScale(i + 0.5);
    const top = yScale(p.mean * 1e-3);
    body.push(
      `<rect x="${cx - barWidth / 2}" y="${top}" width="${barWidth}" height="${
        area.y[0] - top
      }" fill="${color}" opacity="0.8"/>`,
      `<line x1="${cx}" y1="${yScale(p.min * 1e-3)}" x2="${cx}" y2="${yScale(
        p.max * 1e-3,
      )}" stroke="#333" stroke-width="1.5"/>`,
      `<text x="${cx}" y="${area.y[0] + 20}" text-anchor="middle" font-size="12">${label}</text>`,
    );
  });
  const labels: AxisLabels = {
    x: "",
    y: "total wall time (s)",
    title,
    caption: caption(hash),
  };
  body.push(axes(xScale, yScale, labels, []));
  return document(body.join("\n"));
}

const DEFAULT_TITLES: Record<FigureId, string> = {
  convergence: "Objective trace per outer iteration",
  mi_vs_rate: "Sensing MI vs. rate threshold",
  mi_vs_elements: "Sensing MI vs. surface size",
  mi_vs_clutter: "Sensing MI vs. clutter count",
  beampattern: "Transmit beampattern",
  timing: "Runtime comparison",
};

/** Render one figure to an SVG string. Deterministic given the inputs. */
export function render(recipe: FigureRecipe): string {
  const title = recipe.title ?? DEFAULT_TITLES[recipe.figure];
  switch (recipe.figure) {
    case "beampattern":
      return beampatternFigure(recipe.csvText, recipe.configHash, title);
    case "timing":
      return timingFigure(
        parseExperimentCsv(recipe.csvText),
        recipe.configHash,
        title,
      );
    default:
      return bandedLines(
        parseExperimentCsv(recipe.csvText),
        recipe.figure,
        recipe.configHash,
        title,
      );
  }
}
