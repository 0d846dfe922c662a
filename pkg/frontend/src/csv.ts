/** CSV ingestion for the experiment harness outputs. Read-only: no metric is
 *  ever recomputed here, only re-plotted. */

import Papa from "papaparse";

/** One row of an experiment CSV (`seed,grid_value,scheme,metric,value`). */
export interface ExperimentRow {
  seed: number;
  grid_value: number;
  scheme: string;
  metric: string;
  value: number;
}

/** One row of a beampattern CSV (`angle_deg,gain_db`). */
export interface BeampatternRow {
  angle_deg: number;
  gain_db: number;
}

export class MissingColumnError extends Error {
  constructor(expected: readonly string[], found: readonly string[]) {
    super(
      `CSV is missing required column(s): expected [${expected.join(", ")}], ` +
        `found [${found.join(", ")}]`,
    );
    this.name = "MissingColumnError";
  }
}

export class EmptyCsvError extends Error {
  constructor() {
    super("CSV has a header but no data rows; refusing to render an empty figure");
    this.name = "EmptyCsvError";
  }
}

function parseRows(
  text: string,
  expected: readonly string[],
): Record<string, string>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const found = parsed.meta.fields ?? [];
  const missing = expected.filter((col) => !found.includes(col));
  if (missing.length > 0) {
    throw new MissingColumnError(expected, found);
  }
  if (parsed.data.length === 0) {
    throw new EmptyCsvError();
  }
  return parsed.data;
}

function toNumber(raw: string, column: string): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value ${JSON.stringify(raw)} in column ${column}`);
  }
  return value;
}

export const EXPERIMENT_COLUMNS = [
  "seed",
  "grid_value",
  "scheme",
  "metric",
  "value",
] as const;

export const BEAMPATTERN_COLUMNS = ["angle_deg", "gain_db"] as const;

export function parseExperimentCsv(text: string): ExperimentRow[] {
  return parseRows(text, EXPERIMENT_COLUMNS).map((row) => ({
    seed: toNumber(row.seed, "seed"),
    grid_value: toNumber(row.grid_value, "grid_value"),
    scheme: row.scheme,
    metric: row.metric,
    value: toNumber(row.value, "value"),
  }));
}

export function parseBeampatternCsv(text: string): BeampatternRow[] {
  return parseRows(text, BEAMPATTERN_COLUMNS).map((row) => ({
    angle_deg: toNumber(row.angle_deg, "angle_deg"),
    gain_db: toNumber(row.gain_db, "gain_db"),
  }));
}
