export {
  EmptyCsvError,
  MissingColumnError,
  parseBeampatternCsv,
  parseExperimentCsv,
} from "./csv.js";
export type { BeampatternRow, ExperimentRow } from "./csv.js";
export { finalValueSummary, schemeSeries } from "./stats.js";
export type { BandPoint, SchemeSeries } from "./stats.js";
export { BEAMPATTERN_FLOOR_DB, render, SCHEME_STYLE } from "./figures.js";
export type { FigureId, FigureRecipe } from "./figures.js";
export { renderRun } from "./run.js";
