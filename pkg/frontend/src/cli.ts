#!/usr/bin/env node
/** Render every figure described by a run manifest into an output directory.
 *
 * Usage: node dist/cli.js <results-dir> <out-dir>
 *
 * <results-dir> must contain the manifest.json written by the experiment
 * harness; the experiment CSV and any beampattern CSVs next to it are
 * rendered to one SVG each.
 */

import { renderRun } from "./run.js";

const [resultsDir, outDir] = process.argv.slice(2);
if (!resultsDir || !outDir) {
  console.error("usage: cli.js <results-dir> <out-dir>");
  process.exit(2);
}
for (const file of renderRun(resultsDir, outDir)) {
  console.log(file);
}
