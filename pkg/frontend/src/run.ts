/** Filesystem glue: render every CSV referenced by a run manifest. */

import { mkdirSync, readdirSync, readFileSync, writeFileSync } from "fs";
import path from "path";

import { render, type FigureId } from "./figures.js";

export interface Manifest {
  experiment: FigureId;
  config_hash: string;
  outputs: string[];
}

function findManifest(resultsDir: string): string {
  const name = readdirSync(resultsDir)
    .sort()
    .find((entry) => entry === "manifest.json" || entry.endsWith("_manifest.json"));
  if (!name) {
    throw new Error(`no *manifest.json found in ${resultsDir}`);
  }
  return path.join(resultsDir, name);
}

export function renderRun(resultsDir: string, outDir: string): string[] {
  const manifest: Manifest = JSON.parse(readFileSync(findManifest(resultsDir), "utf-8"));
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const output of manifest.outputs) {
    if (!output.endsWith(".csv")) continue;
    const base = path.basename(output, ".csv");
    let figure: FigureId;
    if (base.startsWith("beampattern_")) {
      figure = "beampattern"; // per-state angle/gain curve
    } else if (manifest.experiment === "beampattern") {
      continue; // the summary table has no curve to draw
    } else {
      figure = manifest.experiment;
    }
    const svg = render({
      figure,
      csvText: readFileSync(path.join(resultsDir, path.basename(output)), "utf-8"),
      configHash: manifest.config_hash,
    });
    const target = path.join(outDir, `${base}.svg`);
    writeFileSync(target, svg, "utf-8");
    written.push(target);
  }
  return written;
}
