import { describe, expect, it } from "vitest";

import { EmptyCsvError, MissingColumnError } from "../src/csv.js";
import { BEAMPATTERN_FLOOR_DB, render } from "../src/figures.js";

const HASH = "0123456789abcdef0123456789abcdef";

function sweepCsv(): string {
  const lines = ["seed,grid_value,scheme,metric,value"];
  for (const scheme of ["alg1", "cbo"]) {
    for (const seed of [0, 1, 2]) {
      for (const grid of [1, 2, 3, 4]) {
        const value = (scheme === "alg1" ? 8 : 7) - grid * 0.5 + seed * 0.1;
        lines.push(`${seed},${grid},${scheme},mi_nats,${value}`);
        lines.push(`${seed},${grid},${scheme},min_rate,${grid}`);
      }
    }
  }
  return lines.join("\n") + "\n";
}

function beampatternCsv(): string {
  const lines = ["angle_deg,gain_db"];
  for (let angle = -90; angle <= 90; angle += 0.5) {
    const gain = -80 + 80 * Math.exp(-((angle - 10) ** 2) / 50);
    lines.push(`${angle},${gain.toFixed(4)}`);
  }
  return lines.join("\n") + "\n";
}

describe("render", () => {
  it("renders a sweep CSV to an SVG with one curve per scheme", () => {
    const svg = render({
      figure: "mi_vs_rate",
      csvText: sweepCsv(),
      configHash: HASH,
    });
    expect(svg).toMatch(/^<svg /);
    expect(svg).toContain("rate threshold");
    expect(svg).toContain("sensing MI (nats)");
    // one mean polyline + one band per scheme
    expect(svg.match(/fill="none"/g)).toHaveLength(2);
    expect(svg.match(/opacity="0.15"/g)).toHaveLength(2);
    expect(svg).toContain("comm-only");
  });

  it("embeds the config hash in the caption", () => {
    const svg = render({
      figure: "mi_vs_rate",
      csvText: sweepCsv(),
      configHash: HASH,
    });
    expect(svg).toContain(`config ${HASH.slice(0, 12)}`);
  });

  it("is deterministic", () => {
    const recipe = {
      figure: "mi_vs_rate" as const,
      csvText: sweepCsv(),
      configHash: HASH,
    };
    expect(render(recipe)).toBe(render(recipe));
  });

  it("clamps beampattern gains to the -50 dB floor", () => {
    const svg = render({
      figure: "beampattern",
      csvText: beampatternCsv(),
      configHash: HASH,
    });
    expect(svg).toContain("angle (degrees)");
    // -80 dB inputs exist; no plotted y-coordinate may fall below the floor line
    const yFloorMatch = svg.match(/<path d="(M[^"]+)" fill="none"/);
    expect(yFloorMatch).not.toBeNull();
    const ys = [...yFloorMatch![1].matchAll(/[ML][-\d.]+,([-\d.]+)/g)].map(
      (m) => Number(m[1]),
    );
    const floorY = Math.max(...ys);
    // the y-axis domain starts exactly at the floor; nothing may exceed it
    expect(BEAMPATTERN_FLOOR_DB).toBe(-50);
    expect(ys.every((y) => y <= floorY + 1e-9)).toBe(true);
    expect(svg).not.toContain("-80");
  });

  it("renders timing bars from cumulative wall-clock rows", () => {
    const csv = [
      "seed,grid_value,scheme,metric,value",
      "0,1,alg1,cumulative_wall_ms,1000",
      "0,2,alg1,cumulative_wall_ms,2500",
      "0,1,alg2,cumulative_wall_ms,4000",
      "0,2,alg2,cumulative_wall_ms,9000",
      "",
    ].join("\n");
    const svg = render({ figure: "timing", csvText: csv, configHash: HASH });
    expect(svg).toContain("total wall time (s)");
    expect(svg.match(/<rect x=/g)).toHaveLength(2);
  });

  it("propagates the missing-column error", () => {
    expect(() =>
      render({
        figure: "mi_vs_rate",
        csvText: "seed,grid_value,scheme,value\n0,1,alg1,5\n",
        configHash: HASH,
      }),
    ).toThrowError(MissingColumnError);
  });

  it("refuses an empty CSV body", () => {
    expect(() =>
      render({
        figure: "convergence",
        csvText: "seed,grid_value,scheme,metric,value\n",
        configHash: HASH,
      }),
    ).toThrowError(EmptyCsvError);
  });
});
