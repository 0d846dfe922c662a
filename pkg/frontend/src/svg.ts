/** Minimal deterministic SVG assembly: scales, axes, lines, bands, bars. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN: Margin = { top: 48, right: 24, bottom: 64, left: 64 };

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  return scale;
}

/** Round tick positions covering the domain, at most `count + 1` of them. */
export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const rawStep = span / count;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step =
    [1, 2, 5, 10].find((mult) => mult * power >= rawStep)! * power;
  const out: number[] = [];
  for (
    let tick = Math.ceil(lo / step) * step;
    tick <= hi + step * 1e-9;
    tick += step
  ) {
    out.push(Math.abs(tick) < step * 1e-9 ? 0 : tick);
  }
  return out;
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (value: number) => {
  const rounded = Number(value.toFixed(2));
  return String(Object.is(rounded, -0) ? 0 : rounded);
};

export function polylinePath(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`)
    .join(" ");
}

/** Closed path tracing the upper edge then the lower edge in reverse. */
export function bandPath(
  upper: Array<[number, number]>,
  lower: Array<[number, number]>,
): string {
  return `${polylinePath(upper)} ${polylinePath([...lower].reverse()).replace(
    /^M/,
    "L",
  )} Z`;
}

export interface AxisLabels {
  x: string;
  y: string;
  title: string;
  caption: string;
}

export function axes(
  xScale: LinearScale,
  yScale: LinearScale,
  labels: AxisLabels,
  xTicks?: number[],
): string {
  const pieces: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  pieces.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333"/>`,
  );
  for (const tick of xTicks ?? ticks(xScale.domain)) {
    const px = xScale(tick);
    pieces.push(
      `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#333"/>`,
      `<text x="${fmt(px)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${fmt(tick)}</text>`,
    );
  }
  for (const tick of ticks(yScale.domain)) {
    const py = yScale(tick);
    pieces.push(
      `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333"/>`,
      `<text x="${x0 - 9}" y="${fmt(py + 4)}" text-anchor="end" font-size="12">${fmt(tick)}</text>`,
    );
  }
  pieces.push(
    `<text x="${(x0 + x1) / 2}" y="${y0 + 42}" text-anchor="middle" font-size="13">${escapeXml(labels.x)}</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(y0 + y1) / 2})">${escapeXml(labels.y)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="24" text-anchor="middle" font-size="15" font-weight="bold">${escapeXml(labels.title)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 8}" text-anchor="middle" font-size="10" fill="#666">${escapeXml(labels.caption)}</text>`,
  );
  return pieces.join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n${body}\n</svg>\n`
  );
}
