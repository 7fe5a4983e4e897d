/**
 * Minimal SVG figure assembly: linear/log scales, nice ticks, polyline
 * curves, a legend, and free annotation lines.  No drawing dependency;
 * the output is a plain standalone SVG document.
 */

export type AxisKind = "linear" | "log";

export interface Curve {
  label: string;
  /** already in data units; non-finite points must be filtered by the caller */
  points: Array<[number, number]>;
}

export interface FigureSpec {
  width?: number;
  height?: number;
  title?: string;
  xLabel: string;
  yLabel: string;
  xKind?: AxisKind;
  yKind?: AxisKind;
  curves: Curve[];
  /** free text lines drawn inside the plot area, top left */
  annotations?: string[];
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { top: 34, right: 24, bottom: 46, left: 64 };

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mult * mag >= step0) {
      step = mult * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

export function tickLabel(v: number, kind: AxisKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(4)));
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Mapper {
  (v: number): number;
}

function makeMapper(kind: AxisKind, lo: number, hi: number, p0: number, p1: number): Mapper {
  if (kind === "log") {
    const l0 = Math.log10(lo);
    const l1 = Math.log10(hi);
    return (v) => p0 + ((Math.log10(v) - l0) / (l1 - l0)) * (p1 - p0);
  }
  return (v) => p0 + ((v - lo) / (hi - lo)) * (p1 - p0);
}

function extent(curves: Curve[], pick: (p: [number, number]) => number, kind: AxisKind): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of curves) {
    for (const p of c.points) {
      const v = pick(p);
      if (kind === "log" && !(v > 0)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!(lo <= hi)) throw new Error("no drawable points");
  if (lo === hi) {
    lo = kind === "log" ? lo / 2 : lo - 0.5;
    hi = kind === "log" ? hi * 2 : hi + 0.5;
  }
  return [lo, hi];
}

export function renderFigure(spec: FigureSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const xKind = spec.xKind ?? "linear";
  const yKind = spec.yKind ?? "linear";
  if (spec.curves.length === 0) throw new Error("figure needs at least one curve");
  const drawable = spec.curves.map((c) => ({
    label: c.label,
    points: c.points.filter(
      ([x, y]) =>
        Number.isFinite(x) &&
        Number.isFinite(y) &&
        (xKind !== "log" || x > 0) &&
        (yKind !== "log" || y > 0),
    ),
  }));
  const [xLo, xHi] = extent(drawable, (p) => p[0], xKind);
  const [yLo, yHi] = extent(drawable, (p) => p[1], yKind);
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  const mapX = makeMapper(xKind, xLo, xHi, x0, x1);
  const mapY = makeMapper(yKind, yLo, yHi, y0, y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">${escapeXml(spec.title)}</text>`,
    );
  }

  const xTicks = xKind === "log" ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  const yTicks = yKind === "log" ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const v of xTicks) {
    const px = mapX(v);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y1}" stroke="#dddddd"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${y0 + 18}" text-anchor="middle">${tickLabel(v, xKind)}</text>`,
    );
  }
  for (const v of yTicks) {
    const py = mapY(v);
    parts.push(`<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#dddddd"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${(py + 4).toFixed(2)}" text-anchor="end">${tickLabel(v, yKind)}</text>`,
    );
  }
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="black"/>`);
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 10}" text-anchor="middle">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  drawable.forEach((curve, i) => {
    if (curve.points.length === 0) return;
    const color = PALETTE[i % PALETTE.length];
    const d = curve.points
      .map(([x, y], k) => `${k === 0 ? "M" : "L"}${mapX(x).toFixed(2)},${mapY(y).toFixed(2)}`)
      .join(" ");
    parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
  });

  // legend, top right inside the frame
  drawable.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = y1 + 16 + 16 * i;
    const lx = x1 - 150;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}">${escapeXml(curve.label)}</text>`);
  });

  (spec.annotations ?? []).forEach((line, i) => {
    parts.push(`<text x="${x0 + 10}" y="${y1 + 16 + 16 * i}" fill="#333333">${escapeXml(line)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
