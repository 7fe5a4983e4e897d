/**
 * The steady-profile family figure: one ws(r) curve per input CSV,
 * labeled by its beta and ordered so the legend matches the curve order
 * at r = 0.
 */

import { ProfileData, readProfileCsv } from "./csv.js";
import { renderFigure } from "./svg.js";

export interface ProfileSeries extends ProfileData {
  label: string;
}

/** Betas in these files are usually multiples of pi; say so when they are. */
export function betaLabel(beta: number): string {
  const k = beta / Math.PI;
  const half = Math.round(2 * k) / 2;
  if (Math.abs(k - half) < 1e-9 && Math.abs(half) > 0) {
    const mag = Math.abs(half) === 1 ? "" : String(Math.abs(half));
    return `beta = ${half < 0 ? "-" : ""}${mag}pi`;
  }
  return `beta = ${Number(beta.toPrecision(6))}`;
}

export function loadProfiles(paths: string[]): ProfileSeries[] {
  if (paths.length === 0) throw new Error("profiles plot needs at least one CSV");
  const series = paths.map((p) => {
    const data = readProfileCsv(p);
    return { ...data, label: betaLabel(data.beta) };
  });
  series.sort((a, b) => a.beta - b.beta);
  return series;
}

export function profilesFigure(series: ProfileSeries[]): string {
  return renderFigure({
    title: "steady swirl profiles",
    xLabel: "r",
    yLabel: "ws",
    curves: series.map((s) => ({
      label: s.label,
      points: s.r.map((r, i): [number, number] => [r, s.ws[i]]),
    })),
  });
}

export function plotProfiles(paths: string[]): string {
  return profilesFigure(loadProfiles(paths));
}
