import path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { betaLabel, loadProfiles, profilesFigure } from "../src/profiles.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

// deliberately out of order; loadProfiles must sort by beta
const SWEEP = ["8pi", "-2pi", "16pi", "0", "2pi", "4pi"].map((label) =>
  path.join(FIXTURES, "profiles", `physics.beta=${label}`, "profile.csv"),
);

function argmax(values: number[]): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

describe("betaLabel", () => {
  it("names pi multiples as such", () => {
    expect(betaLabel(2 * Math.PI)).toBe("beta = 2pi");
    expect(betaLabel(-2 * Math.PI)).toBe("beta = -2pi");
    expect(betaLabel(Math.PI)).toBe("beta = pi");
    expect(betaLabel(0)).toBe("beta = 0");
    expect(betaLabel(1.5)).toBe("beta = 1.5");
  });
});

describe("loadProfiles", () => {
  it("sorts the family by beta and labels each curve", () => {
    const series = loadProfiles(SWEEP);
    expect(series.map((s) => s.label)).toEqual([
      "beta = -2pi",
      "beta = 0",
      "beta = 2pi",
      "beta = 4pi",
      "beta = 8pi",
      "beta = 16pi",
    ]);
    for (const s of series) expect(s.r).toHaveLength(2001);
  });

  it("orders the curves at r = 0 by beta, strictly", () => {
    const series = loadProfiles(SWEEP);
    const centers = series.map((s) => s.ws[0]);
    for (let i = 1; i < centers.length; i++) {
      expect(centers[i]).toBeLessThan(centers[i - 1]);
    }
    // beta = 0 is the plain heat kernel, height 1/(4 pi) at the origin
    expect(series[1].ws[0]).toBeCloseTo(1 / (4 * Math.PI), 8);
  });

  it("peaks at the origin for small beta and on a ring for large", () => {
    const series = loadProfiles(SWEEP);
    for (const s of series.slice(0, 4)) {
      expect(argmax(s.ws)).toBe(0);
    }
    const ring8 = series[4];
    const ring16 = series[5];
    const peak8 = ring8.r[argmax(ring8.ws)];
    const peak16 = ring16.r[argmax(ring16.ws)];
    expect(peak8).toBeGreaterThan(2.2);
    expect(peak8).toBeLessThan(2.9);
    expect(peak16).toBeGreaterThan(3.6);
    expect(peak16).toBeLessThan(4.3);
    expect(ring8.ws[argmax(ring8.ws)]).toBeGreaterThan(ring8.ws[0]);
    expect(ring16.ws[argmax(ring16.ws)]).toBeGreaterThan(ring16.ws[0]);
  });

  it("refuses an empty path list", () => {
    expect(() => loadProfiles([])).toThrow(/at least one/);
  });
});

describe("profilesFigure", () => {
  it("draws one curve per beta with a legend in beta order", () => {
    const series = loadProfiles(SWEEP);
    const svg = profilesFigure(series);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<path /g)).toHaveLength(6);
    const positions = series.map((s) => svg.indexOf(s.label));
    for (const p of positions) expect(p).toBeGreaterThan(-1);
    for (let i = 1; i < positions.length; i++) {
      expect(positions[i]).toBeGreaterThan(positions[i - 1]);
    }
    expect(svg).toContain(">r</text>");
    expect(svg).toContain(">ws</text>");
  });
});
