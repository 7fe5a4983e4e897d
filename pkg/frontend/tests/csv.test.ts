import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import { readDiagnosticsCsv, readProfileCsv, readSummary } from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const fixture = (...parts: string[]) => path.join(FIXTURES, ...parts);

const scratch = mkdtempSync(path.join(tmpdir(), "ensplot-csv-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function scratchFile(name: string, body: string): string {
  const p = path.join(scratch, name);
  writeFileSync(p, body);
  return p;
}

describe("readProfileCsv", () => {
  it("reads a swept profile", () => {
    const data = readProfileCsv(fixture("profiles", "physics.beta=2pi", "profile.csv"));
    expect(data.beta).toBeCloseTo(2 * Math.PI, 12);
    expect(data.r).toHaveLength(2001);
    expect(data.ws).toHaveLength(2001);
    expect(data.r[0]).toBe(0);
    expect(data.r[2000]).toBeCloseTo(10, 12);
    expect(data.ws[0]).toBeCloseTo(0.054292192996144205, 12);
    for (let i = 1; i < data.r.length; i++) {
      expect(data.r[i]).toBeGreaterThan(data.r[i - 1]);
    }
  });

  it("rejects a file with the wrong version line", () => {
    const p = scratchFile("bad-version.csv", "# something-else\nr,ws\n0,1\n");
    expect(() => readProfileCsv(p)).toThrow(/version/);
  });

  it("rejects a row with the wrong shape", () => {
    const p = scratchFile(
      "bad-row.csv",
      "# ens-profile-v1: beta = 0\nr,ws\n0,1,2\n",
    );
    expect(() => readProfileCsv(p)).toThrow(/2 columns/);
  });
});

describe("readDiagnosticsCsv", () => {
  it("reads the monitor table", () => {
    const diag = readDiagnosticsCsv(fixture("theorem2", "diagnostics.csv"));
    expect(diag.columns).toHaveLength(19);
    expect(diag.columns[0]).toBe("t");
    expect(diag.columns[1]).toBe("tau");
    expect(diag.rows).toHaveLength(35);
    const wp = diag.series.get("wp_w");
    expect(wp).toBeDefined();
    expect(wp).toHaveLength(35);
    expect(wp![0]).toBeCloseTo(0.01, 8);
  });

  it("parses nan cells as NaN", () => {
    const p = scratchFile(
      "with-nan.csv",
      "# ens-diagnostics-v1: t,tau,entropy\nt,tau,entropy\n1,0,nan\n2,0.69,0.5\n",
    );
    const diag = readDiagnosticsCsv(p);
    const ent = diag.series.get("entropy")!;
    expect(Number.isNaN(ent[0])).toBe(true);
    expect(ent[1]).toBe(0.5);
  });

  it("rejects a header that disagrees with the version line", () => {
    const p = scratchFile(
      "bad-header.csv",
      "# ens-diagnostics-v1: t,tau\nt,other\n1,0\n",
    );
    expect(() => readDiagnosticsCsv(p)).toThrow(/header/);
  });
});

describe("readSummary", () => {
  it("reads fits, criteria, and the exit code", () => {
    const summary = readSummary(fixture("theorem2", "summary"));
    expect(summary.scenario).toBe("theorem2-perturbation");
    expect(summary.error).toBeUndefined();
    expect(summary.exit).toBe(0);
    expect(summary.fits).toHaveLength(2);
    expect(summary.fits[0].name).toBe("wp_w_rate");
    expect(summary.fits[0].value).toBeCloseTo(0.7091887899, 9);
    expect(summary.fits[0].r2).toBeCloseTo(0.9461242687, 9);
    expect(summary.criteria).toHaveLength(4);
    expect(summary.criteria[0].name).toBe("wp_w_rate");
    expect(summary.criteria[0].band).toBe(">= 0.25");
    expect(summary.criteria.every((c) => c.pass)).toBe(true);
  });

  it("rejects lines it does not recognize", () => {
    const p = scratchFile(
      "bad-summary",
      "# ens-summary-v1\nscenario: x\nbogus line\nexit: 0\n",
    );
    expect(() => readSummary(p)).toThrow(/unrecognized/);
  });
});
