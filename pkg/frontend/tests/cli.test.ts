import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, afterEach, describe, expect, it, vi } from "vitest";

import { runCli } from "../src/cli.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const fixture = (...parts: string[]) => path.join(FIXTURES, ...parts);
const SWEEP = ["-2pi", "0", "2pi", "4pi", "8pi", "16pi"].map((label) =>
  fixture("profiles", `physics.beta=${label}`, "profile.csv"),
);

const scratch = mkdtempSync(path.join(tmpdir(), "ensplot-cli-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

const stderr = vi.spyOn(process.stderr, "write").mockImplementation(() => true);
afterEach(() => stderr.mockClear());

function stderrText(): string {
  return stderr.mock.calls.map((c) => String(c[0])).join("");
}

describe("runCli", () => {
  it("renders the profile family", () => {
    const out = path.join(scratch, "profiles.svg");
    const code = runCli(["profiles", "--in", ...SWEEP, "--out", out]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("beta = 8pi");
    expect(svg.match(/<path /g)).toHaveLength(6);
  });

  it("renders a decay figure annotated from the summary", () => {
    const out = path.join(scratch, "decay.svg");
    const code = runCli([
      "decay",
      "--in",
      fixture("theorem2", "diagnostics.csv"),
      "--summary",
      fixture("theorem2", "summary"),
      "--out",
      out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("wp_w_rate = 0.7092");
  });

  it("honors --columns for decay", () => {
    const out = path.join(scratch, "decay-one.svg");
    const code = runCli([
      "decay",
      "--in",
      fixture("theorem2", "diagnostics.csv"),
      "--columns",
      "wp_w",
      "--out",
      out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8").match(/<path /g)).toHaveLength(1);
  });

  it("renders an entropy figure", () => {
    const out = path.join(scratch, "entropy.svg");
    const code = runCli([
      "entropy",
      "--in",
      fixture("entropy", "diagnostics.csv"),
      "--summary",
      fixture("entropy", "summary"),
      "--out",
      out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("production residual");
  });

  it("fails with a message when an input file is missing", () => {
    const out = path.join(scratch, "never.svg");
    const code = runCli(["profiles", "--in", "no-such.csv", "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
    expect(stderrText()).toContain("ensplot:");
  });

  it("rejects an unknown kind", () => {
    const code = runCli(["scatter", "--in", SWEEP[0], "--out", path.join(scratch, "x.svg")]);
    expect(code).toBe(1);
    expect(stderrText()).toContain("unknown plot kind");
  });

  it("rejects a missing --out", () => {
    expect(runCli(["profiles", "--in", SWEEP[0]])).toBe(1);
    expect(stderrText()).toContain("ensplot:");
  });

  it("rejects several inputs for a single-table kind", () => {
    const code = runCli([
      "decay",
      "--in",
      fixture("theorem2", "diagnostics.csv"),
      fixture("entropy", "diagnostics.csv"),
      "--out",
      path.join(scratch, "y.svg"),
    ]);
    expect(code).toBe(1);
    expect(stderrText()).toContain("exactly one");
  });
});
