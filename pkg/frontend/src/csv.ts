/**
 * Readers for the three text formats the simulation CLI emits:
 * profile CSVs, diagnostics CSVs, and summary files.  Values are parsed,
 * validated against the versioned schemas, and never recomputed.
 */

import { readFileSync } from "node:fs";
// papaparse is CommonJS; only the default import resolves under node ESM
import Papa from "papaparse";

export const PROFILE_VERSION = "ens-profile-v1";
export const DIAGNOSTICS_VERSION = "ens-diagnostics-v1";
export const SUMMARY_VERSION = "ens-summary-v1";

export interface ProfileData {
  beta: number;
  r: number[];
  ws: number[];
}

export interface Diagnostics {
  columns: string[];
  rows: number[][];
  /** column name -> values down the rows */
  series: Map<string, number[]>;
}

export interface SummaryFit {
  name: string;
  value: number;
  r2: number;
}

export interface SummaryCriterion {
  name: string;
  measured: number;
  band: string;
  pass: boolean;
}

export interface Summary {
  scenario: string;
  error?: string;
  fits: SummaryFit[];
  criteria: SummaryCriterion[];
  exit: number;
}

/** The C-style '%.17g' writer spells specials as nan/inf. */
function numeric(cell: string, where: string): number {
  const s = cell.trim();
  if (s === "nan" || s === "-nan") return NaN;
  if (s === "inf") return Infinity;
  if (s === "-inf") return -Infinity;
  const v = Number(s);
  if (s === "" || Number.isNaN(v)) {
    throw new Error(`${where}: not a number: '${cell}'`);
  }
  return v;
}

function splitRows(body: string, where: string): string[][] {
  const parsed = Papa.parse<string[]>(body, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${where}: ${e.message} (row ${e.row})`);
  }
  return parsed.data;
}

export function readProfileCsv(path: string): ProfileData {
  const text = readFileSync(path, "utf8");
  const firstBreak = text.indexOf("\n");
  const head = firstBreak < 0 ? text : text.slice(0, firstBreak);
  const m = head.match(/^# ens-profile-v1: beta = (\S+)$/);
  if (!m) {
    throw new Error(`${path}: expected '# ${PROFILE_VERSION}: beta = ...', got '${head}'`);
  }
  const beta = numeric(m[1], path);
  const rows = splitRows(text.slice(firstBreak + 1), path);
  if (rows.length < 2 || rows[0].join(",") !== "r,ws") {
    throw new Error(`${path}: expected an 'r,ws' header with data rows`);
  }
  const r: number[] = [];
  const ws: number[] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== 2) {
      throw new Error(`${path}: expected 2 columns, got ${row.length}`);
    }
    r.push(numeric(row[0], path));
    ws.push(numeric(row[1], path));
  }
  for (let i = 1; i < r.length; i++) {
    if (!(r[i] > r[i - 1])) {
      throw new Error(`${path}: r must increase (row ${i + 1})`);
    }
  }
  return { beta, r, ws };
}

export function readDiagnosticsCsv(path: string): Diagnostics {
  const text = readFileSync(path, "utf8");
  const firstBreak = text.indexOf("\n");
  const head = firstBreak < 0 ? text : text.slice(0, firstBreak);
  const m = head.match(/^# ens-diagnostics-v1: (.+)$/);
  if (!m) {
    throw new Error(`${path}: expected '# ${DIAGNOSTICS_VERSION}: ...', got '${head}'`);
  }
  const columns = m[1].split(",");
  const rows = splitRows(text.slice(firstBreak + 1), path);
  if (rows.length === 0 || rows[0].join(",") !== columns.join(",")) {
    throw new Error(`${path}: header row does not match the version line`);
  }
  const data: number[][] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== columns.length) {
      throw new Error(`${path}: expected ${columns.length} columns, got ${row.length}`);
    }
    data.push(row.map((cell) => numeric(cell, path)));
  }
  const series = new Map<string, number[]>();
  columns.forEach((name, j) => {
    series.set(name, data.map((row) => row[j]));
  });
  return { columns, rows: data, series };
}

export function readSummary(path: string): Summary {
  const lines = readFileSync(path, "utf8").split("\n").filter((s) => s.length > 0);
  if (lines[0] !== `# ${SUMMARY_VERSION}`) {
    throw new Error(`${path}: expected '# ${SUMMARY_VERSION}', got '${lines[0]}'`);
  }
  const out: Summary = { scenario: "", fits: [], criteria: [], exit: -1 };
  for (const line of lines.slice(1)) {
    if (line.startsWith("scenario: ")) {
      out.scenario = line.slice("scenario: ".length);
    } else if (line.startsWith("error: ")) {
      out.error = line.slice("error: ".length);
    } else if (line.startsWith("fit: ")) {
      const m = line.match(/^fit: (\S+) \| value = (\S+) \| r2 = (\S+)$/);
      if (!m) throw new Error(`${path}: malformed fit line '${line}'`);
      out.fits.push({ name: m[1], value: numeric(m[2], path), r2: numeric(m[3], path) });
    } else if (line.startsWith("criterion: ")) {
      const m = line.match(/^criterion: (\S+) \| measured = (\S+) \| band = (.+) \| pass = (true|false)$/);
      if (!m) throw new Error(`${path}: malformed criterion line '${line}'`);
      out.criteria.push({
        name: m[1],
        measured: numeric(m[2], path),
        band: m[3],
        pass: m[4] === "true",
      });
    } else if (line.startsWith("exit: ")) {
      out.exit = Number(line.slice("exit: ".length));
    } else {
      throw new Error(`${path}: unrecognized summary line '${line}'`);
    }
  }
  if (out.scenario === "" || out.exit < 0) {
    throw new Error(`${path}: summary lacks scenario or exit line`);
  }
  return out;
}
