/**
 * Entropy plots: relative entropy and Fisher information against tau.
 * Both quantities are positive while the state differs from its target,
 * so they go on a log y axis; rows where a monitor was off its box are
 * dropped rather than drawn.
 */

import { readDiagnosticsCsv, readSummary } from "./csv.js";

import { Curve, renderFigure } from "./svg.js";

const ENTROPY_COLUMNS = ["entropy", "fisher"];

export interface EntropyData {
  curves: Curve[];
  annotations: string[];
}

export function loadEntropy(diagPath: string, summaryPath?: string): EntropyData {
  const diag = readDiagnosticsCsv(diagPath);
  const tau = diag.series.get("tau");
  if (tau === undefined) throw new Error(`${diagPath} has no tau column`);
  const curves = ENTROPY_COLUMNS.map((name): Curve => {
    const values = diag.series.get(name);
    if (values === undefined) {
      throw new Error(`${diagPath} has no column named ${name}`);
    }
    const points = tau
      .map((t, i): [number, number] => [t, values[i]])
      .filter(([, v]) => Number.isFinite(v) && v > 0);
    return { label: name, points };
  });

  const annotations: string[] = [];
  if (summaryPath !== undefined) {
    const summary = readSummary(summaryPath);
    for (const c of summary.criteria) {
      if (c.name === "production_residual") {
        annotations.push(`production residual = ${c.measured.toPrecision(4)}`);
      }
    }
  }
  return { curves, annotations };
}

export function entropyFigure(data: EntropyData): string {
  return renderFigure({
    title: "entropy and information production",
    xLabel: "tau",
    yLabel: "value",
    yKind: "log",
    curves: data.curves,
    annotations: data.annotations,
  });
}

export function plotEntropy(diagPath: string, summaryPath?: string): string {
  return entropyFigure(loadEntropy(diagPath, summaryPath));
}
