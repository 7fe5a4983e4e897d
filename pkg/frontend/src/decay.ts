/**
 * Decay plots: chosen diagnostics columns against tau on a log y axis.
 * Fitted slopes shown on the figure come from the run's summary file;
 * this module never fits anything itself.
 */

import { readDiagnosticsCsv, readSummary, Summary } from "./csv.js";

import { Curve, renderFigure } from "./svg.js";

export const DEFAULT_DECAY_COLUMNS = ["wp_w", "dp_w"];

export interface DecayData {
  curves: Curve[];
  annotations: string[];
}

export function loadDecay(
  diagPath: string,
  columns: string[] = DEFAULT_DECAY_COLUMNS,
  summaryPath?: string,
): DecayData {
  if (columns.length === 0) throw new Error("decay plot needs at least one column");
  const diag = readDiagnosticsCsv(diagPath);
  const curves = columns.map((name): Curve => {
    const tau = diag.series.get("tau");
    const values = diag.series.get(name);
    if (tau === undefined) throw new Error(`${diagPath} has no tau column`);
    if (values === undefined) {
      throw new Error(`${diagPath} has no column named ${name}`);
    }
    // NaN rows (weighted norms off their box) and zeros cannot sit on a log axis.
    const points = tau
      .map((t, i): [number, number] => [t, values[i]])
      .filter(([, v]) => Number.isFinite(v) && v > 0);
    return { label: name, points };
  });

  const annotations: string[] = [];
  if (summaryPath !== undefined) {
    const summary = readSummary(summaryPath);
    for (const fit of fitsForColumns(summary, columns)) {
      annotations.push(
        `${fit.name} = ${fit.value.toPrecision(4)} (r2 = ${fit.r2.toPrecision(4)})`,
      );
    }
  }
  return { curves, annotations };
}

function fitsForColumns(summary: Summary, columns: string[]) {
  return summary.fits.filter((f) => columns.some((c) => f.name === `${c}_rate`));
}

export function decayFigure(data: DecayData): string {
  return renderFigure({
    title: "perturbation decay",
    xLabel: "tau",
    yLabel: "weighted norm",
    yKind: "log",
    curves: data.curves,
    annotations: data.annotations,
  });
}

export function plotDecay(
  diagPath: string,
  columns?: string[],
  summaryPath?: string,
): string {
  return decayFigure(loadDecay(diagPath, columns, summaryPath));
}
