#!/usr/bin/env node
/**
 * ensplot <kind> --in <csv...> --out <svg>
 *
 * Renders SVG figures from scenario artifacts. Kinds:
 *   profiles  one or more profile.csv files, a curve per beta
 *   decay     a diagnostics.csv, chosen columns against tau on log y
 *   entropy   a diagnostics.csv, entropy and fisher against tau on log y
 */

import { realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { plotDecay } from "./decay.js";
import { plotEntropy } from "./entropy.js";
import { plotProfiles } from "./profiles.js";

const KINDS = ["profiles", "decay", "entropy"];

function buildParser(argv: string[]) {
  return yargs(argv)
    .scriptName("ensplot")
    .usage("$0 <kind> --in <csv...> --out <svg>")
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV file(s)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("summary", {
      type: "string",
      describe: "summary file whose fit lines annotate the figure",
    })
    .option("columns", {
      type: "string",
      array: true,
      describe: "diagnostics columns to draw (decay only)",
    })
    .exitProcess(false)
    .fail(false);
}

function errorText(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export function runCli(argv: string[]): number {
  let args;
  try {
    args = buildParser(argv).parseSync();
  } catch (err) {
    process.stderr.write(`ensplot: ${errorText(err)}\n`);
    return 1;
  }
  if (args.help) return 0;

  const kind = String(args._[0] ?? "");
  const ins = args.in.map(String);
  const columns = args.columns?.flatMap((c) => String(c).split(",")).filter(Boolean);
  try {
    let svg: string;
    if (kind === "profiles") {
      svg = plotProfiles(ins);
    } else if (kind === "decay") {
      if (ins.length !== 1) throw new Error("decay takes exactly one diagnostics CSV");
      svg = plotDecay(ins[0], columns, args.summary);
    } else if (kind === "entropy") {
      if (ins.length !== 1) throw new Error("entropy takes exactly one diagnostics CSV");
      svg = plotEntropy(ins[0], args.summary);
    } else {
      throw new Error(
        `unknown plot kind ${kind || "(none)"}; expected one of ${KINDS.join(", ")}`,
      );
    }
    writeFileSync(args.out, svg);
  } catch (err) {
    process.stderr.write(`ensplot: ${errorText(err)}\n`);
    return 1;
  }
  return 0;
}

function runningAsScript(): boolean {
  if (process.argv[1] === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (runningAsScript()) {
  process.exit(runCli(hideBin(process.argv)));
}
