#!/usr/bin/env node
/**
 * paretots-plot: render experiment outputs to SVG.
 *
 *   paretots-plot plot-hv --inputs DIR [DIR...] --labels L [L...] --out FIG
 *   paretots-plot plot-pareto --archive CSV [--all CSV] --out FIG
 *
 * `--inputs` are results directories containing repNN_history.csv files.
 * The output file is FIG.svg (an .svg suffix on --out is kept as-is).
 */

import { writeFileSync } from "node:fs";

import { readArchive, readHistoryDir } from "./csv.js";
import { renderHvPlot } from "./hvplot.js";
import { renderParetoPlot } from "./paretoplot.js";
import { aggregate } from "./stats.js";

interface Args {
  positional: string[];
  lists: Map<string, string[]>;
}

function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  const lists = new Map<string, string[]>();
  let current: string[] | null = null;
  for (const a of argv) {
    if (a.startsWith("--")) {
      current = [];
      lists.set(a.slice(2), current);
    } else if (current !== null) {
      current.push(a);
    } else {
      positional.push(a);
    }
  }
  return { positional, lists };
}

function required(args: Args, name: string): string[] {
  const v = args.lists.get(name);
  if (!v || v.length === 0) throw new Error(`missing required option --${name}`);
  return v;
}

function outPath(args: Args): string {
  const out = required(args, "out")[0];
  return out.endsWith(".svg") ? out : `${out}.svg`;
}

function cmdPlotHv(args: Args): string {
  const inputs = required(args, "inputs");
  const labels = args.lists.get("labels") ?? inputs;
  if (labels.length !== inputs.length) {
    throw new Error(`got ${inputs.length} inputs but ${labels.length} labels`);
  }
  const series = inputs.map((dir, i) => ({
    label: labels[i],
    curve: aggregate(readHistoryDir(dir)),
  }));
  const path = outPath(args);
  writeFileSync(path, renderHvPlot(series));
  return path;
}

function cmdPlotPareto(args: Args): string {
  const archive = readArchive(required(args, "archive")[0]);
  const allOpt = args.lists.get("all");
  const all = allOpt && allOpt.length > 0 ? readArchive(allOpt[0]) : undefined;
  const path = outPath(args);
  writeFileSync(path, renderParetoPlot(archive, all));
  return path;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const cmd = args.positional[0];
  try {
    if (cmd === "plot-hv") {
      console.log(`wrote ${cmdPlotHv(args)}`);
    } else if (cmd === "plot-pareto") {
      console.log(`wrote ${cmdPlotPareto(args)}`);
    } else {
      console.error("usage: paretots-plot plot-hv|plot-pareto [options]");
      return 2;
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
