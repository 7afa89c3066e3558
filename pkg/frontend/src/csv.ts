import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

/** One row of a repNN_history.csv file. */
export interface HistoryRow {
  rep: number;
  iter: number;
  evals: number;
  hv: number;
  wallclock_s: number;
}

/** One point of an archive / all-points CSV: design coords then objectives. */
export interface ArchiveRow {
  x: number[];
  y: number[];
}

/** Minimal CSV parser for the harness outputs (no quoting, comma separated). */
export function parseCsv(text: string): { header: string[]; rows: string[][] } {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty CSV");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  for (const r of rows) {
    if (r.length !== header.length) {
      throw new Error(`ragged CSV row: expected ${header.length} fields, got ${r.length}`);
    }
  }
  return { header, rows };
}

function numberField(row: string[], header: string[], name: string): number {
  const i = header.indexOf(name);
  if (i < 0) throw new Error(`missing CSV column '${name}'`);
  const v = Number(row[i]);
  if (Number.isNaN(v)) throw new Error(`non-numeric value '${row[i]}' in column '${name}'`);
  return v;
}

export function readHistory(path: string): HistoryRow[] {
  const { header, rows } = parseCsv(readFileSync(path, "utf8"));
  return rows.map((r) => ({
    rep: numberField(r, header, "rep"),
    iter: numberField(r, header, "iter"),
    evals: numberField(r, header, "evals"),
    hv: numberField(r, header, "hv"),
    wallclock_s: numberField(r, header, "wallclock_s"),
  }));
}

/** All repNN_history.csv files found in a results directory, sorted by rep. */
export function readHistoryDir(dir: string): HistoryRow[][] {
  const files = readdirSync(dir)
    .filter((f) => /^rep\d+_history\.csv$/.test(f))
    .sort();
  if (files.length === 0) throw new Error(`no repNN_history.csv files in ${dir}`);
  return files.map((f) => readHistory(join(dir, f)));
}

/** Archive CSVs have x0..x{d-1} then y0..y{K-1} columns. */
export function readArchive(path: string): ArchiveRow[] {
  const { header, rows } = parseCsv(readFileSync(path, "utf8"));
  const xCols = header.filter((h) => /^x\d+$/.test(h));
  const yCols = header.filter((h) => /^y\d+$/.test(h));
  if (yCols.length === 0) throw new Error(`no y columns in ${path}`);
  return rows.map((r) => ({
    x: xCols.map((c) => numberField(r, header, c)),
    y: yCols.map((c) => numberField(r, header, c)),
  }));
}
