import type { HistoryRow } from "./csv.js";

export interface Curve {
  evals: number[];
  mean: number[];
  std: number[];
}

/**
 * Aggregate per-rep hypervolume trajectories into mean and population std
 * per iteration. Repetitions are aligned on iteration index; the curve is
 * truncated to the shortest repetition.
 */
export function aggregate(reps: HistoryRow[][]): Curve {
  if (reps.length === 0) throw new Error("no repetitions to aggregate");
  const n = Math.min(...reps.map((r) => r.length));
  const evals: number[] = [];
  const mean: number[] = [];
  const std: number[] = [];
  for (let t = 0; t < n; t++) {
    const e = reps[0][t].evals;
    for (const r of reps) {
      if (r[t].evals !== e) {
        throw new Error(`repetitions disagree on evaluation counts at step ${t}`);
      }
    }
    const hvs = reps.map((r) => r[t].hv);
    const m = hvs.reduce((a, b) => a + b, 0) / hvs.length;
    const v = hvs.reduce((a, b) => a + (b - m) * (b - m), 0) / hvs.length;
    evals.push(e);
    mean.push(m);
    std.push(Math.sqrt(v));
  }
  return { evals, mean, std };
}
