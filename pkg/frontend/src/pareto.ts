/**
 * Pareto dominance utilities (minimization), mirroring the conventions of
 * the experiment library: a dominates b when a <= b everywhere and a < b
 * somewhere; duplicated points are all kept.
 */

export function dominates(a: number[], b: number[]): boolean {
  if (a.length !== b.length) throw new Error("objective length mismatch");
  let strict = false;
  for (let k = 0; k < a.length; k++) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

/** Boolean mask: true where the row is nondominated within the set. */
export function nondominatedMask(Y: number[][]): boolean[] {
  const n = Y.length;
  const mask = new Array<boolean>(n).fill(true);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      if (i !== j && dominates(Y[j], Y[i])) {
        mask[i] = false;
        break;
      }
    }
  }
  return mask;
}
