import type { Curve } from "./stats.js";
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  WIDTH,
  axes,
  bandPath,
  document,
  fmt,
  linearScale,
  polyline,
} from "./svg.js";

export interface LabeledCurve {
  label: string;
  curve: Curve;
}

/** Hypervolume convergence plot: one mean line plus a +-1 std band per series. */
export function renderHvPlot(series: LabeledCurve[]): string {
  if (series.length === 0) throw new Error("no series to plot");
  let eMin = Infinity;
  let eMax = -Infinity;
  let hMin = Infinity;
  let hMax = -Infinity;
  for (const { curve } of series) {
    for (let i = 0; i < curve.evals.length; i++) {
      eMin = Math.min(eMin, curve.evals[i]);
      eMax = Math.max(eMax, curve.evals[i]);
      hMin = Math.min(hMin, curve.mean[i] - curve.std[i]);
      hMax = Math.max(hMax, curve.mean[i] + curve.std[i]);
    }
  }
  const pad = (hMax - hMin || 1) * 0.05;
  const x = linearScale([eMin, eMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([hMin - pad, hMax + pad], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [axes(x, y, "evaluations", "hypervolume")];
  series.forEach(({ curve }, s) => {
    const color = PALETTE[s % PALETTE.length];
    const upper = curve.evals.map((e, i): [number, number] => [x(e), y(curve.mean[i] + curve.std[i])]);
    const lower = curve.evals.map((e, i): [number, number] => [x(e), y(curve.mean[i] - curve.std[i])]);
    const line = curve.evals.map((e, i): [number, number] => [x(e), y(curve.mean[i])]);
    parts.push(`<path d="${bandPath(upper, lower)}" fill="${color}" fill-opacity="0.15" stroke="none"/>`);
    parts.push(`<path d="${polyline(line)}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
  });
  series.forEach(({ label }, s) => {
    const color = PALETTE[s % PALETTE.length];
    const ly = MARGIN.top + 14 + 16 * s;
    const lx = WIDTH - MARGIN.right - 130;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="1.5"/>`);
    parts.push(`<text x="${lx + 28}" y="${fmt(ly + 4)}" font-size="12">${label}</text>`);
  });
  return document(parts.join("\n"));
}
