import type { ArchiveRow } from "./csv.js";
import { nondominatedMask } from "./pareto.js";
import { HEIGHT, MARGIN, WIDTH, axes, document, fmt, linearScale } from "./svg.js";

const FRONT_COLOR = "#d62728";
const DOMINATED_COLOR = "#9aa0a6";

/**
 * Objective-space scatter for a two-objective problem. When `all` is given
 * its points are drawn underneath, colored by a freshly computed dominance
 * mask; the archive points are drawn on top.
 */
export function renderParetoPlot(archive: ArchiveRow[], all?: ArchiveRow[]): string {
  if (archive.length === 0) throw new Error("empty archive");
  const K = archive[0].y.length;
  if (K !== 2) throw new Error(`scatter plot needs exactly 2 objectives, got ${K}`);
  const pts = (all ?? []).concat(archive);
  const f0 = pts.map((p) => p.y[0]);
  const f1 = pts.map((p) => p.y[1]);
  const padX = (Math.max(...f0) - Math.min(...f0) || 1) * 0.05;
  const padY = (Math.max(...f1) - Math.min(...f1) || 1) * 0.05;
  const x = linearScale([Math.min(...f0) - padX, Math.max(...f0) + padX],
                        [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([Math.min(...f1) - padY, Math.max(...f1) + padY],
                        [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [axes(x, y, "objective 1", "objective 2")];
  if (all && all.length > 0) {
    const mask = nondominatedMask(all.map((p) => p.y));
    all.forEach((p, i) => {
      const color = mask[i] ? FRONT_COLOR : DOMINATED_COLOR;
      parts.push(`<circle cx="${fmt(x(p.y[0]))}" cy="${fmt(y(p.y[1]))}" r="2.5" ` +
                 `fill="${color}" fill-opacity="0.5"/>`);
    });
  }
  for (const p of archive) {
    parts.push(`<circle cx="${fmt(x(p.y[0]))}" cy="${fmt(y(p.y[1]))}" r="3.5" ` +
               `fill="${FRONT_COLOR}" stroke="#7a1516" stroke-width="0.8"/>`);
  }
  const lx = WIDTH - MARGIN.right - 150;
  parts.push(`<circle cx="${lx}" cy="${MARGIN.top + 12}" r="3.5" fill="${FRONT_COLOR}"/>`);
  parts.push(`<text x="${lx + 10}" y="${MARGIN.top + 16}" font-size="12">Pareto archive</text>`);
  if (all && all.length > 0) {
    parts.push(`<circle cx="${lx}" cy="${MARGIN.top + 28}" r="2.5" fill="${DOMINATED_COLOR}"/>`);
    parts.push(`<text x="${lx + 10}" y="${MARGIN.top + 32}" font-size="12">dominated</text>`);
  }
  return document(parts.join("\n"));
}
