/**
 * Small deterministic SVG builder. All coordinates are rounded to two
 * decimals so output files are stable across platforms and suitable for
 * golden-file comparison.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 24, right: 16, bottom: 44, left: 64 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

/** Round-numbered tick positions covering the domain (at most `count`+2). */
export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function polyline(points: Array<[number, number]>): string {
  return points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`).join("");
}

/** Closed band between an upper and a (reversed) lower boundary. */
export function bandPath(upper: Array<[number, number]>, lower: Array<[number, number]>): string {
  return polyline(upper) + polyline(lower.slice().reverse()).replace(/^M/, "L") + "Z";
}

export function axes(x: Scale, y: Scale, xLabel: string, yLabel: string): string {
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(`<line x1="${left}" y1="${bottom}" x2="${right}" y2="${bottom}" stroke="#333"/>`);
  parts.push(`<line x1="${left}" y1="${top}" x2="${left}" y2="${bottom}" stroke="#333"/>`);
  for (const t of ticks(x.domain)) {
    const px = fmt(x(t));
    parts.push(`<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="#333"/>`);
    parts.push(`<text x="${px}" y="${bottom + 18}" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(y.domain)) {
    const py = fmt(y(t));
    parts.push(`<line x1="${left - 5}" y1="${py}" x2="${left}" y2="${py}" stroke="#333"/>`);
    parts.push(`<text x="${left - 8}" y="${py}" font-size="11" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`);
  }
  parts.push(`<text x="${fmt((left + right) / 2)}" y="${HEIGHT - 8}" font-size="12" text-anchor="middle">${xLabel}</text>`);
  parts.push(`<text x="14" y="${fmt((top + bottom) / 2)}" font-size="12" text-anchor="middle" transform="rotate(-90 14 ${fmt((top + bottom) / 2)})">${yLabel}</text>`);
  return parts.join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    body +
    `\n</svg>\n`
  );
}
