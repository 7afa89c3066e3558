import { describe, expect, it } from "vitest";

import { bandPath, fmt, linearScale, polyline, ticks } from "../src/svg.js";

describe("fmt", () => {
  it("rounds to two decimals and normalizes negative zero", () => {
    expect(fmt(1.23456)).toBe("1.23");
    expect(fmt(1.235)).toBe("1.24");
    expect(fmt(-0.001)).toBe("0");
    expect(fmt(5)).toBe("5");
  });
});

describe("linearScale", () => {
  it("maps domain endpoints to range endpoints", () => {
    const s = linearScale([0, 10], [100, 200]);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(200);
    expect(s(5)).toBe(150);
  });

  it("tolerates a degenerate domain", () => {
    const s = linearScale([3, 3], [0, 1]);
    expect(Number.isFinite(s(3))).toBe(true);
  });
});

describe("ticks", () => {
  it("produces round-numbered ticks inside the domain", () => {
    const t = ticks([0, 100]);
    expect(t[0]).toBe(0);
    expect(t[t.length - 1]).toBe(100);
    expect(t).toEqual([0, 20, 40, 60, 80, 100]);
  });

  it("emits exact zero rather than a rounding residue", () => {
    for (const t of ticks([-1, 1])) {
      if (Math.abs(t) < 1e-6) expect(t).toBe(0);
    }
  });
});

describe("paths", () => {
  it("builds a move-then-line polyline", () => {
    expect(polyline([[0, 0], [1.005, 2]])).toBe("M0,0L1,2");
  });

  it("closes the band through the reversed lower boundary", () => {
    const d = bandPath([[0, 0], [1, 0]], [[0, 1], [1, 1]]);
    expect(d).toBe("M0,0L1,0L1,1L0,1Z");
  });
});
