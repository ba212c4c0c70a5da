import { describe, expect, it } from "vitest";

import { decadeDomain, linearScale, logScale } from "../src/scale.js";

describe("log scale", () => {
  it("maps decades linearly", () => {
    const s = logScale([1e-3, 10], [0, 400]);
    expect(s(1e-3)).toBeCloseTo(0);
    expect(s(10)).toBeCloseTo(400);
    expect(s(0.1)).toBeCloseTo(200);
  });

  it("emits decade ticks with compact labels", () => {
    const s = logScale([1e-3, 10], [0, 1]);
    expect(s.ticks().map((t) => t.label)).toEqual(["1e-3", "1e-2", "1e-1", "1", "10"]);
    expect(s.minorTicks()).toContain(2e-3);
    expect(s.minorTicks()).not.toContain(2e-4);
  });

  it("rejects non-positive domains", () => {
    expect(() => logScale([0, 1], [0, 1])).toThrow();
    expect(() => logScale([2, 1], [0, 1])).toThrow();
  });
});

describe("linear scale", () => {
  it("maps and ticks", () => {
    const s = linearScale([0, 10], [0, 100]);
    expect(s(5)).toBeCloseTo(50);
    expect(s.ticks().length).toBeGreaterThan(2);
  });
});

describe("decadeDomain", () => {
  it("pads to full decades and ignores non-positive values", () => {
    const [lo, hi] = decadeDomain([[0.03, 0.7], [-1, 0, 4]]);
    expect(lo).toBeCloseTo(0.01);
    expect(hi).toBeCloseTo(10);
  });

  it("throws without positive data", () => {
    expect(() => decadeDomain([[0, -2]])).toThrow();
  });
});
