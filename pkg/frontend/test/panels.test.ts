import { cpSync, mkdtempSync, rmSync, writeFileSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import { renderPanel } from "../src/panels.js";
import { FONT_STACK } from "../src/svg.js";

const FIXTURES = join(__dirname, "fixtures");
const tmp: string[] = [];

function scratchCopy(sub: string): string {
  const dir = mkdtempSync(join(tmpdir(), "leveldot-panels-"));
  tmp.push(dir);
  cpSync(join(FIXTURES, sub), dir, { recursive: true });
  return dir;
}

afterAll(() => {
  for (const dir of tmp) rmSync(dir, { recursive: true, force: true });
});

describe("panel rendering", () => {
  it("renders survival panels with theory overlays", () => {
    for (const panel of ["a", "b", "c"] as const) {
      const svg = renderPanel(panel, join(FIXTURES, "curve"));
      expect(svg).toContain("<svg");
      expect(svg).toContain(FONT_STACK);
      expect(svg).toContain("Monte Carlo");
      expect(svg).toContain("crossover formula");
      expect(svg).toContain("strong-coupling asymptote");
    }
  });

  it("renders the coupling sweep with closed-form overlays", () => {
    const svg = renderPanel("d", join(FIXTURES, "sweep"));
    expect(svg).toContain("circle");
    expect(svg).toContain("stationary formula");
    expect(svg).toContain("golden rule 1/gamma");
  });

  it("renders the three-class comparison", () => {
    const svg = renderPanel("e", join(FIXTURES, "classes"));
    for (const cls of ["U", "O", "S"]) {
      expect(svg).toContain(`class ${cls}`);
      expect(svg).toContain(`profile ${cls}`);
    }
  });

  it("is byte-for-byte reproducible", () => {
    for (const [panel, sub] of [["a", "curve"], ["d", "sweep"], ["e", "classes"]] as const) {
      const first = renderPanel(panel, join(FIXTURES, sub));
      const second = renderPanel(panel, join(FIXTURES, sub));
      expect(Buffer.from(first).equals(Buffer.from(second))).toBe(true);
    }
  });

  it("falls back to a data-only plot when overlays are absent", () => {
    const dir = scratchCopy("curve");
    rmSync(join(dir, "theory_crossover.csv"));
    rmSync(join(dir, "theory_strong_coupling.csv"));
    const svg = renderPanel("a", dir);
    expect(svg).toContain("Monte Carlo");
    expect(svg).not.toContain("crossover formula");
  });

  it("fails loudly when the data file is missing or malformed", () => {
    expect(() => renderPanel("a", join(FIXTURES, "sweep"))).toThrow(SchemaError);
    const dir = scratchCopy("curve");
    const target = join(dir, "survival_curve.csv");
    const body = readFileSync(target, "utf-8").replace("p_mean", "p_other");
    writeFileSync(target, body);
    expect(() => renderPanel("a", dir)).toThrow(/missing numeric column 'p_mean'/);
  });

  it("requires every class curve for the comparison panel", () => {
    const dir = scratchCopy("classes");
    rmSync(join(dir, "survival_S.csv"));
    expect(() => renderPanel("e", dir)).toThrow(/missing class curve/);
  });
});
