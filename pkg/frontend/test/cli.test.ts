import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");
const scratch = mkdtempSync(join(tmpdir(), "leveldot-cli-"));

afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function run(argv: string[]): number {
  const log = vi.spyOn(console, "log").mockImplementation(() => {});
  const err = vi.spyOn(console, "error").mockImplementation(() => {});
  try {
    return main(argv);
  } finally {
    log.mockRestore();
    err.mockRestore();
  }
}

describe("render CLI", () => {
  it("renders a panel to the requested file", () => {
    const out = join(scratch, "panel-a.svg");
    expect(run(["render", "--panel", "a", "--in", join(FIXTURES, "curve"), "--out", out])).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toContain("</svg>");
  });

  it("renders identical bytes on repeated invocations", () => {
    const out1 = join(scratch, "d1.svg");
    const out2 = join(scratch, "d2.svg");
    run(["render", "--panel", "d", "--in", join(FIXTURES, "sweep"), "--out", out1]);
    run(["render", "--panel", "d", "--in", join(FIXTURES, "sweep"), "--out", out2]);
    expect(readFileSync(out1)).toEqual(readFileSync(out2));
  });

  it("rejects bad usage with exit code 2", () => {
    expect(run(["render", "--panel", "a"])).toBe(2);
    expect(run(["paint", "--panel", "a", "--in", "x", "--out", "y"])).toBe(2);
    expect(run(["render", "--panel", "z", "--in", "x", "--out", "y"])).toBe(2);
  });

  it("reports schema problems with exit code 1", () => {
    const out = join(scratch, "bad.svg");
    expect(run(["render", "--panel", "e", "--in", join(FIXTURES, "curve"), "--out", out])).toBe(1);
  });
});
