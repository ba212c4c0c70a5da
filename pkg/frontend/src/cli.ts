#!/usr/bin/env node
/**
 * Render a figure panel from a leveldot harness run directory.
 *
 *   leveldot-render render --panel <a|b|c|d|e> --in <run dir> --out <file.svg>
 *
 * Exit codes: 0 success, 1 rendering/schema failure, 2 usage error.
 */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { SchemaError } from "./csv.js";
import { PANELS, renderPanel, type PanelId } from "./panels.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        panel: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  const [command] = parsed.positionals;
  const { panel, in: inDir, out } = parsed.values;
  if (command !== "render" || !panel || !inDir || !out) {
    console.error("usage: leveldot-render render --panel <a|b|c|d|e> --in <dir> --out <file.svg>");
    return 2;
  }
  if (!(PANELS as readonly string[]).includes(panel)) {
    console.error(`unknown panel '${panel}'; expected one of ${PANELS.join(", ")}`);
    return 2;
  }
  try {
    const svg = renderPanel(panel as PanelId, inDir);
    writeFileSync(out, svg, "utf-8");
    console.log(`${out}: panel ${panel} rendered from ${inDir}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    console.error(`render failed: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
