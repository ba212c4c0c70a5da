/**
 * Reader for the CSV artifacts written by the leveldot harness:
 * `# key: value` comment headers, one named column row, full-precision
 * decimal bodies.
 */

import { readFileSync } from "node:fs";

export interface CsvTable {
  /** header metadata from `# key: value` lines */
  meta: Record<string, string>;
  columns: string[];
  /** column name -> numeric values (non-numeric columns are skipped) */
  numeric: Record<string, number[]>;
  /** column name -> raw string values */
  raw: Record<string, string[]>;
  rows: number;
}

export class SchemaError extends Error {}

export function parseCsv(text: string, path = "<memory>"): CsvTable {
  const meta: Record<string, string> = {};
  let columns: string[] | null = null;
  const body: string[][] = [];

  for (const line of text.split("\n")) {
    if (line.startsWith("#")) {
      const stripped = line.slice(1).trim();
      const sep = stripped.indexOf(": ");
      if (sep > 0) meta[stripped.slice(0, sep)] = stripped.slice(sep + 2);
      continue;
    }
    if (line.trim() === "") continue;
    const cells = line.split(",");
    if (columns === null) {
      columns = cells;
    } else {
      if (cells.length !== columns.length) {
        throw new SchemaError(`${path}: row with ${cells.length} cells, expected ${columns.length}`);
      }
      body.push(cells);
    }
  }
  if (columns === null) throw new SchemaError(`${path}: no column header found`);

  const raw: Record<string, string[]> = {};
  const numeric: Record<string, number[]> = {};
  columns.forEach((name, j) => {
    const col = body.map((row) => row[j] as string);
    raw[name] = col;
    const parsed = col.map(Number);
    if (parsed.every((v) => Number.isFinite(v))) numeric[name] = parsed;
  });
  return { meta, columns, numeric, raw, rows: body.length };
}

export function readCsv(path: string): CsvTable {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

/** Pull named numeric columns, failing loudly when any is absent. */
export function requireColumns(table: CsvTable, path: string, names: string[]): number[][] {
  return names.map((name) => {
    const col = table.numeric[name];
    if (!col) {
      throw new SchemaError(
        `${path}: missing numeric column '${name}' (found: ${table.columns.join(", ")})`,
      );
    }
    return col;
  });
}
