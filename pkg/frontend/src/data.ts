/** Readers for the harness artifacts: series/summary/relax CSVs, manifests,
 *  and scalar field tables. Schema-mismatched files are refused. */

import * as fs from "fs";

export const SERIES_COLUMNS = [
  "t", "mean", "min", "l2_dist", "hgamma2", "moment2",
  "annular_mass", "crit_r2", "crit_r4", "dt", "tail_frac",
] as const;

export const SUMMARY_COLUMNS = [
  "A", "outcome", "t_star_or_horizon", "terminal_l2_dist", "max_l2_dist",
] as const;

export const RELAX_COLUMNS = ["A", "tau", "ratio", "l2_initial", "l2_final"] as const;

export interface Table {
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function readCsv(path: string, expected: readonly string[]): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const columns = lines[0].split(",");
  if (columns.length !== expected.length || !expected.every((c, i) => columns[i] === c)) {
    throw new SchemaError(
      `${path}: header [${columns.join(",")}] does not match the expected ` +
      `schema [${expected.join(",")}]`
    );
  }
  const rows = lines.slice(1).map((line) => line.split(","));
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaError(`${path}: ragged row with ${row.length} cells`);
    }
  }
  return { columns, rows };
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${name}`);
  }
  return table.rows.map((row) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`non-numeric cell in column ${name}: ${row[idx]}`);
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${name}`);
  }
  return table.rows.map((row) => row[idx]);
}

export function readManifest(path: string): Map<string, string> {
  const out = new Map<string, string>();
  const text = fs.readFileSync(path, "utf8");
  for (const line of text.split("\n")) {
    const sep = line.indexOf(" = ");
    if (sep > 0) {
      out.set(line.slice(0, sep).trim(), line.slice(sep + 3).trim());
    }
  }
  return out;
}

export interface FieldTable {
  dim: number;
  n: number;
  components: number[][];
}

export function readFieldTable(path: string): FieldTable {
  const lines = fs.readFileSync(path, "utf8").split("\n");
  if (lines[0] !== "aggflow-field v1") {
    throw new SchemaError(`${path}: not an aggflow field table`);
  }
  const header: Record<string, number> = {};
  for (let i = 1; i <= 3; i++) {
    const [key, value] = lines[i].split("=");
    header[key] = Number(value);
  }
  const { dim, n, components } = { dim: header["dim"], n: header["n"], components: header["components"] };
  const size = Math.pow(n, dim);
  const comps: number[][] = [];
  let pos = 4;
  for (let c = 0; c < components; c++) {
    const values = new Array<number>(size);
    for (let i = 0; i < size; i++) {
      values[i] = Number(lines[pos + i]);
      if (!Number.isFinite(values[i])) {
        throw new SchemaError(`${path}: bad value at line ${pos + i + 1}`);
      }
    }
    comps.push(values);
    pos += size;
  }
  return { dim, n, components: comps };
}

/** Least-squares slope of log(values) against t; matches the harness fit. */
export function fitLogSlope(t: number[], values: number[]): number {
  const n = t.length;
  let tbar = 0;
  let ybar = 0;
  const y = values.map(Math.log);
  for (let i = 0; i < n; i++) {
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= n;
  ybar /= n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (t[i] - tbar) * (y[i] - ybar);
    den += (t[i] - tbar) * (t[i] - tbar);
  }
  return num / den;
}
