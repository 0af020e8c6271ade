import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import {
  RELAX_COLUMNS,
  SERIES_COLUMNS,
  SchemaError,
  fitLogSlope,
  numericColumn,
  readCsv,
  readFieldTable,
  readManifest,
} from "../src/data";

const FIXTURES = path.join(__dirname, "..", "..", "fixtures");

function tmpFile(content: string): string {
  const file = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "aggfig-")), "t.csv");
  fs.writeFileSync(file, content);
  return file;
}

test("reads a series fixture with the documented schema", () => {
  const table = readCsv(path.join(FIXTURES, "run", "series.csv"), SERIES_COLUMNS);
  assert.deepEqual(table.columns, [...SERIES_COLUMNS]);
  assert.ok(table.rows.length > 3);
  const t = numericColumn(table, "t");
  assert.equal(t[0], 0);
  for (let i = 1; i < t.length; i++) {
    assert.ok(t[i] > t[i - 1], "times strictly increasing");
  }
});

test("refuses a schema-mismatched file", () => {
  const bad = tmpFile("a,b,c\n1,2,3\n");
  assert.throws(() => readCsv(bad, SERIES_COLUMNS), SchemaError);
});

test("refuses ragged rows", () => {
  const bad = tmpFile(SERIES_COLUMNS.join(",") + "\n1,2\n");
  assert.throws(() => readCsv(bad, SERIES_COLUMNS), SchemaError);
});

test("reads the relax fixture", () => {
  const table = readCsv(path.join(FIXTURES, "relax", "relax.csv"), RELAX_COLUMNS);
  const ratios = numericColumn(table, "ratio");
  for (const r of ratios) {
    assert.ok(r > 0 && r < 1);
  }
});

test("manifest parsing", () => {
  const manifest = readManifest(path.join(FIXTURES, "transport", "manifest.txt"));
  assert.equal(manifest.get("dealias_rule"), "2/3");
  assert.ok(manifest.has("fitted_log_slope"));
});

test("field table reader", () => {
  const field = readFieldTable(path.join(FIXTURES, "terminal", "terminal.field"));
  assert.equal(field.dim, 2);
  assert.equal(field.n, 64);
  assert.equal(field.components.length, 1);
  assert.equal(field.components[0].length, 64 * 64);
});

test("slope fit on a synthetic exact exponential", () => {
  const t = Array.from({ length: 50 }, (_, i) => 0.02 * i);
  const values = t.map((ti) => 3.0 * Math.exp(1.7 * ti));
  const slope = fitLogSlope(t, values);
  assert.ok(Math.abs(slope - 1.7) < 1e-12);
});

test("slope fit matches the harness-fitted value to 1e-9", () => {
  const manifest = readManifest(path.join(FIXTURES, "transport", "manifest.txt"));
  const expected = Number(manifest.get("fitted_log_slope"));
  const table = readCsv(path.join(FIXTURES, "transport", "series.csv"), SERIES_COLUMNS);
  const slope = fitLogSlope(numericColumn(table, "t"), numericColumn(table, "hgamma2"));
  assert.ok(Math.abs(slope - expected) < 1e-9, `slope ${slope} vs ${expected}`);
});
