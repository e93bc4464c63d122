/**
 * Plot specification: which CSV, which columns, what kind of figure.
 * Shipped spec files live under specs/; paths are resolved relative to
 * the spec file location.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { SweepTable } from "./csv";

export interface SeriesSpec {
  column: string;
  label: string;
}

export interface PlotSpec {
  kind: "lines" | "heatmap";
  input_csv: string;
  output: string;
  title?: string;
  x: string;
  x_label?: string;
  y_label?: string;
  /** lines: one entry per overlaid curve */
  series?: SeriesSpec[];
  /** heatmap: second axis column and the observable column */
  y?: string;
  value?: string;
  /** heatmap color range; populations use [0, 1] */
  value_range?: [number, number];
  /** lines: optional y-axis clip (data outside is not drawn) */
  y_range?: [number, number];
}

export class SpecError extends Error {}

export function loadSpec(specPath: string): PlotSpec {
  const raw = JSON.parse(fs.readFileSync(specPath, "utf8"));
  if (raw.kind !== "lines" && raw.kind !== "heatmap") {
    throw new SpecError(`spec ${specPath}: kind must be "lines" or "heatmap"`);
  }
  for (const key of ["input_csv", "output", "x"]) {
    if (typeof raw[key] !== "string") {
      throw new SpecError(`spec ${specPath}: missing string field "${key}"`);
    }
  }
  if (raw.kind === "lines") {
    if (!Array.isArray(raw.series) || raw.series.length === 0) {
      throw new SpecError(`spec ${specPath}: lines figure needs "series"`);
    }
  } else {
    if (typeof raw.y !== "string" || typeof raw.value !== "string") {
      throw new SpecError(`spec ${specPath}: heatmap needs "y" and "value"`);
    }
  }
  return raw as PlotSpec;
}

export function resolveInput(specPath: string, spec: PlotSpec): string {
  return path.resolve(path.dirname(specPath), spec.input_csv);
}

export function resolveOutput(
  specPath: string,
  spec: PlotSpec,
  outDir?: string,
): string {
  if (outDir !== undefined) {
    return path.resolve(outDir, path.basename(spec.output));
  }
  return path.resolve(path.dirname(specPath), spec.output);
}

/** Every referenced column must exist in the CSV header. */
export function checkColumns(spec: PlotSpec, table: SweepTable): void {
  const wanted: string[] = [spec.x];
  if (spec.kind === "lines") {
    wanted.push(...(spec.series ?? []).map((s) => s.column));
  } else {
    wanted.push(spec.y as string, spec.value as string);
  }
  for (const name of wanted) {
    if (!table.columns.has(name)) {
      throw new SpecError(
        `column "${name}" not found in CSV (available: ` +
          `${[...table.columns.keys()].join(", ")})`,
      );
    }
  }
}
