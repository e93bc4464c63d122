/**
 * Figure renderer CLI.
 *
 *   node dist/src/render.js --spec specs/fig1a.json [--out-dir DIR]
 *
 * Reads the plot spec, loads the referenced sweep CSV, validates that
 * every referenced column exists, and writes a standalone SVG. Exits
 * nonzero with a column diagnostic on schema mismatch. Rendering never
 * mutates inputs and re-rendering is byte-identical.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { readCsv } from "./csv";
import { renderHeatmap } from "./heatmap";
import { RenderSummary, renderLines } from "./lineplot";
import { SpecError, checkColumns, loadSpec, resolveInput, resolveOutput } from "./spec";

export function renderSpecFile(
  specPath: string,
  outDir?: string,
): { outPath: string; summary: RenderSummary } {
  const spec = loadSpec(specPath);
  const csvPath = resolveInput(specPath, spec);
  const table = readCsv(csvPath);
  checkColumns(spec, table);
  const { svg, summary } =
    spec.kind === "lines" ? renderLines(spec, table)
                          : renderHeatmap(spec, table);
  const outPath = resolveOutput(specPath, spec, outDir);
  fs.mkdirSync(path.dirname(outPath), { recursive: true });
  fs.writeFileSync(outPath, svg);
  return { outPath, summary };
}

function main(argv: string[]): number {
  const args = [...argv];
  let specPath: string | undefined;
  let outDir: string | undefined;
  while (args.length) {
    const flag = args.shift();
    if (flag === "--spec") specPath = args.shift();
    else if (flag === "--out-dir") outDir = args.shift();
    else {
      process.stderr.write(`unknown argument: ${flag}\n`);
      return 64;
    }
  }
  if (!specPath) {
    process.stderr.write(
      "usage: render --spec <spec.json> [--out-dir DIR]\n",
    );
    return 64;
  }
  try {
    const { outPath, summary } = renderSpecFile(specPath, outDir);
    process.stdout.write(
      `${JSON.stringify({ spec: specPath, out: outPath, ...summary })}\n`,
    );
    return 0;
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(
      `${err instanceof SpecError ? "spec error" : "error"}: ${msg}\n`,
    );
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
