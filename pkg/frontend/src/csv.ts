/**
 * Minimal RFC-4180 CSV reader for cqedsim sweep files.
 *
 * Numeric columns are parsed to Float64Array ("NaN" literals included);
 * non-numeric columns (the error markers) stay as strings.
 */

import * as fs from "node:fs";

export interface SweepTable {
  header: string[];
  /** numeric columns by name */
  columns: Map<string, Float64Array>;
  /** string columns by name (e.g. "error") */
  text: Map<string, string[]>;
  rows: number;
}

/** Split one CSV record, honoring double-quoted fields. */
export function splitRecord(line: string): string[] {
  const fields: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      fields.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  fields.push(cur);
  return fields;
}

const NUMBER_RE = /^[+-]?(\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?|NaN|nan|[iI]nf(inity)?)$/;

function isNumeric(cell: string): boolean {
  return cell !== "" && NUMBER_RE.test(cell.trim());
}

export function parseCsv(textContent: string): SweepTable {
  const lines = textContent.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = splitRecord(lines[0]);
  const rows = lines.length - 1;
  const cells: string[][] = lines.slice(1).map(splitRecord);
  for (const [i, record] of cells.entries()) {
    if (record.length !== header.length) {
      throw new Error(
        `row ${i + 2}: ${record.length} fields, header has ${header.length}`,
      );
    }
  }

  const columns = new Map<string, Float64Array>();
  const text = new Map<string, string[]>();
  header.forEach((name, j) => {
    const raw = cells.map((r) => r[j]);
    const numeric = raw.every((c) => c === "" || isNumeric(c));
    if (numeric && raw.some((c) => c !== "")) {
      const parsed = new Float64Array(rows);
      raw.forEach((c, i) => {
        parsed[i] = c === "" ? NaN : Number(c);
      });
      columns.set(name, parsed);
    } else {
      text.set(name, raw);
    }
  });
  return { header, columns, text, rows };
}

export function readCsv(path: string): SweepTable {
  return parseCsv(fs.readFileSync(path, "utf8"));
}
