/**
 * Minimal CSV reader for the experiment/evaluation files.
 *
 * Files are plain comma-separated text with a single header row; values are
 * decimal literals except for string tags (predictor names, true/false).
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length < 2) {
    throw new SchemaError("CSV needs a header and at least one row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`row ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
    }
    rows.push(parts);
  }
  return { header, rows };
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.header.includes(name)) {
      throw new SchemaError(`missing column '${name}' (have: ${table.header.join(",")})`);
    }
  }
}

export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((v, i) => {
    const x = Number(v);
    if (!Number.isFinite(x)) {
      throw new SchemaError(`column '${name}' row ${i + 2}: not a finite number: '${v}'`);
    }
    return x;
  });
}

export function median(values: number[]): number {
  if (values.length === 0) {
    throw new SchemaError("median of empty set");
  }
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}
