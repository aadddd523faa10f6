/**
 * CSV reading for the simulator's result files.
 *
 * The files are plain comma-separated text without quoting (the producer
 * never emits commas inside fields), one header line, LF or CRLF endings.
 */

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, context: string) {
    super(`missing required column "${column}" in ${context}`);
    this.column = column;
  }
}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV input");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, index) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `row ${index + 1} has ${cells.length} fields, header has ${header.length}`,
      );
    }
    return cells;
  });
  return { header, rows };
}

/** Throw a SchemaError naming the first missing column. */
export function requireColumns(table: Table, columns: string[], context: string): void {
  for (const column of columns) {
    if (!table.header.includes(column)) {
      throw new SchemaError(column, context);
    }
  }
}

export function column(table: Table, name: string): string[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new SchemaError(name, "table");
  }
  return table.rows.map((row) => row[index]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((cell, index) => {
    const value = Number(cell);
    if (!Number.isFinite(value)) {
      throw new Error(`column "${name}", row ${index + 1}: not a finite number: "${cell}"`);
    }
    return value;
  });
}

export function mean(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}

/** Sample standard deviation (0 for fewer than two values). */
export function sampleStd(values: number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  const ss = values.reduce((acc, v) => acc + (v - m) * (v - m), 0);
  return Math.sqrt(ss / (values.length - 1));
}

/** Stable group-by: keys appear in first-seen order. */
export function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = groups.get(k);
    if (bucket) {
      bucket.push(item);
    } else {
      groups.set(k, [item]);
    }
  }
  return groups;
}
