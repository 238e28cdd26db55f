/** Minimal RFC-4180 reader for the simulator's result files. */

export interface Table {
  columns: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export class MissingColumnError extends CsvError {
  constructor(column: string, source: string, available: string[]) {
    super(`missing column "${column}" in ${source} (have: ${available.join(", ")})`);
  }
}

export class EmptyCsvError extends CsvError {
  constructor(source: string, detail: string) {
    super(`${source}: ${detail}`);
  }
}

/** Parse CSV text (CRLF or LF, quoted fields with doubled quotes). */
export function parseCsv(text: string): Table {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let quoted = false;
  let i = 0;
  const push = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    push();
    records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (quoted) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"' && field === "") {
      quoted = true;
      i += 1;
    } else if (ch === ",") {
      push();
      i += 1;
    } else if (ch === "\r" && text[i + 1] === "\n") {
      endRecord();
      i += 2;
    } else if (ch === "\n") {
      endRecord();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field !== "" || record.length > 0) endRecord();

  const header = records[0];
  if (!header) return { columns: [], rows: [] };
  return { columns: header, rows: records.slice(1) };
}

/** Index of a named column, or a MissingColumnError that spells out what exists. */
export function columnIndex(table: Table, column: string, source: string): number {
  const idx = table.columns.indexOf(column);
  if (idx < 0) throw new MissingColumnError(column, source, table.columns);
  return idx;
}

/** Rows whose cells match every (column, value) pair. */
export function filterRows(
  table: Table,
  filter: Record<string, string>,
  source: string,
): string[][] {
  const checks = Object.entries(filter).map(
    ([column, value]) => [columnIndex(table, column, source), value] as const,
  );
  return table.rows.filter((row) => checks.every(([idx, value]) => row[idx] === value));
}
