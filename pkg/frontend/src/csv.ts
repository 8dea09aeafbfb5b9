/** Minimal RFC 4180 CSV reader used only to display the imported table and
 * feed click-to-copy. The raw CSV text itself is what gets sent to the
 * service, which performs its own authoritative parsing and type inference. */

import type { Cell, ColumnType, TableData } from "./types.js";

/** Split CSV text into records of fields, honoring quotes and CRLF. */
export function splitCsv(text: string): string[][] {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  const endRecord = () => {
    record.push(field);
    records.push(record);
    field = "";
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"' && field === "") {
      inQuotes = true;
      i += 1;
      continue;
    }
    if (ch === ",") {
      record.push(field);
      field = "";
      i += 1;
      continue;
    }
    if (ch === "\r" && text[i + 1] === "\n") {
      endRecord();
      i += 2;
      continue;
    }
    if (ch === "\n") {
      endRecord();
      i += 1;
      continue;
    }
    field += ch;
    i += 1;
  }
  if (inQuotes) {
    throw new Error("unterminated quoted field");
  }
  if (field !== "" || record.length > 0) {
    endRecord();
  }
  return records;
}

const NUMBER_RE = /^-?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;
const DATE_RE = /^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2})?)?$/;

function inferType(values: string[]): ColumnType {
  const present = values.filter((v) => v !== "");
  if (present.length === 0) {
    return "nominal";
  }
  if (present.every((v) => NUMBER_RE.test(v))) {
    return "quantitative";
  }
  if (present.every((v) => DATE_RE.test(v))) {
    return "temporal";
  }
  return "nominal";
}

/** Parse CSV text into a display table. Throws on ragged or empty input. */
export function parseCsv(text: string): TableData {
  const records = splitCsv(text);
  if (records.length < 2) {
    throw new Error("need a header row and at least one data row");
  }
  const header = records[0];
  const width = header.length;
  for (let r = 1; r < records.length; r++) {
    if (records[r].length !== width) {
      throw new Error(`row ${r + 1} has ${records[r].length} fields, expected ${width}`);
    }
  }
  const body = records.slice(1);
  const columns = header.map((name, c) => ({
    name,
    type: inferType(body.map((row) => row[c])),
  }));
  const rows: Cell[][] = body.map((row) =>
    row.map((raw, c): Cell => {
      if (raw === "") {
        return null;
      }
      if (columns[c].type === "quantitative") {
        return Number(raw);
      }
      return raw;
    }),
  );
  return { columns, rows };
}

/** Render a cell the way the editor expects values to be typed. */
export function formatCell(cell: Cell): string {
  if (cell === null) {
    return "";
  }
  if (typeof cell === "number" && Number.isInteger(cell)) {
    return String(cell);
  }
  return String(cell);
}
