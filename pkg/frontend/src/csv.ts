/** Parsing and validation of the simulator's sweep CSV files. */

export const EXPECTED_HEADER = [
  "sweep",
  "value",
  "method",
  "mean_rate",
  "std_rate",
  "trials",
  "fallbacks",
] as const;

export type SweepKind = "antennas" | "power" | "aoa";

export const SWEEP_KINDS: SweepKind[] = ["antennas", "power", "aoa"];

export interface SweepRow {
  sweep: SweepKind;
  value: number;
  method: string;
  meanRate: number;
  stdRate: number;
  trials: number;
  fallbacks: number;
}

export class CsvSchemaError extends Error {}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new CsvSchemaError(
      `line ${line}: column '${column}' is not numeric (got '${raw}')`,
    );
  }
  return value;
}

/** Parse CSV text against the sweep schema; errors name the offending column. */
export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new CsvSchemaError("empty file: missing header row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (let i = 0; i < EXPECTED_HEADER.length; i++) {
    if (header[i] !== EXPECTED_HEADER[i]) {
      throw new CsvSchemaError(
        `header column ${i + 1} should be '${EXPECTED_HEADER[i]}', got '${header[i] ?? ""}'`,
      );
    }
  }
  if (header.length !== EXPECTED_HEADER.length) {
    throw new CsvSchemaError(
      `header has ${header.length} columns, expected ${EXPECTED_HEADER.length}`,
    );
  }

  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== EXPECTED_HEADER.length) {
      throw new CsvSchemaError(
        `line ${i + 1}: expected ${EXPECTED_HEADER.length} fields, got ${parts.length}`,
      );
    }
    const sweep = parts[0].trim();
    if (!SWEEP_KINDS.includes(sweep as SweepKind)) {
      throw new CsvSchemaError(
        `line ${i + 1}: column 'sweep' has unknown kind '${sweep}'`,
      );
    }
    rows.push({
      sweep: sweep as SweepKind,
      value: parseNumber(parts[1], "value", i + 1),
      method: parts[2].trim(),
      meanRate: parseNumber(parts[3], "mean_rate", i + 1),
      stdRate: parseNumber(parts[4], "std_rate", i + 1),
      trials: parseNumber(parts[5], "trials", i + 1),
      fallbacks: parseNumber(parts[6], "fallbacks", i + 1),
    });
  }
  return rows;
}

/** Methods in first-appearance order. */
export function methodsOf(rows: SweepRow[]): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    if (!seen.includes(row.method)) {
      seen.push(row.method);
    }
  }
  return seen;
}
