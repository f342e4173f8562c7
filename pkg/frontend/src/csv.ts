/**
 * Parsers for the three CSV schemas the simulator CLI writes.
 *
 * Validation is strict about the column *set*: a missing or unexpected
 * column fails with an error naming that column, so a schema drift in
 * either tool is caught at the boundary instead of as NaN downstream.
 */

import Papa from "papaparse";

export class CsvSchemaError extends Error {}

export const TRACE_COLUMNS = [
  "time_s",
  "queue_delay_s",
  "p_prime",
  "p",
  "target_s",
  "backlog_bytes",
  "drops_cum",
  "marks_cum",
  "delivered_bytes_cum",
] as const;

export const SUMMARY_COLUMNS = [
  "scenario",
  "controller",
  "n_flows",
  "seed",
  "mean_delay_s",
  "p99_delay_s",
  "mean_p",
  "drop_rate",
  "mark_rate",
  "goodput_bytes_per_s",
  "recovery_rate",
  "axis",
  "axis_value",
  "oracle_p",
  "oracle_q_s",
  "error",
] as const;

export const CURVE_COLUMNS = ["x", "target_from_pprime_s", "target_from_p_s"] as const;

export interface TraceRow {
  time_s: number;
  queue_delay_s: number;
  p_prime: number;
  p: number;
  target_s: number;
  backlog_bytes: number;
  drops_cum: number;
  marks_cum: number;
  delivered_bytes_cum: number;
}

export interface SummaryRow {
  scenario: string;
  controller: string;
  n_flows: number;
  seed: number;
  mean_delay_s: number;
  p99_delay_s: number;
  mean_p: number;
  drop_rate: number;
  mark_rate: number;
  goodput_bytes_per_s: number;
  recovery_rate: number;
  axis: string;
  axis_value: number | null;
  oracle_p: number | null;
  oracle_q_s: number | null;
  error: string;
}

export interface CurveRow {
  x: number;
  target_from_pprime_s: number;
  target_from_p_s: number;
}

type RawRow = Record<string, string>;

function parseRaw(text: string, schema: readonly string[], what: string): RawRow[] {
  const result = Papa.parse<RawRow>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const e = result.errors[0]!;
    throw new CsvSchemaError(`${what}: ${e.message} (row ${e.row ?? "?"})`);
  }
  const fields = result.meta.fields ?? [];
  for (const col of schema) {
    if (!fields.includes(col)) {
      throw new CsvSchemaError(`${what}: missing column "${col}"`);
    }
  }
  for (const col of fields) {
    if (!schema.includes(col)) {
      throw new CsvSchemaError(`${what}: unexpected column "${col}"`);
    }
  }
  return result.data;
}

function num(row: RawRow, col: string, what: string, rowIdx: number): number {
  const v = Number(row[col]);
  if (row[col] === "" || row[col] === undefined || Number.isNaN(v)) {
    throw new CsvSchemaError(
      `${what}: column "${col}" has non-numeric value "${row[col]}" (row ${rowIdx + 1})`,
    );
  }
  return v;
}

function numOrNull(row: RawRow, col: string, what: string, rowIdx: number): number | null {
  if (row[col] === "" || row[col] === undefined) return null;
  return num(row, col, what, rowIdx);
}

export function parseTraceCsv(text: string): TraceRow[] {
  const what = "trace csv";
  return parseRaw(text, TRACE_COLUMNS, what).map((r, i) => ({
    time_s: num(r, "time_s", what, i),
    queue_delay_s: num(r, "queue_delay_s", what, i),
    p_prime: num(r, "p_prime", what, i),
    p: num(r, "p", what, i),
    target_s: num(r, "target_s", what, i),
    backlog_bytes: num(r, "backlog_bytes", what, i),
    drops_cum: num(r, "drops_cum", what, i),
    marks_cum: num(r, "marks_cum", what, i),
    delivered_bytes_cum: num(r, "delivered_bytes_cum", what, i),
  }));
}

export function parseSummaryCsv(text: string): SummaryRow[] {
  const what = "summary csv";
  return parseRaw(text, SUMMARY_COLUMNS, what).map((r, i) => ({
    scenario: r.scenario ?? "",
    controller: r.controller ?? "",
    n_flows: num(r, "n_flows", what, i),
    seed: num(r, "seed", what, i),
    mean_delay_s: num(r, "mean_delay_s", what, i),
    p99_delay_s: num(r, "p99_delay_s", what, i),
    mean_p: num(r, "mean_p", what, i),
    drop_rate: num(r, "drop_rate", what, i),
    mark_rate: num(r, "mark_rate", what, i),
    goodput_bytes_per_s: num(r, "goodput_bytes_per_s", what, i),
    recovery_rate: num(r, "recovery_rate", what, i),
    axis: r.axis ?? "",
    axis_value: numOrNull(r, "axis_value", what, i),
    oracle_p: numOrNull(r, "oracle_p", what, i),
    oracle_q_s: numOrNull(r, "oracle_q_s", what, i),
    error: r.error ?? "",
  }));
}

export function parseCurveCsv(text: string): CurveRow[] {
  const what = "curve csv";
  return parseRaw(text, CURVE_COLUMNS, what).map((r, i) => ({
    x: num(r, "x", what, i),
    target_from_pprime_s: num(r, "target_from_pprime_s", what, i),
    target_from_p_s: num(r, "target_from_p_s", what, i),
  }));
}
