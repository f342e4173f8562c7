/**
 * The three plot kinds, split into a pure data stage and a render stage.
 *
 * The *Data functions return exactly the arrays that end up on the axes
 * (already unit-converted), so tests assert on plotted data instead of
 * pixels.  Inputs are never mutated and rendering is deterministic.
 */

import * as fs from "fs";

import { PanelSpec, renderPanels } from "./chart.js";
import {
  CsvSchemaError,
  CurveRow,
  SummaryRow,
  TraceRow,
  parseCurveCsv,
  parseSummaryCsv,
  parseTraceCsv,
} from "./csv.js";

export type PlotKind = "target-curve" | "time-series" | "sweep-comparison";

export const PLOT_KINDS: PlotKind[] = ["target-curve", "time-series", "sweep-comparison"];

export interface PlotJob {
  kind: PlotKind;
  inputs: string[];
  output: string;
}

// ---------------------------------------------------------------- target curve

export interface TargetCurveData {
  /** target [ms] against the internal signal p' (linear). */
  vsPPrime: { x: number[]; targetMs: number[] };
  /** target [ms] against the applied probability p (concave). */
  vsP: { x: number[]; targetMs: number[] };
}

export function targetCurveData(rows: CurveRow[]): TargetCurveData {
  const x = rows.map((r) => r.x);
  return {
    vsPPrime: { x, targetMs: rows.map((r) => r.target_from_pprime_s * 1e3) },
    vsP: { x: [...x], targetMs: rows.map((r) => r.target_from_p_s * 1e3) },
  };
}

export function renderTargetCurve(data: TargetCurveData): string {
  const panels: PanelSpec[] = [
    {
      title: "Delay target vs. control signal",
      xLabel: "p'",
      yLabel: "target [ms]",
      series: [{ label: "target(p')", x: data.vsPPrime.x, y: data.vsPPrime.targetMs }],
    },
    {
      title: "Delay target vs. drop probability",
      xLabel: "p",
      yLabel: "target [ms]",
      series: [{ label: "target(p)", x: data.vsP.x, y: data.vsP.targetMs }],
    },
  ];
  return renderPanels(panels);
}

// ----------------------------------------------------------------- time series

export interface TimeSeriesData {
  timeS: number[];
  delayMs: number[];
  targetMs: number[];
  pPrime: number[];
  p: number[];
}

export function timeSeriesData(rows: TraceRow[]): TimeSeriesData {
  return {
    timeS: rows.map((r) => r.time_s),
    delayMs: rows.map((r) => r.queue_delay_s * 1e3),
    targetMs: rows.map((r) => r.target_s * 1e3),
    pPrime: rows.map((r) => r.p_prime),
    p: rows.map((r) => r.p),
  };
}

export function renderTimeSeries(data: TimeSeriesData): string {
  const panels: PanelSpec[] = [
    {
      title: "Queuing delay",
      xLabel: "time [s]",
      yLabel: "delay [ms]",
      series: [
        { label: "delay", x: data.timeS, y: data.delayMs },
        { label: "target", x: data.timeS, y: data.targetMs, dashed: true },
      ],
    },
    {
      title: "Controller output",
      xLabel: "time [s]",
      yLabel: "probability",
      series: [
        { label: "p'", x: data.timeS, y: data.pPrime },
        { label: "p", x: data.timeS, y: data.p },
      ],
    },
  ];
  return renderPanels(panels);
}

// ------------------------------------------------------------ sweep comparison

export interface SweepSeries {
  controller: string;
  nFlows: number[];
  /** seed-averaged per point */
  meanP: number[];
  meanDelayMs: number[];
  /** fluid-model predictions; null where the oracle does not apply */
  oracleP: (number | null)[];
  oracleQMs: (number | null)[];
}

export function sweepComparisonData(rows: SummaryRow[]): SweepSeries[] {
  const ok = rows.filter((r) => r.error === "");
  if (ok.length === 0) {
    throw new CsvSchemaError("summary csv: no successful runs to plot");
  }
  const byController = new Map<string, SummaryRow[]>();
  for (const r of ok) {
    const bucket = byController.get(r.controller) ?? [];
    bucket.push(r);
    byController.set(r.controller, bucket);
  }
  const out: SweepSeries[] = [];
  for (const controller of [...byController.keys()].sort()) {
    const group = byController.get(controller)!;
    const byN = new Map<number, SummaryRow[]>();
    for (const r of group) {
      const bucket = byN.get(r.n_flows) ?? [];
      bucket.push(r);
      byN.set(r.n_flows, bucket);
    }
    const ns = [...byN.keys()].sort((a, b) => a - b);
    const mean = (vals: number[]) => vals.reduce((a, b) => a + b, 0) / vals.length;
    out.push({
      controller,
      nFlows: ns,
      meanP: ns.map((n) => mean(byN.get(n)!.map((r) => r.mean_p))),
      meanDelayMs: ns.map((n) => mean(byN.get(n)!.map((r) => r.mean_delay_s * 1e3))),
      oracleP: ns.map((n) => byN.get(n)!.find((r) => r.oracle_p !== null)?.oracle_p ?? null),
      oracleQMs: ns.map((n) => {
        const q = byN.get(n)!.find((r) => r.oracle_q_s !== null)?.oracle_q_s;
        return q === undefined || q === null ? null : q * 1e3;
      }),
    });
  }
  return out;
}

export function renderSweepComparison(seriesList: SweepSeries[]): string {
  const lossSeries = [];
  const delaySeries = [];
  for (const s of seriesList) {
    lossSeries.push({ label: s.controller, x: s.nFlows, y: s.meanP });
    delaySeries.push({ label: s.controller, x: s.nFlows, y: s.meanDelayMs });
    if (s.oracleP.some((v) => v !== null)) {
      lossSeries.push({
        label: `${s.controller} oracle`,
        x: s.nFlows.filter((_, i) => s.oracleP[i] !== null),
        y: s.oracleP.filter((v): v is number => v !== null),
        dashed: true,
      });
      delaySeries.push({
        label: `${s.controller} oracle`,
        x: s.nFlows.filter((_, i) => s.oracleQMs[i] !== null),
        y: s.oracleQMs.filter((v): v is number => v !== null),
        dashed: true,
      });
    }
  }
  const panels: PanelSpec[] = [
    {
      // loss spans orders of magnitude across a flow-count sweep
      title: "Steady-state loss vs. load",
      xLabel: "flows",
      yLabel: "mean p",
      series: lossSeries,
      yLog: true,
    },
    {
      title: "Steady-state delay vs. load",
      xLabel: "flows",
      yLabel: "mean delay [ms]",
      series: delaySeries,
    },
  ];
  return renderPanels(panels);
}

// ---------------------------------------------------------------------- driver

function readInputs(job: PlotJob, expected: number | "many"): string[] {
  if (expected !== "many" && job.inputs.length !== expected) {
    throw new CsvSchemaError(
      `${job.kind} takes exactly ${expected} input file(s), got ${job.inputs.length}`,
    );
  }
  if (job.inputs.length === 0) {
    throw new CsvSchemaError(`${job.kind} needs at least one input file`);
  }
  return job.inputs.map((p) => fs.readFileSync(p, "utf8"));
}

/** Read the job's CSV inputs, render its SVG, write it to job.output. */
export function render(job: PlotJob): void {
  let svg: string;
  switch (job.kind) {
    case "target-curve":
      svg = renderTargetCurve(targetCurveData(parseCurveCsv(readInputs(job, 1)[0]!)));
      break;
    case "time-series":
      svg = renderTimeSeries(timeSeriesData(parseTraceCsv(readInputs(job, 1)[0]!)));
      break;
    case "sweep-comparison":
      svg = renderSweepComparison(
        sweepComparisonData(readInputs(job, "many").flatMap(parseSummaryCsv)),
      );
      break;
    default:
      throw new CsvSchemaError(`unknown plot kind "${job.kind satisfies never}"`);
  }
  fs.writeFileSync(job.output, svg);
}
