"""Trace recording, summary statistics, and CSV emission.

One ``TraceRecord`` is appended per controller tick.  ``summarize``
reduces the post-warmup window to a ``RunSummary``; percentiles use the
nearest-rank definition (no interpolation) so results are reproducible
across platforms.  CSV writers emit full round-trip precision via
``repr`` of floats.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

__all__ = [
    "TraceRecord",
    "TraceSet",
    "RunSummary",
    "summarize",
    "write_trace_csv",
    "read_trace_csv",
    "write_summary_csv",
    "TRACE_COLUMNS",
    "SUMMARY_COLUMNS",
]

# Exact trace CSV schema, in column order.
TRACE_COLUMNS = [
    "time_s",
    "queue_delay_s",
    "p_prime",
    "p",
    "target_s",
    "backlog_bytes",
    "drops_cum",
    "marks_cum",
    "delivered_bytes_cum",
]

# Summary CSV schema: scenario-identifying columns, the RunSummary fields,
# then sweep bookkeeping and the fluid-oracle prediction.
SUMMARY_COLUMNS = [
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
]


@dataclass
class TraceRecord:
    """One sampled row of simulator observables (one controller tick)."""

    time_s: float
    queue_delay_s: float
    p_prime: float
    p: float
    target_s: float
    backlog_bytes: int
    drops_cum: int
    marks_cum: int
    delivered_bytes_cum: int

    def as_row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


@dataclass
class TraceSet:
    """Complete output of one simulation run.

    Holds the per-tick trace plus the end-of-run conservation counters and
    the recovery-event timestamps needed for the loss-repair metric.
    """

    records: list[TraceRecord] = field(default_factory=list)
    # metadata the summary needs
    n_flows: int = 0
    mss: int = 1500
    link_rate: float = 0.0  # bytes/second
    duration: float = 0.0
    # aggregate packet conservation counters
    packets_generated: int = 0
    packets_delivered: int = 0
    packets_dropped: int = 0
    packets_marked: int = 0
    packets_in_queue: int = 0
    # per-flow conservation counters, keyed by flow id
    per_flow_generated: dict[int, int] = field(default_factory=dict)
    per_flow_delivered: dict[int, int] = field(default_factory=dict)
    per_flow_dropped: dict[int, int] = field(default_factory=dict)
    per_flow_in_queue: dict[int, int] = field(default_factory=dict)
    # times at which some flow actually halved its window
    recovery_times: list[float] = field(default_factory=list)

    def record(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def conservation_holds(self) -> bool:
        """Generated = delivered + dropped + in-queue, per flow and in aggregate."""
        if self.packets_generated != (
            self.packets_delivered + self.packets_dropped + self.packets_in_queue
        ):
            return False
        for fid, gen in self.per_flow_generated.items():
            if gen != (
                self.per_flow_delivered.get(fid, 0)
                + self.per_flow_dropped.get(fid, 0)
                + self.per_flow_in_queue.get(fid, 0)
            ):
                return False
        return True

    def content_hash(self) -> str:
        """SHA-256 over the canonical CSV rendering of the trace rows."""
        h = hashlib.sha256()
        h.update(",".join(TRACE_COLUMNS).encode())
        for rec in self.records:
            h.update(",".join(repr(v) for v in rec.as_row()).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class RunSummary:
    """Post-warmup steady-state statistics of one run."""

    mean_delay: float
    p99_delay: float
    mean_p: float
    drop_rate: float
    mark_rate: float
    goodput: float  # bytes/second
    recovery_rate: float  # window halvings per flow per second


def _nearest_rank(sorted_values: list[float], fraction: float) -> float:
    """Nearest-rank percentile: the ceil(fraction*n)-th smallest value."""
    n = len(sorted_values)
    rank = math.ceil(fraction * n)
    return sorted_values[max(0, min(n, rank) - 1)]


def summarize(trace: TraceSet, warmup: float = 10.0) -> RunSummary:
    """Reduce the post-warmup window of a trace to steady-state statistics.

    The window covers rows with time > warmup; cumulative counters are
    differenced against the last row at or before the warmup boundary (or
    zero if there is none).  Raises ValueError on an empty window.
    """
    rows = [r for r in trace.records if r.time_s > warmup]
    if not rows:
        raise ValueError(
            f"no trace rows after warmup ({warmup} s); trace has {len(trace.records)} rows"
        )
    baseline_time = 0.0
    base_drops = base_marks = base_delivered = 0
    for r in trace.records:
        if r.time_s > warmup:
            break
        baseline_time = r.time_s
        base_drops, base_marks, base_delivered = r.drops_cum, r.marks_cum, r.delivered_bytes_cum

    last = rows[-1]
    window = last.time_s - baseline_time
    delays = sorted(r.queue_delay_s for r in rows)
    mean_delay = sum(delays) / len(delays)
    p99_delay = _nearest_rank(delays, 0.99)
    mean_p = sum(r.p for r in rows) / len(rows)

    drops = last.drops_cum - base_drops
    marks = last.marks_cum - base_marks
    delivered_bytes = last.delivered_bytes_cum - base_delivered
    delivered_pkts = delivered_bytes / trace.mss
    total_pkts = delivered_pkts + drops
    drop_rate = drops / total_pkts if total_pkts > 0 else 0.0
    mark_rate = marks / total_pkts if total_pkts > 0 else 0.0
    goodput = delivered_bytes / window if window > 0 else 0.0

    recoveries = sum(1 for t in trace.recovery_times if baseline_time < t <= last.time_s)
    if trace.n_flows > 0 and window > 0:
        recovery_rate = recoveries / (trace.n_flows * window)
    else:
        recovery_rate = 0.0

    return RunSummary(
        mean_delay=mean_delay,
        p99_delay=p99_delay,
        mean_p=mean_p,
        drop_rate=drop_rate,
        mark_rate=mark_rate,
        goodput=goodput,
        recovery_rate=recovery_rate,
    )


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trace_csv(trace: TraceSet, path: str | Path) -> None:
    """Write the per-tick trace in the documented column order."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for rec in trace.records:
                writer.writerow([_format_value(v) for v in rec.as_row()])
    except OSError as exc:
        raise OSError(f"cannot write trace CSV to {path}: {exc}") from exc


def read_trace_csv(path: str | Path) -> list[TraceRecord]:
    """Parse a trace CSV back into records (round-trips losslessly)."""
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace CSV header in {path}: {header}")
        for row in reader:
            records.append(
                TraceRecord(
                    time_s=float(row[0]),
                    queue_delay_s=float(row[1]),
                    p_prime=float(row[2]),
                    p=float(row[3]),
                    target_s=float(row[4]),
                    backlog_bytes=int(row[5]),
                    drops_cum=int(row[6]),
                    marks_cum=int(row[7]),
                    delivered_bytes_cum=int(row[8]),
                )
            )
    return records


def write_summary_csv(rows: list[dict], path: str | Path) -> None:
    """Write one summary row per run, columns per SUMMARY_COLUMNS."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for row in rows:
                writer.writerow([_format_value(row.get(c, "")) for c in SUMMARY_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write summary CSV to {path}: {exc}") from exc


def summary_row(
    scenario: str,
    controller: str,
    n_flows: int,
    seed: int,
    summary: RunSummary,
    axis: str = "",
    axis_value="",
    oracle_p="",
    oracle_q="",
    error: str = "",
) -> dict:
    """Assemble one summary CSV row."""
    return {
        "scenario": scenario,
        "controller": controller,
        "n_flows": n_flows,
        "seed": seed,
        "mean_delay_s": summary.mean_delay,
        "p99_delay_s": summary.p99_delay,
        "mean_p": summary.mean_p,
        "drop_rate": summary.drop_rate,
        "mark_rate": summary.mark_rate,
        "goodput_bytes_per_s": summary.goodput,
        "recovery_rate": summary.recovery_rate,
        "axis": axis,
        "axis_value": axis_value,
        "oracle_p": oracle_p,
        "oracle_q_s": oracle_q,
        "error": error,
    }
