"""Trace recording, summary statistics, CSV round-trip."""

from __future__ import annotations

import csv

import pytest

from aqmsim.metrics import (
    SUMMARY_COLUMNS,
    TRACE_COLUMNS,
    RunSummary,
    TraceRecord,
    TraceSet,
    read_trace_csv,
    summarize,
    summary_row,
    write_summary_csv,
    write_trace_csv,
)

MS = 1e-3


def _rec(t, delay, p_prime=0.0, p=0.0, target=0.01, backlog=0, drops=0, marks=0, dlv=0):
    return TraceRecord(
        time_s=t,
        queue_delay_s=delay,
        p_prime=p_prime,
        p=p,
        target_s=target,
        backlog_bytes=backlog,
        drops_cum=drops,
        marks_cum=marks,
        delivered_bytes_cum=dlv,
    )


def _trace(records, n_flows=1, mss=1500, link_rate=1.25e6, duration=60.0):
    ts = TraceSet(n_flows=n_flows, mss=mss, link_rate=link_rate, duration=duration)
    for r in records:
        ts.record(r)
    return ts


class TestSummarize:
    def test_constant_delay_collapses_mean_and_p99(self):
        recs = [_rec(t=1.0 + i, delay=7 * MS) for i in range(50)]
        s = summarize(_trace(recs), warmup=0.0)
        assert s.mean_delay == pytest.approx(7 * MS, rel=1e-12)
        assert s.p99_delay == 7 * MS

    def test_p99_nearest_rank_on_uniform_grid(self):
        # delays 1..100 ms, one row each: nearest-rank p99 = ceil(0.99*100) = 99th
        recs = [_rec(t=float(i), delay=i * MS) for i in range(1, 101)]
        s = summarize(_trace(recs), warmup=0.0)
        assert s.p99_delay == pytest.approx(99 * MS, abs=1e-15)

    def test_warmup_rows_excluded(self):
        recs = [_rec(t=float(i), delay=1.0) for i in range(1, 11)]
        recs += [_rec(t=float(i), delay=2 * MS) for i in range(11, 21)]
        s = summarize(_trace(recs), warmup=10.0)
        assert s.mean_delay == pytest.approx(2 * MS, rel=1e-12)

    def test_empty_window_is_an_error(self):
        recs = [_rec(t=1.0, delay=0.0)]
        with pytest.raises(ValueError):
            summarize(_trace(recs), warmup=5.0)

    def test_synthetic_trace_recomputation(self):
        # Hand-built trace: 10 s warmup baseline then 10 post-warmup rows,
        # 1 s apart, delays 10,20,...,100 ms; drops go 5 -> 25; delivered
        # bytes go 1_500_000 -> 16_500_000; p ramps 0.01..0.10.
        recs = [_rec(t=10.0, delay=0.0, drops=5, dlv=1_500_000)]
        for i in range(1, 11):
            recs.append(
                _rec(
                    t=10.0 + i,
                    delay=10 * i * MS,
                    p=0.01 * i,
                    drops=5 + 2 * i,
                    dlv=1_500_000 + 1_500_000 * i,
                )
            )
        ts = _trace(recs, n_flows=2, mss=1500)
        ts.recovery_times = [10.5, 12.0, 25.0]  # last one is out of window
        s = summarize(ts, warmup=10.0)
        assert s.mean_delay == pytest.approx(55 * MS, rel=1e-12)
        assert s.p99_delay == pytest.approx(100 * MS, rel=1e-12)
        assert s.mean_p == pytest.approx(0.055, rel=1e-12)
        # 20 drops vs 10_000 delivered packets
        assert s.drop_rate == pytest.approx(20 / 10020, rel=1e-12)
        assert s.mark_rate == 0.0
        assert s.goodput == pytest.approx(15_000_000 / 10.0, rel=1e-12)
        # 2 recoveries in (10, 20] over 2 flows * 10 s
        assert s.recovery_rate == pytest.approx(2 / 20.0, rel=1e-12)

    def test_cumulative_counters_nondecreasing_in_real_runs(self):
        from aqmsim import sim
        from aqmsim.scenario import ScenarioConfig

        cfg = ScenarioConfig(
            controller="pi2_fixed", link_rate_bps=1e7, n_flows=3, duration_s=8.0, seed=3
        )
        ts = sim.run(cfg)
        for a, b in zip(ts.records, ts.records[1:]):
            assert b.drops_cum >= a.drops_cum
            assert b.marks_cum >= a.marks_cum
            assert b.delivered_bytes_cum >= a.delivered_bytes_cum
            assert b.time_s > a.time_s


class TestConservationBookkeeping:
    def test_balanced_counters_pass(self):
        ts = _trace([_rec(t=1.0, delay=0.0)])
        ts.packets_generated = 10
        ts.packets_delivered = 7
        ts.packets_dropped = 2
        ts.packets_in_queue = 1
        ts.per_flow_generated = {0: 10}
        ts.per_flow_delivered = {0: 7}
        ts.per_flow_dropped = {0: 2}
        ts.per_flow_in_queue = {0: 1}
        assert ts.conservation_holds()

    def test_unbalanced_counters_fail(self):
        ts = _trace([_rec(t=1.0, delay=0.0)])
        ts.packets_generated = 10
        ts.packets_delivered = 7
        assert not ts.conservation_holds()

    def test_per_flow_imbalance_detected(self):
        ts = _trace([_rec(t=1.0, delay=0.0)])
        ts.packets_generated = 4
        ts.packets_delivered = 4
        ts.per_flow_generated = {0: 2, 1: 2}
        ts.per_flow_delivered = {0: 3, 1: 1}
        assert not ts.conservation_holds()

    def test_content_hash_sensitive_to_any_field(self):
        a = _trace([_rec(t=1.0, delay=0.001)])
        b = _trace([_rec(t=1.0, delay=0.001)])
        assert a.content_hash() == b.content_hash()
        c = _trace([_rec(t=1.0, delay=0.0010000001)])
        assert a.content_hash() != c.content_hash()


class TestCsv:
    def test_trace_round_trip_is_lossless(self, tmp_path):
        recs = [
            _rec(t=0.016, delay=1.23456789e-3, p_prime=0.1234567890123, p=0.015241578,
                 target=0.01, backlog=4500, drops=1, marks=2, dlv=30000),
            _rec(t=0.032, delay=0.1 / 3.0, p_prime=1.0 / 7.0, p=(1.0 / 7.0) ** 2,
                 target=0.095, backlog=125000, drops=3, marks=4, dlv=60000),
        ]
        path = tmp_path / "trace.csv"
        write_trace_csv(_trace(recs), path)
        back = read_trace_csv(path)
        assert back == recs

    def test_empty_trace_writes_header_only(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(_trace([]), path)
        lines = path.read_text().strip().splitlines()
        assert lines == [",".join(TRACE_COLUMNS)]

    def test_trace_column_order_is_the_documented_schema(self, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(_trace([_rec(t=0.016, delay=0.0)]), path)
        header = path.read_text().splitlines()[0]
        assert header == "time_s,queue_delay_s,p_prime,p,target_s,backlog_bytes,drops_cum,marks_cum,delivered_bytes_cum"

    def test_read_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bogus.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_trace_csv(path)

    def test_summary_csv_columns_and_values(self, tmp_path):
        s = RunSummary(
            mean_delay=0.01,
            p99_delay=0.02,
            mean_p=1e-4,
            drop_rate=9e-5,
            mark_rate=0.0,
            goodput=1.2e6,
            recovery_rate=0.05,
        )
        row = summary_row(
            scenario="demo", controller="pi2_fixed", n_flows=10, seed=3, summary=s,
            axis="n_flows", axis_value=10, oracle_p=1e-4, oracle_q=0.01,
        )
        path = tmp_path / "summary.csv"
        write_summary_csv([row], path)
        with path.open() as fh:
            parsed = list(csv.DictReader(fh))
        assert list(parsed[0].keys()) == SUMMARY_COLUMNS
        assert parsed[0]["scenario"] == "demo"
        assert float(parsed[0]["oracle_p"]) == 1e-4
        assert float(parsed[0]["goodput_bytes_per_s"]) == 1.2e6
        assert parsed[0]["error"] == ""

    def test_write_error_carries_path_context(self, tmp_path):
        target = tmp_path / "no_such_dir" / "trace.csv"
        with pytest.raises(OSError) as err:
            write_trace_csv(_trace([]), target)
        assert "no_such_dir" in str(err.value)
