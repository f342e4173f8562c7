"""Experiment sweeps: one simulation per (axis value, repeat) with derived seeds.

Seeds are derived as ``base_seed + i*10**6 + j`` for axis index i and
repeat j, which is injective over any sane sweep grid, so no two runs
share a random stream.  Run failures are recorded per row and the sweep
continues.  The aggregate summary is written in deterministic grid order.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from aqmsim import metrics, sim
from aqmsim.aqm import SoftTargetCurve
from aqmsim.metrics import summary_row, write_summary_csv, write_trace_csv
from aqmsim.scenario import ScenarioConfig, SweepSpec
from aqmsim.traffic import FluidLoad, solve_equilibrium

__all__ = ["derive_seed", "run_single", "run_sweep", "fluid_oracle", "target_curve_rows"]

SEED_AXIS_STRIDE = 10**6


def derive_seed(base_seed: int, axis_index: int, repeat: int) -> int:
    """Deterministic, collision-free seed for one sweep cell."""
    return base_seed + axis_index * SEED_AXIS_STRIDE + repeat


def fluid_oracle(cfg: ScenarioConfig) -> tuple[float, float] | None:
    """Fluid-model (p*, q*) prediction for PI-family controllers.

    Returns None for controllers whose target law the fluid model does not
    describe (CoDel, convex RED, no AQM) and for infeasible loads.
    """
    if cfg.controller not in ("pi_fixed", "pi2_fixed", "curvy_pi2") or cfg.n_flows < 1:
        return None
    q1 = cfg.q1_s if cfg.controller == "curvy_pi2" else 0.0
    curve = SoftTargetCurve(cfg.q0_s, q1)
    load = FluidLoad(n_flows=cfg.n_flows, rtt_base=cfg.rtt_base_s, mss=cfg.mss_bytes)
    try:
        return solve_equilibrium(load, cfg.link_rate_bytes, curve)
    except ValueError:
        return None


def run_single(cfg: ScenarioConfig, seed: int, out_dir: Path, axis: str = "", axis_value="") -> dict:
    """Run one simulation, write its trace CSV, and return its summary row."""
    run_dir = out_dir / f"seed-{seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    oracle = fluid_oracle(cfg)
    oracle_p = oracle[0] if oracle else ""
    oracle_q = oracle[1] if oracle else ""
    try:
        trace = sim.run(cfg, seed)
        write_trace_csv(trace, run_dir / "trace.csv")
        summary = metrics.summarize(trace, cfg.warmup_s)
    except Exception as exc:  # recorded per-row, sweep continues
        return summary_row(
            cfg.name,
            cfg.controller,
            cfg.n_flows,
            seed,
            metrics.RunSummary(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            axis=axis,
            axis_value=axis_value,
            oracle_p=oracle_p,
            oracle_q=oracle_q,
            error=f"{type(exc).__name__}: {exc}",
        )
    return summary_row(
        cfg.name,
        cfg.controller,
        cfg.n_flows,
        seed,
        summary,
        axis=axis,
        axis_value=axis_value,
        oracle_p=oracle_p,
        oracle_q=oracle_q,
    )


def run_sweep(spec: SweepSpec, out_dir: str | Path) -> list[dict]:
    """Run every (axis value x repeat) cell and write the aggregate summary.

    Layout: ``<out>/<scenario-name>/<axis-value>/seed-<n>/trace.csv`` plus
    ``<out>/summary.csv``.  Returns the summary rows in grid order.
    """
    out_dir = Path(out_dir)
    rows = []
    for i, value in enumerate(spec.values):
        cfg = dataclasses.replace(spec.base, **{spec.axis: value})
        point_dir = out_dir / spec.base.name / str(value)
        for j in range(spec.repeats):
            seed = derive_seed(spec.base.seed, i, j)
            rows.append(run_single(cfg, seed, point_dir, axis=spec.axis, axis_value=value))
    write_summary_csv(rows, out_dir / "summary.csv")
    return rows


CURVE_COLUMNS = ["x", "target_from_pprime_s", "target_from_p_s"]


def target_curve_rows(curve: SoftTargetCurve, grid: int) -> list[tuple[float, float, float]]:
    """Sampled soft-target curve for both panels: x serves as p' and as p.

    Column 2 is the target as a function of the internal signal (linear);
    column 3 as a function of the applied probability (concave).  grid = 2
    yields exactly the two endpoint rows.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    rows = []
    for k in range(grid):
        x = k / (grid - 1)
        rows.append((x, curve.target_from_pprime(x), curve.target_from_p(x)))
    return rows
