"""Command-line entry point.

Subcommands: ``run`` a scenario, ``sweep`` an experiment spec, ``curve``
to dump the soft-target curve CSV, and ``validate`` a scenario file.
Exit codes: 0 success, 1 validation error, 2 runtime failure.  The
default output directory comes from $AQMSIM_OUT (flag overrides).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from pathlib import Path

from aqmsim import metrics, sim
from aqmsim.aqm import SoftTargetCurve
from aqmsim.scenario import ScenarioError, parse_scenario, parse_sweep
from aqmsim.sweep import CURVE_COLUMNS, run_single, run_sweep, target_curve_rows

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _default_out() -> str:
    return os.environ.get("AQMSIM_OUT", "out")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqmsim",
        description="Single-bottleneck AQM simulator with soft delay targets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write trace + summary CSVs")
    p_run.add_argument("scenario", help="scenario TOML file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--out", default=None, help="output directory (default $AQMSIM_OUT or ./out)")

    p_sweep = sub.add_parser("sweep", help="run a sweep spec (one sim per axis value x repeat)")
    p_sweep.add_argument("spec", help="sweep TOML file with [base] table plus axis/values/repeats")
    p_sweep.add_argument("--out", default=None, help="output directory (default $AQMSIM_OUT or ./out)")

    p_curve = sub.add_parser("curve", help="dump the soft-target curve as CSV")
    p_curve.add_argument("--q0", type=float, required=True, help="minimum delay target [ms]")
    p_curve.add_argument("--q1", type=float, required=True, help="target span at p'=1 [ms]")
    p_curve.add_argument("--grid", type=int, default=101, help="number of sample points (>= 2)")
    p_curve.add_argument("--out", default=None, help="write CSV here instead of stdout")

    p_val = sub.add_parser("validate", help="check a scenario file and print the filled config")
    p_val.add_argument("scenario", help="scenario TOML file")
    return parser


def _cmd_run(args) -> int:
    cfg = parse_scenario(args.scenario)
    out = Path(args.out or _default_out())
    seed = cfg.seed if args.seed is None else args.seed
    row = run_single(cfg, seed, out / cfg.name)
    if row["error"]:
        print(f"run failed: {row['error']}", file=sys.stderr)
        return EXIT_RUNTIME
    metrics.write_summary_csv([row], out / "summary.csv")
    print(
        f"{cfg.name}: seed {seed}, mean delay {row['mean_delay_s'] * 1e3:.3f} ms, "
        f"mean p {row['mean_p']:.3g}, goodput {row['goodput_bytes_per_s'] / 1e6:.3f} MB/s"
    )
    print(f"trace: {out / cfg.name / f'seed-{seed}' / 'trace.csv'}")
    print(f"summary: {out / 'summary.csv'}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = parse_sweep(args.spec)
    out = Path(args.out or _default_out())
    rows = run_sweep(spec, out)
    failures = [r for r in rows if r["error"]]
    print(f"{len(rows)} runs, {len(failures)} failed; summary: {out / 'summary.csv'}")
    for row in failures:
        print(f"  {row['axis']}={row['axis_value']} seed={row['seed']}: {row['error']}", file=sys.stderr)
    return EXIT_RUNTIME if failures else EXIT_OK


def _cmd_curve(args) -> int:
    curve = SoftTargetCurve(args.q0 / 1e3, args.q1 / 1e3)
    rows = target_curve_rows(curve, args.grid)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CURVE_COLUMNS)
            writer.writerows([repr(v) for v in row] for row in rows)
        print(f"curve: {args.out}")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(CURVE_COLUMNS)
        writer.writerows([repr(v) for v in row] for row in rows)
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = parse_scenario(args.scenario)
    print(f"{args.scenario}: valid")
    for key, value in sorted(dataclasses.asdict(cfg).items()):
        print(f"  {key} = {value}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "curve": _cmd_curve,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
