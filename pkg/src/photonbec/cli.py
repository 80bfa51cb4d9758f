"""Command-line interface: scenario runs, viscosity sweeps, verification.

Subcommands:
  simulate        run one scenario, write snapshots.csv and series.csv
  verify          run a verification suite, write report.json
  sweep-viscosity compare viscous runs against the hyperbolic solution

Exit codes: 0 success/pass, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import model
from .config import ConfigError, ScenarioConfig, apply_overrides, parse_config
from .fields import CellField, TimeSeriesRecord
from .godunov import run, sample_initial
from .viscous import ViscousConfig, embed, restrict, run_viscous

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _load_config(path: str, overrides) -> ScenarioConfig:
    config = parse_config(Path(path).read_text())
    if overrides:
        config = apply_overrides(config, overrides)
    return config


def _write_snapshots_csv(path: Path, traj):
    x = traj.grid.centers()
    with open(path, "w", newline="") as fh:
        fh.write("t,x,n\n")
        for t, snap in zip(traj.times, traj.snapshots):
            ts = _fmt(t)
            for xi, ni in zip(x, snap):
                fh.write(f"{ts},{_fmt(xi)},{_fmt(ni)}\n")


def _write_series_csv(path: Path, rows):
    with open(path, "w", newline="") as fh:
        fh.write("t,N,condensate_mass,tv,min_slope,alpha_fit,l1_to_fit,lower_bound\n")
        for r in rows:
            fh.write(",".join(_fmt(v) for v in (
                r.t, r.photon_number, r.condensate_mass, r.total_variation,
                r.min_forward_slope, r.alpha_fit, r.l1_to_alpha_fit, r.lower_bound,
            )) + "\n")


def run_scenario(config: ScenarioConfig, out_dir: Path):
    """Run a scenario and write snapshots.csv + series.csv.

    Condensate mass per snapshot is reconstructed from the exact photon
    balance (initial number minus current number plus right-boundary
    accumulation over the whole run is not time-resolved; the left out-flux
    dominates, so the snapshot value uses mass loss).
    """
    traj = run(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    n0 = traj.ledger.initial_number
    for i, t in enumerate(traj.times):
        field = traj.snapshot_field(i)
        number = diag.photon_number(field)
        alpha, dist = diag.best_fit_alpha(field)
        rows.append(TimeSeriesRecord(
            t=t,
            photon_number=number,
            condensate_mass=n0 - number,
            total_variation=diag.total_variation(field),
            min_forward_slope=diag.min_forward_slope(field),
            alpha_fit=alpha,
            l1_to_alpha_fit=dist,
            lower_bound=diag.lower_bound_functional(field),
        ))
    _write_snapshots_csv(out_dir / "snapshots.csv", traj)
    _write_series_csv(out_dir / "series.csv", rows)
    return traj, rows


def _sweep_one(args):
    config_dict, eps = args
    config = parse_config(json.dumps(config_dict))
    traj = run(config)
    half_grid = traj.grid
    reference = traj.snapshot_field(-1)
    radius = max(4.0, config.x_max)
    fm = model.FluxModel(support_radius=radius)
    vconf = ViscousConfig(
        epsilon=eps, model=fm, x_min=-2.0, x_max=2.0 * radius + 2.0,
        cells=int(round((2.0 * radius + 4.0) / half_grid.dx)),
    )
    initial = embed(sample_initial(config.preset, half_grid, **config.params), vconf)
    _, snaps = run_viscous(vconf, initial, [config.t_end])
    restricted = restrict(CellField(vconf.grid, snaps[-1]), half_grid)
    return eps, diag.l1_distance(restricted, reference)


def cmd_simulate(args) -> int:
    config = _load_config(args.config, args.set or [])
    out_dir = Path(args.output or config.output_dir or ".")
    run_scenario(config, out_dir)
    print(f"wrote {out_dir / 'snapshots.csv'} and {out_dir / 'series.csv'}")
    return 0


def cmd_verify(args) -> int:
    from . import verify

    try:
        report = verify.run_suite(args.suite)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return USAGE_ERROR
    for suite, checks in report["suites"].items():
        for check in checks:
            tag = "PASS" if check["passed"] else "FAIL"
            print(f"[{tag}] {suite}: {check['name']} "
                  f"(value={check['value']:.6g}, threshold={check['threshold']:.6g}, "
                  f"margin={check['margin']:.6g})")
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    return 0 if report["passed"] else CHECK_FAILURE


def cmd_sweep_viscosity(args) -> int:
    config = _load_config(args.config, args.set or [])
    try:
        eps_list = [float(e) for e in args.eps.split(",") if e]
    except ValueError:
        print(f"invalid --eps list: {args.eps!r}", file=sys.stderr)
        return USAGE_ERROR
    if not eps_list:
        print("--eps must list at least one viscosity", file=sys.stderr)
        return USAGE_ERROR

    doc = {
        "preset": config.preset, "params": config.params, "x_max": config.x_max,
        "cells": config.cells, "cfl": config.cfl, "t_end": config.t_end,
        "snapshot_times": [config.t_end],
    }
    jobs = [(doc, eps) for eps in eps_list]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(job) for job in jobs]

    out_dir = Path(args.output or config.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "viscosity_sweep.csv", "w", newline="") as fh:
        fh.write("epsilon,l1_to_hyperbolic\n")
        for eps, dist in results:
            fh.write(f"{_fmt(eps)},{_fmt(dist)}\n")
            print(f"eps={eps:g}: L1 distance to hyperbolic = {dist:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonbec",
        description="Finite-volume laboratory for the condensing photon-number model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write CSVs")
    sim.add_argument("--config", required=True, help="JSON scenario file")
    sim.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config field or preset parameter")
    sim.add_argument("--output", help="output directory (default: config or cwd)")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run a verification suite")
    from .verify import suite_names
    ver.add_argument("--suite", required=True,
                     help=f"one of: {', '.join(suite_names())}")
    ver.add_argument("--report", help="write report.json here")
    ver.set_defaults(func=cmd_verify)

    swp = sub.add_parser("sweep-viscosity", help="viscous-vs-hyperbolic sweep")
    swp.add_argument("--config", required=True, help="JSON scenario file")
    swp.add_argument("--eps", required=True, help="comma-separated viscosities")
    swp.add_argument("--set", action="append", metavar="KEY=VALUE")
    swp.add_argument("--output", help="output directory")
    swp.add_argument("--jobs", type=int, default=1, help="parallel workers")
    swp.set_defaults(func=cmd_sweep_viscosity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
