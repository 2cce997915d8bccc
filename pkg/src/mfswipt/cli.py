"""Command-line interface.

Subcommands:

* ``solve``      - run one scheme on a scenario file, emit a result row and
                   the allocation vector.
* ``sweep``      - run schemes across a parameter grid, emit a CSV table.
* ``correlate``  - dump the coupling matrices and a closed-form-vs-exact
                   correlation error grid.
* ``check``      - parse and validate a scenario file.

Exit codes: 0 solved (or any sweep row solved), 2 infeasible, 3 iteration
limit, 4 scenario/parse error, 1 unexpected failure.  Set MFSWIPT_LOG to a
level name (debug, info, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import ResultRow, SchemeId, SweepSpec, run_scheme, run_sweep
from .correlation import (
    DegenerateGeometryError,
    build_matrices,
    correlation_approx,
    correlation_exact,
)
from .geometry import PolarLocation, fresnel_min_distance, rayleigh_distance
from .metrics import sum_rate
from .scenario import Scenario, ScenarioError, parse_scenario, scenario_hash, watts_to_dbm
from .solvers import SolveStatus, SolverOptions

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INFEASIBLE = 2
EXIT_ITER_LIMIT = 3
EXIT_BAD_INPUT = 4

CSV_COLUMNS = [
    "sweep_var",
    "sweep_value",
    "scheme",
    "objective_W",
    "objective_dBm",
    "sum_rate_bpshz",
    "scheduled_mask",
    "iterations",
    "status",
    "wall_ms",
    "seed",
]

log = logging.getLogger(__name__)


def _setup_logging() -> None:
    level = os.environ.get("MFSWIPT_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.12g}"
    return str(value)


def _solver_options(scenario: Scenario) -> SolverOptions:
    try:
        return SolverOptions(**scenario.solver_overrides)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"solver overrides: {exc}") from exc


def _write_rows(
    path: str | None, rows: list[ResultRow], header_meta: dict, trailer: list[str] = ()
) -> None:
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        meta = " ".join(f"{k}={v}" for k, v in header_meta.items())
        out.write(f"# mfswipt v{__version__} {meta}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.sweep_var,
                    _fmt(row.sweep_value),
                    row.scheme,
                    _fmt(row.objective_w),
                    _fmt(row.objective_dbm),
                    _fmt(row.sum_rate_bpshz),
                    row.scheduled_mask,
                    row.iterations,
                    row.status,
                    _fmt(row.wall_ms),
                    row.seed,
                ]
            )
        for line in trailer:
            out.write(f"# {line}\n")
    finally:
        if path:
            out.close()


def _cmd_check(args) -> int:
    cfg, scn = parse_scenario(args.scenario)
    z = rayleigh_distance(cfg)
    print(
        f"ok: N={cfg.n_antennas} f={cfg.carrier_freq/1e9:g} GHz Z={z:.3f} m "
        f"r_min={fresnel_min_distance(cfg):.3f} m K={scn.n_eh} M={scn.n_id} "
        f"P0={watts_to_dbm(scn.p0):g} dBm R={scn.rate_floor:g} bps/Hz "
        f"hash={scenario_hash(cfg, scn)}"
    )
    return EXIT_OK


def _cmd_solve(args) -> int:
    cfg, scn = parse_scenario(args.scenario)
    opts = _solver_options(scn)
    mats = build_matrices(cfg, scn)
    scheme = SchemeId(args.scheme)
    start = time.perf_counter()
    report = run_scheme(scheme, mats, scn, opts)
    wall = (time.perf_counter() - start) * 1e3
    y = report.allocation
    solved = report.status is SolveStatus.OPTIMAL
    row = ResultRow(
        sweep_var="none",
        sweep_value=math.nan,
        scheme=scheme.value,
        objective_w=report.objective,
        objective_dbm=(
            watts_to_dbm(report.objective) if solved and report.objective > 0 else None
        ),
        sum_rate_bpshz=sum_rate(mats, scn.sigma2, y) if solved else math.nan,
        scheduled_mask=(
            "".join("1" if b else "0" for b in y.scheduled_mask(scn.p0)) if solved else ""
        ),
        iterations=report.iterations,
        status=report.status.value,
        wall_ms=wall if args.timing else None,
        seed=0,
    )
    alloc_str = " ".join(f"{p:.9e}" for p in y.powers)
    _write_rows(
        args.output,
        [row],
        {"scenario_sha256": scenario_hash(cfg, scn)},
        trailer=[f"allocation_W: {alloc_str}"],
    )
    log.info("solve %s -> %s (%s)", scheme.value, report.status.value, args.output or "stdout")
    if report.status is SolveStatus.OPTIMAL:
        return EXIT_OK
    if report.status is SolveStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_ITER_LIMIT


def _cmd_sweep(args) -> int:
    cfg, scn = parse_scenario(args.scenario)
    opts = _solver_options(scn)
    grid = tuple(float(v) for v in args.grid.split(","))
    if args.variable in ("K", "M"):
        grid = tuple(int(v) for v in grid)
    schemes = [SchemeId(s) for s in args.schemes.split(",")]
    spec = SweepSpec(
        variable=args.variable,
        grid=grid,
        seed=args.seed,
        draws=args.draws,
        record_timing=args.timing,
    )
    rows = run_sweep(spec, cfg, scn, schemes, opts)
    _write_rows(
        args.output,
        rows,
        {
            "seed": args.seed,
            "scenario_sha256": scenario_hash(cfg, scn),
            "variable": args.variable,
        },
    )
    return EXIT_OK if any(r.status == SolveStatus.OPTIMAL.value for r in rows) else EXIT_INFEASIBLE


def _cmd_correlate(args) -> int:
    cfg, scn = parse_scenario(args.scenario)
    mats = build_matrices(cfg, scn)
    z = rayleigh_distance(cfg)
    prefix = Path(args.output_prefix)

    with open(f"{prefix}_matrices.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["matrix", "row", "col", "value"])
        for name, mat in (("lambda_full", mats.lambda_full), ("lambda_masked", mats.lambda_masked)):
            for i in range(mats.n_slots):
                for j in range(mats.n_slots):
                    writer.writerow([name, i, j, _fmt(float(mat[i, j]))])

    if scn.eh_receivers:
        ref = scn.eh_receivers[0].location
    else:
        ref = PolarLocation(spatial_angle=0.0, distance=0.05 * z)
    if args.ref_theta is not None:
        ref = PolarLocation(
            spatial_angle=args.ref_theta,
            distance=(args.ref_r_over_z * z if args.ref_r_over_z else ref.distance),
        )
    rmin = fresnel_min_distance(cfg)
    thetas = np.linspace(-0.9, 0.9, args.grid_points)
    radii = np.geomspace(rmin, 3.0 * z, args.grid_points)
    with open(f"{prefix}_error_grid.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "r_m", "exact", "approx", "abs_err"])
        for theta in thetas:
            for r in radii:
                loc = PolarLocation(spatial_angle=float(theta), distance=float(r))
                exact = correlation_exact(cfg, ref, loc)
                try:
                    approx = correlation_approx(cfg, ref, loc)
                    err = abs(exact - approx)
                except DegenerateGeometryError:
                    approx, err = math.nan, math.nan
                writer.writerow(
                    [_fmt(float(theta)), _fmt(float(r)), _fmt(exact), _fmt(approx), _fmt(err)]
                )
    print(f"wrote {prefix}_matrices.csv and {prefix}_error_grid.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfswipt", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"mfswipt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scheme_names = [s.value for s in SchemeId]

    p_solve = sub.add_parser("solve", help="run one scheme on a scenario")
    p_solve.add_argument("scenario")
    p_solve.add_argument("--scheme", choices=scheme_names, default="proposed")
    p_solve.add_argument("--output", default=None, help="CSV path (default stdout)")
    p_solve.add_argument("--timing", action="store_true", help="record wall time")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run schemes across a parameter grid")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--variable", choices=["P0_dBm", "R", "K", "M"], required=True)
    p_sweep.add_argument("--grid", required=True, help="comma-separated grid values")
    p_sweep.add_argument(
        "--schemes", default=",".join(scheme_names), help="comma-separated scheme names"
    )
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--draws", type=int, default=1)
    p_sweep.add_argument("--output", default=None, help="CSV path (default stdout)")
    p_sweep.add_argument("--timing", action="store_true", help="record wall times")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_corr = sub.add_parser("correlate", help="dump coupling matrices and error grid")
    p_corr.add_argument("scenario")
    p_corr.add_argument("--output-prefix", default="correlation")
    p_corr.add_argument("--grid-points", type=int, default=50)
    p_corr.add_argument("--ref-theta", type=float, default=None)
    p_corr.add_argument("--ref-r-over-z", type=float, default=None)
    p_corr.set_defaults(func=_cmd_correlate)

    p_check = sub.add_parser("check", help="validate a scenario file")
    p_check.add_argument("scenario")
    p_check.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # pragma: no cover - final guard
        log.exception("unexpected failure")
        print(f"unexpected failure: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
