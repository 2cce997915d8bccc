"""Comparison schemes and parameter-sweep experiments.

Six schemes share one interface: the jointly optimized allocation
("proposed"), the brute-force schedule oracle, and four restricted
baselines (decoder-only optimization, greedy pairing, equal power over an
optimized or over the full schedule).  `run_sweep` drives them across a
grid of one system parameter and yields flat result rows ready for CSV.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .correlation import CorrelationMatrices, build_matrices
from .geometry import ArrayConfig, PolarLocation, aod_to_spatial_angle, rayleigh_distance
from .metrics import PowerAllocation, sum_rate, weighted_sum_power
from .scenario import Receiver, Scenario, dbm_to_watts, watts_to_dbm
from .solvers import (
    SolveReport,
    SolveStatus,
    SolverOptions,
    closed_form_mixed,
    exhaustive_search,
    sca_solve,
)

__all__ = ["SchemeId", "SweepSpec", "ResultRow", "run_scheme", "run_sweep"]


class SchemeId(Enum):
    PROPOSED = "proposed"
    EXHAUSTIVE = "exhaustive"
    FAR_FIELD_SWIPT = "far_field_swipt"
    GS_OPA = "gs_opa"
    OS_EPA = "os_epa"
    AS_EPA = "as_epa"


def _relabel(report: SolveReport, label: str) -> SolveReport:
    return SolveReport(
        allocation=report.allocation,
        objective=report.objective,
        trace=report.trace,
        status=report.status,
        residuals=report.residuals,
        scheme=label,
        iterations=report.iterations,
    )


def _equal_split_report(
    mats: CorrelationMatrices, scenario: Scenario, mask: np.ndarray, label: str
) -> SolveReport | None:
    """Equal power over the masked slots if that split meets the rate floor."""
    count = int(mask.sum())
    if count == 0:
        return None
    y = np.where(mask, scenario.p0 / count, 0.0)
    achieved = sum_rate(mats, scenario.sigma2, y)
    if achieved < scenario.rate_floor - 1e-9:
        return None
    obj = weighted_sum_power(mats, y)
    return SolveReport(
        allocation=PowerAllocation(y),
        objective=obj,
        trace=(obj,),
        status=SolveStatus.OPTIMAL,
        residuals={
            "rate_slack": achieved - scenario.rate_floor,
            "power_slack": 0.0,
        },
        scheme=label,
        iterations=0,
    )


def _infeasible(mats: CorrelationMatrices, label: str) -> SolveReport:
    return SolveReport(
        allocation=PowerAllocation(np.zeros(mats.n_slots)),
        objective=math.nan,
        trace=(),
        status=SolveStatus.INFEASIBLE,
        residuals={},
        scheme=label,
        iterations=0,
    )


def run_scheme(
    scheme: SchemeId,
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
) -> SolveReport:
    """Run one scheme on a prepared instance and return its report."""
    k, m, n = mats.n_eh, mats.n_id, mats.n_slots
    if scheme is SchemeId.PROPOSED:
        return sca_solve(mats, scenario, opts, scheme="proposed")

    if scheme is SchemeId.EXHAUSTIVE:
        return exhaustive_search(mats, scenario, opts)

    if scheme is SchemeId.FAR_FIELD_SWIPT:
        if m == 0:
            raise ValueError("far-field scheme needs at least one decoder")
        mask = np.zeros(n, dtype=bool)
        mask[k:] = True
        return sca_solve(mats, scenario, opts, mask, scheme="far_field_swipt")

    if scheme is SchemeId.GS_OPA:
        if k == 0 or m == 0:
            raise ValueError("greedy pairing needs a harvester and a decoder")
        best_eh = int(np.argmax(mats.priorities[:k]))
        best_id = int(np.argmax(mats.g_id))
        mask = np.zeros(n, dtype=bool)
        mask[best_eh] = True
        mask[k + best_id] = True
        return _relabel(closed_form_mixed(mats, scenario, mask), "gs_opa")

    if scheme is SchemeId.OS_EPA:
        best: SolveReport | None = None
        for code in range(1, 2**n):
            mask = np.array([(code >> (n - 1 - p)) & 1 for p in range(n)], dtype=bool)
            report = _equal_split_report(mats, scenario, mask, "os_epa")
            if report is not None and (best is None or report.objective > best.objective):
                best = report
        return best if best is not None else _infeasible(mats, "os_epa")

    if scheme is SchemeId.AS_EPA:
        mask = np.ones(n, dtype=bool)
        report = _equal_split_report(mats, scenario, mask, "as_epa")
        return report if report is not None else _infeasible(mats, "as_epa")

    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter experiment over `variable` in {P0_dBm, R, K, M}.

    For receiver-count sweeps the extra receivers beyond the base scenario
    are drawn once per Monte-Carlo draw from a seeded generator: uniform
    physical angle within +-60 degrees of broadside (converted to the
    spatial-angle coordinate) and uniform radius inside the stated
    Z-multiple annulus.  Grid point K reuses the first K - K_base of those
    draws, so successive points nest.  Added decoders inherit the first
    decoder's noise power.
    """

    variable: str
    grid: tuple
    seed: int = 0
    draws: int = 1
    eh_annulus: tuple[float, float] = (0.015, 0.3)
    id_annulus: tuple[float, float] = (1.05, 1.3)
    angle_halfwidth: float = math.pi / 3.0
    record_timing: bool = False

    def __post_init__(self):
        if self.variable not in {"P0_dBm", "R", "K", "M"}:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be non-empty")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("sweep grid must be sorted")
        if self.draws < 1:
            raise ValueError("draws must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    objective_w: float
    objective_dbm: float | None
    sum_rate_bpshz: float
    scheduled_mask: str
    iterations: int
    status: str
    wall_ms: float | None
    seed: int


def _draw_receiver(
    rng: np.random.Generator,
    cfg: ArrayConfig,
    annulus: tuple[float, float],
    halfwidth: float,
) -> Receiver:
    z = rayleigh_distance(cfg)
    phi = math.pi / 2.0 + rng.uniform(-halfwidth, halfwidth)
    theta = aod_to_spatial_angle(cfg, phi)
    r = rng.uniform(annulus[0] * z, annulus[1] * z)
    return Receiver(location=PolarLocation(spatial_angle=theta, distance=r))


def _scenario_for_point(
    spec: SweepSpec,
    cfg: ArrayConfig,
    base: Scenario,
    value,
    extra_eh: list[Receiver],
    extra_id: list[Receiver],
) -> Scenario:
    if spec.variable == "P0_dBm":
        return replace(base, p0=dbm_to_watts(float(value)))
    if spec.variable == "R":
        return replace(base, rate_floor=float(value))
    if spec.variable == "K":
        extra = int(value) - base.n_eh
        if extra < 0:
            raise ValueError(f"K grid value {value} below the base count {base.n_eh}")
        return replace(base, eh_receivers=base.eh_receivers + tuple(extra_eh[:extra]))
    extra = int(value) - base.n_id
    if extra < 0:
        raise ValueError(f"M grid value {value} below the base count {base.n_id}")
    if extra > 0 and not base.sigma2:
        raise ValueError("cannot add decoders to a scenario without a noise reference")
    sigma2 = base.sigma2 + tuple(base.sigma2[0] for _ in range(extra))
    return replace(
        base, id_receivers=base.id_receivers + tuple(extra_id[:extra]), sigma2=sigma2
    )


def run_sweep(
    spec: SweepSpec,
    cfg: ArrayConfig,
    base_scenario: Scenario,
    schemes: list[SchemeId],
    opts: SolverOptions = SolverOptions(),
) -> list[ResultRow]:
    """Execute every (grid point, scheme, draw) combination.

    Coupling matrices are rebuilt per point.  Failures of individual runs
    become rows with an error status instead of aborting the sweep.  Output
    order is grid-major and deterministic for a fixed (spec, seed); wall
    times are recorded only when the spec asks for them, keeping default
    output byte-reproducible.
    """
    rows: list[ResultRow] = []
    for draw in range(spec.draws):
        rng = np.random.default_rng([spec.seed, draw])
        extra_eh: list[Receiver] = []
        extra_id: list[Receiver] = []
        if spec.variable == "K":
            n_extra = max(int(v) for v in spec.grid) - base_scenario.n_eh
            extra_eh = [
                _draw_receiver(rng, cfg, spec.eh_annulus, spec.angle_halfwidth)
                for _ in range(max(n_extra, 0))
            ]
        elif spec.variable == "M":
            n_extra = max(int(v) for v in spec.grid) - base_scenario.n_id
            extra_id = [
                _draw_receiver(rng, cfg, spec.id_annulus, spec.angle_halfwidth)
                for _ in range(max(n_extra, 0))
            ]
        for value in spec.grid:
            try:
                scenario = _scenario_for_point(
                    spec, cfg, base_scenario, value, extra_eh, extra_id
                )
                mats = build_matrices(cfg, scenario)
            except Exception as exc:
                for scheme in schemes:
                    rows.append(
                        ResultRow(
                            sweep_var=spec.variable,
                            sweep_value=float(value),
                            scheme=scheme.value,
                            objective_w=math.nan,
                            objective_dbm=None,
                            sum_rate_bpshz=math.nan,
                            scheduled_mask="",
                            iterations=0,
                            status=f"Error: {exc}",
                            wall_ms=None,
                            seed=spec.seed,
                        )
                    )
                continue
            for scheme in schemes:
                start = time.perf_counter()
                try:
                    report = run_scheme(scheme, mats, scenario, opts)
                    status = report.status.value
                except Exception as exc:
                    report = None
                    status = f"Error: {exc}"
                wall = (time.perf_counter() - start) * 1e3
                if report is not None and report.status is SolveStatus.OPTIMAL:
                    y = report.allocation
                    obj = report.objective
                    row = ResultRow(
                        sweep_var=spec.variable,
                        sweep_value=float(value),
                        scheme=scheme.value,
                        objective_w=obj,
                        objective_dbm=watts_to_dbm(obj) if obj > 0 else None,
                        sum_rate_bpshz=sum_rate(mats, scenario.sigma2, y),
                        scheduled_mask="".join(
                            "1" if b else "0" for b in y.scheduled_mask(scenario.p0)
                        ),
                        iterations=report.iterations,
                        status=status,
                        wall_ms=wall if spec.record_timing else None,
                        seed=spec.seed,
                    )
                else:
                    row = ResultRow(
                        sweep_var=spec.variable,
                        sweep_value=float(value),
                        scheme=scheme.value,
                        objective_w=math.nan,
                        objective_dbm=None,
                        sum_rate_bpshz=math.nan,
                        scheduled_mask="",
                        iterations=0 if report is None else report.iterations,
                        status=status,
                        wall_ms=wall if spec.record_timing else None,
                        seed=spec.seed,
                    )
                rows.append(row)
    return rows
