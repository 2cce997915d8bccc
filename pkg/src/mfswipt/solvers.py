"""Optimization routines for joint beam scheduling and power allocation.

The master problem: maximize the weighted harvested sum-power c_eh' Lbar y
over allocations y >= 0 with 1'y <= P0 and a sum-rate floor over the
information decoders.  Binary scheduling is already eliminated (a slot is
scheduled iff its power entry is positive), so everything below works on the
continuous vector y.

Solvers provided:

* `fp_rate_max` - decoder-only sum-rate maximization by alternating
  closed-form ratio updates with an exactly solvable water-filling step;
  doubles as the feasibility oracle for the rate floor.
* `sca_solve` - outer linearization of the rate constraint around slack
  variables, each round solved by `inner_convex`, a log-barrier Newton
  method on the reduced allocation space.
* `closed_form_eh_only`, `closed_form_mixed` - stationarity-derived exact
  solutions for the harvester-only and single-decoder cases, with KKT
  residuals reported.
* `exhaustive_search` - brute force over all 2^(K+M) schedules, the
  benchmark oracle.

Every solver accepts an optional boolean `mask` pinning the complementary
slots to zero power; unscheduled harvesters still collect leakage in the
objective.  All routines are deterministic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .correlation import CorrelationMatrices
from .metrics import PowerAllocation, sum_rate
from .scenario import Scenario

__all__ = [
    "SolveStatus",
    "SolverOptions",
    "SlackVars",
    "SolveReport",
    "RateMaxResult",
    "FeasibilityResult",
    "SolverNumericalError",
    "NoFeasibleInterior",
    "fp_rate_max",
    "feasibility_check",
    "inner_convex",
    "sca_solve",
    "closed_form_eh_only",
    "closed_form_mixed",
    "exhaustive_search",
]

log = logging.getLogger(__name__)

LN2 = math.log(2.0)


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITER_LIMIT = "IterLimit"


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and iteration limits shared by every solver.

    convergence_threshold is the fractional objective increase below which
    the outer linearization loop stops.  The barrier block mirrors a
    textbook interior-point setup: start the barrier weight at barrier_t0,
    multiply by barrier_mu per centering round, run damped Newton to
    newton_tol, stop once the duality-gap bound drops under barrier_gap
    (in units of the normalized objective).
    """

    convergence_threshold: float = 1e-3
    max_outer_iters: int = 50
    barrier_t0: float = 1.0
    barrier_mu: float = 20.0
    newton_tol: float = 1e-9
    max_newton_steps: int = 100
    barrier_gap: float = 1e-9
    feasibility_tolerance: float = 1e-7
    fp_tolerance: float = 1e-11
    max_fp_iters: int = 3000

    def __post_init__(self):
        for name in (
            "convergence_threshold",
            "barrier_t0",
            "newton_tol",
            "barrier_gap",
            "feasibility_tolerance",
            "fp_tolerance",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.barrier_mu <= 1:
            raise ValueError("barrier_mu must be > 1")


@dataclass(frozen=True)
class SlackVars:
    """Reciprocal-signal and interference slack values, one pair per active decoder."""

    s: np.ndarray
    i: np.ndarray

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.s, dtype=float))
        i = np.atleast_1d(np.asarray(self.i, dtype=float))
        if (s <= 0).any() or (i <= 0).any():
            raise ValueError("slack variables must be positive")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "i", i)


@dataclass(frozen=True)
class SolveReport:
    allocation: PowerAllocation
    objective: float
    trace: tuple
    status: SolveStatus
    residuals: dict
    scheme: str
    iterations: int


@dataclass(frozen=True)
class RateMaxResult:
    r_star: float
    allocation: PowerAllocation
    gamma: np.ndarray
    iterations: int


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    r_star: float
    id_allocation: PowerAllocation


class SolverNumericalError(RuntimeError):
    """Numerical failure inside a solver; carries the last iterate."""

    def __init__(self, message: str, last_iterate: np.ndarray | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class NoFeasibleInterior(SolverNumericalError):
    """The convexified feasible set has no strict interior (rate floor tight)."""


# ---------------------------------------------------------------------------
# reduced problem data


class _Reduced:
    """Arrays of the allocation problem restricted to the active slots.

    x indexes active slots only.  For active decoder j (deployment index
    act_ids[j]): signal A_j(x) = gain_j * x[pos_j], interference-plus-noise
    B_j(x) = brow_j @ x + sigma2_j.  The objective keeps the full priority
    vector, so pinned harvesters still account for harvested leakage.
    """

    def __init__(self, mats: CorrelationMatrices, scenario: Scenario, mask: np.ndarray):
        self.idx = np.where(mask)[0]
        if len(self.idx) == 0:
            raise ValueError("mask must keep at least one slot active")
        k = mats.n_eh
        self.act_ids = [m for m in range(mats.n_id) if mask[k + m]]
        self.n = len(self.idx)
        self.w = mats.priorities[self.idx]
        self.p0 = scenario.p0
        self.rate_floor = scenario.rate_floor
        slots = k + np.array(self.act_ids, dtype=int)
        self.gain = mats.g_id[self.act_ids]
        self.sigma2 = np.array(scenario.sigma2)[self.act_ids]
        self.brow = self.gain[:, None] * mats.lambda_masked[np.ix_(slots, self.idx)]
        self.pos = np.array([int(np.where(self.idx == s)[0][0]) for s in slots], dtype=int)
        self.n_slots = mats.n_slots

    def embed(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros(self.n_slots)
        y[self.idx] = x
        return y

    def signal(self, x: np.ndarray) -> np.ndarray:
        return self.gain * x[self.pos]

    def interference(self, x: np.ndarray) -> np.ndarray:
        return self.brow @ x + self.sigma2

    def sum_rate(self, x: np.ndarray) -> float:
        if not self.act_ids:
            return 0.0
        return float(np.log2(1.0 + self.signal(x) / self.interference(x)).sum())


def _full_mask(mats: CorrelationMatrices, mask) -> np.ndarray:
    if mask is None:
        return np.ones(mats.n_slots, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (mats.n_slots,):
        raise ValueError(f"mask must have one entry per slot ({mats.n_slots})")
    return mask


def _infeasible_report(mats: CorrelationMatrices, scheme: str) -> SolveReport:
    return SolveReport(
        allocation=PowerAllocation(np.zeros(mats.n_slots)),
        objective=math.nan,
        trace=(),
        status=SolveStatus.INFEASIBLE,
        residuals={},
        scheme=scheme,
        iterations=0,
    )


def _objective(mats: CorrelationMatrices, y: np.ndarray) -> float:
    return float(mats.priorities @ y)


# ---------------------------------------------------------------------------
# decoder-only rate maximization (fractional programming)


def fp_rate_max(
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
    mask=None,
) -> RateMaxResult:
    """Maximize the decoder sum-rate with harvester powers pinned to zero.

    Alternates three exact updates until the sum-rate stalls: the ratio
    auxiliary gamma_m is set to the achieved SINR of decoder m, a second
    auxiliary decouples the remaining signal/total-power ratio, and the
    allocation step is a water-filling problem solved in closed form per
    slot under a bisected budget multiplier.  Each update can only raise
    the surrogate, so the sum-rate sequence is non-decreasing; at the fixed
    point gamma equals the achieved SINR exactly.
    """
    mask = _full_mask(mats, mask)
    k = mats.n_eh
    act = [m for m in range(mats.n_id) if mask[k + m]]
    if not act:
        raise ValueError("fp_rate_max needs at least one active decoder")
    slots = k + np.array(act, dtype=int)
    g = mats.g_id[act]
    s2 = np.array(scenario.sigma2)[act]
    eta = mats.lambda_masked[np.ix_(slots, slots)]
    p0 = scenario.p0
    n = len(act)

    x = np.full(n, p0 / n)

    def eval_rate(x):
        a = g * x
        b = g * (eta @ x) + s2
        return float(np.log2(1.0 + a / b).sum()), a, b

    prev, a, b = eval_rate(x)
    iters = 0
    for iters in range(1, opts.max_fp_iters + 1):
        gamma = a / b
        z = np.sqrt((1.0 + gamma) * a) / (a + b)
        u = z * np.sqrt((1.0 + gamma) * g)
        # linear price of each slot: own total-power coefficient plus leakage
        # into the other decoders' denominators
        w = (z**2) * g + (z**2 * g) @ eta
        x_free = (u / np.maximum(w, 1e-300)) ** 2
        if x_free.sum() <= p0:
            x = x_free
        else:
            lo, hi = 0.0, math.sqrt(float((u**2).sum()) / p0)
            for _ in range(100):
                lam = 0.5 * (lo + hi)
                if (((u / (w + lam)) ** 2).sum()) > p0:
                    lo = lam
                else:
                    hi = lam
            x = (u / (w + 0.5 * (lo + hi))) ** 2
            x *= p0 / x.sum()
        cur, a, b = eval_rate(x)
        if abs(cur - prev) <= opts.fp_tolerance * max(1.0, abs(prev)):
            prev = cur
            break
        prev = cur

    gamma = a / b  # final update: exact SINR at the returned allocation
    y = np.zeros(mats.n_slots)
    y[slots] = x
    return RateMaxResult(
        r_star=prev, allocation=PowerAllocation(y), gamma=gamma, iterations=iters
    )


def feasibility_check(
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
    mask=None,
) -> FeasibilityResult:
    """Rate floor attainable?  Compares the decoder-only maximum sum-rate against it."""
    mask = _full_mask(mats, mask)
    act_any = mask[mats.n_eh :].any()
    if not act_any:
        zero = PowerAllocation(np.zeros(mats.n_slots))
        return FeasibilityResult(
            feasible=scenario.rate_floor <= opts.feasibility_tolerance, r_star=0.0, id_allocation=zero
        )
    res = fp_rate_max(mats, scenario, opts, mask)
    feasible = res.r_star >= scenario.rate_floor - opts.feasibility_tolerance
    return FeasibilityResult(feasible=feasible, r_star=res.r_star, id_allocation=res.allocation)


# ---------------------------------------------------------------------------
# convexified subproblem: log-barrier Newton on the reduced allocation


def _bound_coeffs(s_tilde: np.ndarray, i_tilde: np.ndarray):
    """Tangent-plane coefficients of log2(1 + 1/(S I)) at the expansion point.

    The function is jointly convex in (S, I), so the tangent plane is a
    global lower bound; evaluating it at the slack lower bounds S = 1/A(y),
    I = B(y) yields a concave global lower bound G(y) on the true sum-rate.
    """
    a = (1.0 / LN2) / (s_tilde + s_tilde**2 * i_tilde)
    b = (1.0 / LN2) / (i_tilde + i_tilde**2 * s_tilde)
    c0 = np.log2(1.0 + 1.0 / (s_tilde * i_tilde))
    return a, b, c0


class _BoundModel:
    """G(y), gradient and Hessian data for the linearized rate bound."""

    def __init__(self, red: _Reduced, point: SlackVars):
        self.red = red
        self.a, self.b, self.c0 = _bound_coeffs(point.s, point.i)
        self.s_tilde = point.s
        self.i_tilde = point.i
        # constant part of the gradient: the interference rows enter linearly
        self.grad_lin = -(self.b[:, None] * red.brow).sum(axis=0)

    def value(self, x: np.ndarray) -> float:
        a_sig = self.red.signal(x)
        b_int = self.red.interference(x)
        return float(
            (self.c0 - self.a * (1.0 / a_sig - self.s_tilde) - self.b * (b_int - self.i_tilde)).sum()
        )

    def grad(self, x: np.ndarray) -> np.ndarray:
        g = self.grad_lin.copy()
        a_sig = self.red.signal(x)
        np.add.at(g, self.red.pos, self.a * self.red.gain / a_sig**2)
        return g

    def hess_diag(self, x: np.ndarray) -> np.ndarray:
        h = np.zeros(self.red.n)
        a_sig = self.red.signal(x)
        np.add.at(h, self.red.pos, -2.0 * self.a * self.red.gain**2 / a_sig**3)
        return h


def _interior_start(red: _Reduced, model: _BoundModel, opts: SolverOptions) -> np.ndarray:
    """Point with G(x) strictly above the floor, strictly inside the simplex.

    Tries a shrunk equal split, then pushes G uphill with a damped Newton
    ascent on the simplex-barriered surrogate.  Raises NoFeasibleInterior
    when the bound cannot clear the floor by any margin, which happens
    exactly when the current linearization is rate-tight.
    """
    floor = red.rate_floor
    margin = 1e-9 * max(1.0, abs(floor))
    x = np.full(red.n, 0.999 * red.p0 / red.n)
    if model.value(x) > floor + margin:
        return x
    x = np.full(red.n, 0.5 * red.p0 / red.n)
    t = 1.0
    best = x
    for _ in range(80):
        slack_p = red.p0 - x.sum()
        grad = -t * model.grad(x) + 1.0 / slack_p - 1.0 / x
        hess = np.ones((red.n, red.n)) / slack_p**2 + np.diag(1.0 / x**2)
        hess[np.diag_indices(red.n)] -= t * model.hess_diag(x)
        try:
            dx = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        # backtrack into the simplex while the surrogate decreases
        step = 1.0
        cur = -t * model.value(x) - math.log(slack_p) - float(np.log(x).sum())
        while step > 1e-14:
            xn = x + step * dx
            if (xn > 0).all() and xn.sum() < red.p0:
                nxt = (
                    -t * model.value(xn)
                    - math.log(red.p0 - xn.sum())
                    - float(np.log(xn).sum())
                )
                if nxt <= cur + 0.25 * step * float(grad @ dx):
                    break
            step *= 0.5
        if step <= 1e-14:
            t *= 4.0
            continue
        x = x + step * dx
        best = x
        if model.value(x) > floor + margin:
            return x
        if float(grad @ dx) > -opts.newton_tol:
            t *= 4.0
    raise NoFeasibleInterior(
        "rate floor is tight at the current linearization", last_iterate=best
    )


def inner_convex(
    point: SlackVars,
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
    mask=None,
) -> tuple[PowerAllocation, SlackVars]:
    """Solve one convexified round: maximize harvested power under the
    tangent lower bound on the sum-rate, the budget and nonnegativity.

    The slack pair (S, I) of each decoder enters the objective nowhere and
    the bound monotonically prefers both at their lower limits 1/A(y) and
    B(y), so they are eliminated exactly and the barrier runs over the
    allocation alone.  Returns the allocation and the slack values at it.
    """
    mask = _full_mask(mats, mask)
    red = _Reduced(mats, scenario, mask)
    if len(red.act_ids) != len(point.s):
        raise ValueError(
            f"linearization point has {len(point.s)} slack pairs for {len(red.act_ids)} active decoders"
        )
    model = _BoundModel(red, point)
    x0 = _interior_start(red, model, opts)
    x = _barrier_maximize(red, model, x0, opts)
    y = red.embed(x)
    slacks = SlackVars(s=1.0 / red.signal(x), i=red.interference(x))
    return PowerAllocation(y), slacks


def _barrier_maximize(
    red: _Reduced, model: _BoundModel, x0: np.ndarray, opts: SolverOptions
) -> np.ndarray:
    """Log-barrier with damped Newton steps on the reduced allocation.

    Maximizes w @ x (normalized) subject to G(x) >= floor, 1'x <= P0,
    x >= 0, starting from a strictly feasible x0.  When every objective
    coefficient is zero the roles flip and the total power is minimized,
    which pins down the unique least-budget point among the equally good
    ones.
    """
    n = red.n
    scale = float(red.w.max()) * red.p0
    if scale > 0:
        f0 = -red.w / (scale / red.p0)  # minimize; normalized to O(1)
    else:
        f0 = np.ones(n)  # tie-break: least total power
    floor = red.rate_floor
    n_constraints = n + 2

    def barrier(x, t):
        g_val = model.value(x) - floor
        slack_p = red.p0 - x.sum()
        if g_val <= 0 or slack_p <= 0 or (x <= 0).any():
            return None
        val = t * float(f0 @ x) - math.log(g_val) - math.log(slack_p) - float(np.log(x).sum())
        grad_g = model.grad(x)
        grad = t * f0 - grad_g / g_val + 1.0 / slack_p - 1.0 / x
        hess = np.outer(grad_g, grad_g) / g_val**2 + np.ones((n, n)) / slack_p**2
        hess[np.diag_indices(n)] += 1.0 / x**2 - model.hess_diag(x) / g_val
        return val, grad, hess

    x = x0.copy()
    t = opts.barrier_t0
    while True:
        for _ in range(opts.max_newton_steps):
            out = barrier(x, t)
            if out is None:
                raise SolverNumericalError("barrier iterate left the domain", last_iterate=x)
            val, grad, hess = out
            try:
                dx = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(hess, -grad, rcond=None)[0]
            decrement = float(-grad @ dx)
            if decrement / 2.0 <= opts.newton_tol:
                break
            step = 1.0
            while step > 1e-14:
                trial = barrier(x + step * dx, t)
                if trial is not None and trial[0] <= val + 0.25 * step * float(grad @ dx):
                    break
                step *= 0.5
            if step <= 1e-14:
                break
            x = x + step * dx
        if n_constraints / t < opts.barrier_gap:
            return x
        t *= opts.barrier_mu


# ---------------------------------------------------------------------------
# outer loop


def _lp_report(
    mats: CorrelationMatrices, scenario: Scenario, mask: np.ndarray, scheme: str
) -> SolveReport:
    """Exact solution when the rate floor is absent: a linear program over the
    simplex, optimized at the single active slot of highest priority."""
    idx = np.where(mask)[0]
    best = idx[int(np.argmax(mats.priorities[idx]))]
    y = np.zeros(mats.n_slots)
    y[best] = scenario.p0
    obj = _objective(mats, y)
    return SolveReport(
        allocation=PowerAllocation(y),
        objective=obj,
        trace=(obj,),
        status=SolveStatus.OPTIMAL,
        residuals={
            "rate_slack": sum_rate(mats, scenario.sigma2, y) - scenario.rate_floor,
            "power_slack": 0.0,
        },
        scheme=scheme,
        iterations=0,
    )


def sca_solve(
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
    mask=None,
    scheme: str = "proposed",
) -> SolveReport:
    """Successive convexification of the rate constraint.

    Starts from the decoder-only rate-maximizing allocation (feasible
    whenever the problem is), then repeats: expand the rate bound at the
    current slacks, solve the convexified round, move to its optimum.  Each
    round's feasible region contains the previous optimum and the bound
    touches the true rate there, so the objective trace is non-decreasing;
    the loop stops when the fractional increase falls under the threshold.
    """
    mask = _full_mask(mats, mask)
    red = _Reduced(mats, scenario, mask)

    if not red.act_ids:
        if scenario.rate_floor > opts.feasibility_tolerance:
            return _infeasible_report(mats, scheme)
        return _lp_report(mats, scenario, mask, scheme)
    if scenario.rate_floor <= 0:
        # the rate constraint is vacuous for nonnegative allocations
        return _lp_report(mats, scenario, mask, scheme)

    feas = feasibility_check(mats, scenario, opts, mask)
    if not feas.feasible:
        return _infeasible_report(mats, scheme)

    y = feas.id_allocation.powers.copy()
    trace = [_objective(mats, y)]
    status = SolveStatus.ITER_LIMIT
    iterations = 0
    for iterations in range(1, opts.max_outer_iters + 1):
        x = y[red.idx]
        point = SlackVars(s=1.0 / red.signal(x), i=red.interference(x))
        try:
            alloc, _ = inner_convex(point, mats, scenario, opts, mask)
        except NoFeasibleInterior:
            status = SolveStatus.OPTIMAL
            iterations -= 1
            break
        obj_new = _objective(mats, alloc.powers)
        trace.append(obj_new)
        if obj_new > trace[-2] or iterations == 1:
            y = alloc.powers
        if trace[-1] - trace[-2] < opts.convergence_threshold * max(abs(trace[-2]), 1e-300):
            status = SolveStatus.OPTIMAL
            break

    x = y[red.idx]
    achieved = red.sum_rate(x)
    return SolveReport(
        allocation=PowerAllocation(y),
        objective=_objective(mats, y),
        trace=tuple(trace),
        status=status,
        residuals={
            "rate_slack": achieved - scenario.rate_floor,
            "power_slack": scenario.p0 - float(y.sum()),
        },
        scheme=scheme,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# closed forms


def closed_form_eh_only(mats: CorrelationMatrices, scenario: Scenario) -> SolveReport:
    """Harvester-only allocation: the whole budget to the highest-priority harvester.

    Valid when no decoder is scheduled and the rate floor is zero.  The
    report carries the stationarity/complementarity residual of the
    underlying linear program, assembled numerically from the recovered
    multipliers.
    """
    k = mats.n_eh
    if k == 0:
        raise ValueError("no harvesters in the scenario")
    if mats.n_id > 0 and scenario.rate_floor > 0:
        raise ValueError("closed_form_eh_only needs a zero rate floor when decoders exist")
    rho_vec = mats.priorities
    rho = int(np.argmax(rho_vec[:k]))
    y = np.zeros(mats.n_slots)
    y[rho] = scenario.p0

    # multipliers: budget price tau = best priority, per-slot prices make the
    # gradient vanish; dual feasibility then requires every price >= 0
    tau = rho_vec[rho]
    mu = tau - rho_vec[:k]
    stationarity = -rho_vec[:k] + tau - mu
    comp_slack = mu @ y[:k]
    kkt_norm = float(
        np.linalg.norm(stationarity)
        + abs(comp_slack)
        + np.linalg.norm(np.minimum(mu, 0.0))
        + abs(y.sum() - scenario.p0)
    )
    obj = _objective(mats, y)
    return SolveReport(
        allocation=PowerAllocation(y),
        objective=obj,
        trace=(obj,),
        status=SolveStatus.OPTIMAL,
        residuals={"rate_slack": 0.0, "power_slack": 0.0, "kkt_norm": kkt_norm},
        scheme="eh_only",
        iterations=0,
    )


def closed_form_mixed(
    mats: CorrelationMatrices, scenario: Scenario, mask=None
) -> SolveReport:
    """Exact allocation with a single active decoder.

    If the highest-priority slot is a harvester, the decoder gets exactly
    the power that meets the rate floor with equality (accounting for the
    harvester beam's leakage into its denominator) and the harvester the
    rest, so the budget is tight by construction.  If the decoder slot
    itself has the highest priority, it takes the whole budget.  Infeasible
    when even the full budget cannot reach the floor.
    """
    mask = _full_mask(mats, mask)
    k = mats.n_eh
    act_ids = [m for m in range(mats.n_id) if mask[k + m]]
    if len(act_ids) != 1:
        raise ValueError("closed_form_mixed needs exactly one active decoder")
    m = act_ids[0]
    slot = k + m
    g = mats.g_id[m]
    s2 = scenario.sigma2[m]
    growth = 2.0**scenario.rate_floor - 1.0
    need = growth * s2 / g
    if scenario.p0 < need:
        return _infeasible_report(mats, "mixed_closed_form")

    idx = np.where(mask)[0]
    rho_vec = mats.priorities
    rho = int(idx[np.argmax(rho_vec[idx])])
    y = np.zeros(mats.n_slots)
    if rho == slot:
        y[slot] = scenario.p0
        nu = 0.0
        tau = rho_vec[slot]
    else:
        coupling = mats.lambda_masked[rho, slot]
        y[rho] = (scenario.p0 - need) / (growth * coupling + 1.0)
        y[slot] = scenario.p0 - y[rho]
        nu = (rho_vec[rho] - rho_vec[slot]) / (g * (1.0 + growth * coupling))
        tau = rho_vec[rho] - nu * growth * g * coupling

    # dual feasibility of every active slot; negative prices flag instances
    # where the priority ranking alone does not determine the optimum
    mu = np.array(
        [
            tau
            - rho_vec[p]
            + nu * (growth * g * mats.lambda_masked[slot, p] - (g if p == slot else 0.0))
            for p in idx
        ]
    )
    rate_residual = growth * (g * float(mats.lambda_masked[slot] @ y) + s2) - g * y[slot]
    achieved = math.log2(1.0 + g * y[slot] / (g * float(mats.lambda_masked[slot] @ y) + s2))
    kkt_norm = float(
        np.linalg.norm(np.minimum(mu, 0.0))
        + abs(float(mu @ y[idx]))
        + abs(y.sum() - scenario.p0)
        + (abs(rate_residual) / max(g, 1e-300) if rho != slot else 0.0)
    )
    obj = _objective(mats, y)
    return SolveReport(
        allocation=PowerAllocation(y),
        objective=obj,
        trace=(obj,),
        status=SolveStatus.OPTIMAL,
        residuals={
            "rate_slack": achieved - scenario.rate_floor,
            "power_slack": scenario.p0 - float(y.sum()),
            "kkt_norm": kkt_norm,
        },
        scheme="mixed_closed_form",
        iterations=0,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle


def exhaustive_search(
    mats: CorrelationMatrices,
    scenario: Scenario,
    opts: SolverOptions = SolverOptions(),
) -> SolveReport:
    """Brute force over all 2^(K+M) schedules, keeping the best optimized branch.

    Schedules without a decoder are skipped whenever the rate floor is
    positive; ties resolve to the lexicographically smallest schedule
    (slot 0 is the most significant position).
    """
    n = mats.n_slots
    if n > 20:
        raise ValueError(f"exhaustive search guard: {n} slots exceeds the 2^20 budget")
    best: SolveReport | None = None
    total_iters = 0
    for code in range(2**n):
        bits = [(code >> (n - 1 - p)) & 1 for p in range(n)]
        mask = np.array(bits, dtype=bool)
        schedule = "".join(map(str, bits))
        if not mask.any():
            log.debug("schedule %s -> empty", schedule)
            if scenario.rate_floor <= 0 and best is None:
                zero = PowerAllocation(np.zeros(n))
                best = SolveReport(
                    allocation=zero,
                    objective=0.0,
                    trace=(0.0,),
                    status=SolveStatus.OPTIMAL,
                    residuals={"rate_slack": 0.0, "power_slack": scenario.p0},
                    scheme="exhaustive",
                    iterations=0,
                )
            continue
        if scenario.rate_floor > 0 and not mask[mats.n_eh :].any():
            log.debug("schedule %s -> skipped (no decoder under a positive floor)", schedule)
            continue
        report = sca_solve(mats, scenario, opts, mask, scheme="exhaustive")
        total_iters += report.iterations
        log.debug(
            "schedule %s -> %s objective=%s", schedule, report.status.value, report.objective
        )
        if report.status is not SolveStatus.OPTIMAL:
            continue
        if best is None or report.objective > best.objective:
            best = report
    if best is None or best.status is not SolveStatus.OPTIMAL:
        return _infeasible_report(mats, "exhaustive")
    return SolveReport(
        allocation=best.allocation,
        objective=best.objective,
        trace=best.trace,
        status=best.status,
        residuals=best.residuals,
        scheme="exhaustive",
        iterations=total_iters,
    )
