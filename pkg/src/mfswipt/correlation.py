"""Steering-vector correlations, exact and Fresnel-approximate, and the
coupling matrices that turn receiver geometry into a power-allocation problem.

The squared correlation eta^2(p, q) = |v_p^H v_q|^2 between two steering
vectors measures how much power a beam aimed at q leaks to p.  Collecting
every pairwise value gives the coupling matrix Lambda; zeroing the diagonal
entries of the decoder slots (decoders do not harvest their own beam's
energy budget twice) gives the masked variant used throughout the solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .geometry import (
    ArrayConfig,
    PolarLocation,
    channel_gain,
    far_steering,
    near_steering,
    warn_if_outside_fresnel,
)
from .scenario import Scenario

__all__ = [
    "FresnelPair",
    "DegenerateGeometryError",
    "CorrelationMatrices",
    "fresnel",
    "correlation_exact",
    "correlation_approx",
    "build_matrices",
    "eh_priority",
]


class DegenerateGeometryError(ValueError):
    """The closed-form correlation is undefined: both locations share the
    same effective curvature (1 - theta^2)/r, so the Fresnel argument
    collapses to zero.  Fall back to correlation_exact."""


@dataclass(frozen=True)
class FresnelPair:
    """Values of the cosine and sine Fresnel integrals at one argument."""

    c_val: float
    s_val: float


def fresnel(beta: float) -> FresnelPair:
    """Fresnel integrals C(beta) = int_0^beta cos(pi t^2/2) dt and the sine analogue."""
    if not math.isfinite(beta):
        raise ValueError(f"fresnel needs a finite argument, got {beta}")
    s, c = special.fresnel(beta)
    return FresnelPair(c_val=float(c), s_val=float(s))


def _steering(cfg: ArrayConfig, loc: PolarLocation) -> np.ndarray:
    return far_steering(cfg, loc.spatial_angle) if loc.is_far_field else near_steering(cfg, loc)


def correlation_exact(cfg: ArrayConfig, loc_p: PolarLocation, loc_q: PolarLocation) -> float:
    """|v_p^H v_q| by direct N-term summation; far-field locations use the planar vector."""
    val = abs(np.vdot(_steering(cfg, loc_p), _steering(cfg, loc_q)))
    return min(float(val), 1.0)


def _curvature(loc: PolarLocation) -> float:
    # far-field sentinel: 1/r -> 0
    if loc.is_far_field:
        return 0.0
    return (1.0 - loc.spatial_angle**2) / loc.distance


def correlation_approx(cfg: ArrayConfig, loc_p: PolarLocation, loc_q: PolarLocation) -> float:
    """Closed-form correlation via shifted Fresnel integrals.

    With kappa = d * |(1-theta_p^2)/r_p - (1-theta_q^2)/r_q|, the arguments
    are b1 = (theta_q - theta_p)/sqrt(kappa) and b2 = (N/2) sqrt(kappa), and
    the correlation is |Chat + j Shat| / (2 b2) where Chat, Shat are the
    Fresnel integral differences over [b1 - b2, b1 + b2].

    Raises DegenerateGeometryError when the curvatures coincide (b2 = 0);
    callers fall back to correlation_exact.
    """
    kappa = cfg.d * abs(_curvature(loc_p) - _curvature(loc_q))
    if kappa == 0.0:
        raise DegenerateGeometryError(
            "equal effective curvatures; use correlation_exact for this pair"
        )
    root = math.sqrt(kappa)
    b1 = (loc_q.spatial_angle - loc_p.spatial_angle) / root
    b2 = cfg.n_antennas / 2.0 * root
    s_plus, c_plus = special.fresnel(b1 + b2)
    s_minus, c_minus = special.fresnel(b1 - b2)
    c_hat = c_plus - c_minus
    s_hat = s_plus - s_minus
    return float(abs(complex(c_hat, s_hat)) / (2.0 * b2))


@dataclass(frozen=True)
class CorrelationMatrices:
    """Pairwise beam couplings plus the linear coefficients of the allocation problem.

    Slot order is [harvesters 0..K-1, decoders K..K+M-1].  `c_eh` carries
    alpha_k * zeta * g_k for harvester slots (zeros on decoder slots), so the
    weighted harvested sum-power of an allocation y is c_eh @ lambda_masked @ y.
    `c_id` row m is zero except for the decoder gain g_m at slot K+m.
    """

    lambda_full: np.ndarray
    lambda_masked: np.ndarray
    c_eh: np.ndarray
    c_id: np.ndarray
    g_eh: np.ndarray
    g_id: np.ndarray
    alpha: np.ndarray
    zeta: float

    @property
    def n_eh(self) -> int:
        return len(self.g_eh)

    @property
    def n_id(self) -> int:
        return len(self.g_id)

    @property
    def n_slots(self) -> int:
        return self.lambda_full.shape[0]

    @property
    def priorities(self) -> np.ndarray:
        """Marginal weighted harvested power per allocated watt, per slot."""
        return self.c_eh @ self.lambda_masked


def build_matrices(cfg: ArrayConfig, scenario: Scenario) -> CorrelationMatrices:
    """Evaluate every pairwise coupling of the deployment by exact summation.

    The Fresnel closed form exists for validation studies only; matrix
    entries always come from the N-term inner products so the optimizers
    never inherit its approximation error.
    """
    locs = [r.location for r in scenario.eh_receivers] + [
        r.location for r in scenario.id_receivers
    ]
    for i, rec in enumerate(scenario.eh_receivers):
        warn_if_outside_fresnel(cfg, rec.location, label=f"harvester {i}")
    k, m = scenario.n_eh, scenario.n_id
    # harvesters carry spherical-wavefront vectors, decoders planar ones; a
    # decoder's finite distance only sets its gain
    vecs = np.array(
        [near_steering(cfg, loc) for loc in locs[:k]]
        + [far_steering(cfg, loc.spatial_angle) for loc in locs[k:]]
    )
    inner = vecs.conj() @ vecs.T
    lam = np.minimum(np.abs(inner) ** 2, 1.0)
    np.fill_diagonal(lam, 1.0)
    lam = (lam + lam.T) / 2.0

    masked = lam.copy()
    for j in range(k, k + m):
        masked[j, j] = 0.0

    g_eh = np.array([channel_gain(cfg, loc) for loc in locs[:k]])
    g_id = np.array([channel_gain(cfg, loc) for loc in locs[k:]])
    alpha = np.array([r.weight for r in scenario.eh_receivers])
    c_eh = np.concatenate([alpha * scenario.zeta * g_eh, np.zeros(m)])
    c_id = np.zeros((m, k + m))
    for j in range(m):
        c_id[j, k + j] = g_id[j]

    return CorrelationMatrices(
        lambda_full=lam,
        lambda_masked=masked,
        c_eh=c_eh,
        c_id=c_id,
        g_eh=g_eh,
        g_id=g_id,
        alpha=alpha,
        zeta=scenario.zeta,
    )


def eh_priority(mats: CorrelationMatrices) -> tuple[int, np.ndarray]:
    """Harvesting priority of every slot and the argmax (ties go to the lowest index).

    Slot p's priority is the weighted power harvested across all harvesters
    per watt allocated to p, including decoder slots whose beams charge the
    harvesters through leakage.
    """
    rho = mats.priorities
    return int(np.argmax(rho)), rho
