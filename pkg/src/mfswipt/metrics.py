"""Rate and harvested-power evaluation for a given power allocation.

Allocations live in the eliminated-binary form: a nonnegative vector y with
one entry per slot, where a positive entry means the slot's beam is
scheduled with that transmit power.  Everything here is a pure function of
(coupling matrices, allocation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationMatrices
from .scenario import NonlinearEhParams

__all__ = [
    "SCHEDULING_EPS",
    "PowerAllocation",
    "MetricsReport",
    "id_rate",
    "eh_power",
    "weighted_sum_power",
    "sum_rate",
    "evaluate",
    "nonlinear_eh",
]

# fraction of the budget below which a solver residual does not count as scheduled
SCHEDULING_EPS = 1e-6


@dataclass(frozen=True)
class PowerAllocation:
    """Per-slot transmit powers [harvesters..., decoders...] in watts."""

    powers: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=float)
        if p.ndim != 1:
            raise ValueError("powers must be a 1-D vector")
        if (p < 0).any():
            raise ValueError("powers must be nonnegative")
        object.__setattr__(self, "powers", p)

    @property
    def total(self) -> float:
        return float(self.powers.sum())

    def scheduled_mask(self, budget: float) -> np.ndarray:
        """Support of the allocation; entries above SCHEDULING_EPS * budget count."""
        return self.powers > SCHEDULING_EPS * budget


@dataclass(frozen=True)
class MetricsReport:
    per_id_rate: np.ndarray
    sum_rate: float
    per_eh_power: np.ndarray
    weighted_sum_power: float
    total_tx_power: float


def _as_vector(y) -> np.ndarray:
    if isinstance(y, PowerAllocation):
        return y.powers
    return np.asarray(y, dtype=float)


def id_rate(mats: CorrelationMatrices, sigma2, y, m: int) -> float:
    """Achievable rate of decoder m in bps/Hz.

    The masked coupling matrix has a zero at the decoder's own slot, so the
    interference term sums every other scheduled beam's leakage.
    """
    yv = _as_vector(y)
    s2 = np.asarray(sigma2, dtype=float)
    signal = float(mats.c_id[m] @ yv)
    interference = float(mats.c_id[m] @ mats.lambda_masked @ yv)
    return float(np.log2(1.0 + signal / (interference + s2[m])))


def sum_rate(mats: CorrelationMatrices, sigma2, y) -> float:
    return float(sum(id_rate(mats, sigma2, y, m) for m in range(mats.n_id)))


def eh_power(mats: CorrelationMatrices, y, k: int) -> float:
    """Power harvested by receiver k: own beam plus leakage from every other beam."""
    yv = _as_vector(y)
    return float(mats.zeta * mats.g_eh[k] * (mats.lambda_masked[k] @ yv))


def weighted_sum_power(mats: CorrelationMatrices, y) -> float:
    """Weighted harvested sum-power; identical to sum(alpha_k * eh_power(k))."""
    yv = _as_vector(y)
    return float(mats.c_eh @ mats.lambda_masked @ yv)


def evaluate(mats: CorrelationMatrices, sigma2, y) -> MetricsReport:
    yv = _as_vector(y)
    rates = np.array([id_rate(mats, sigma2, yv, m) for m in range(mats.n_id)])
    powers = np.array([eh_power(mats, yv, k) for k in range(mats.n_eh)])
    return MetricsReport(
        per_id_rate=rates,
        sum_rate=float(rates.sum()),
        per_eh_power=powers,
        weighted_sum_power=weighted_sum_power(mats, yv),
        total_tx_power=float(yv.sum()),
    )


def nonlinear_eh(q_rf: float, params: NonlinearEhParams) -> float:
    """Logistic rectifier output for RF input q_rf, normalized to zero at zero input.

    Saturates at params.kappa for large inputs and is monotone non-decreasing.
    """
    if q_rf < 0:
        raise ValueError(f"RF input power must be >= 0, got {q_rf}")
    omega = 1.0 / (1.0 + np.exp(params.varrho * params.varpi))
    psi = params.kappa / (1.0 + np.exp(-params.varrho * (q_rf - params.varpi)))
    return float((psi - params.kappa * omega) / (1.0 - omega))
