"""Confidence intervals for the effect size."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CDFSaturated, DomainError
from .nct import TAU_LIMIT, invert_many
from .special import std_normal_cdf

__all__ = ["ConfidenceInterval", "inversion_ci", "inversion_ci_many", "normal_ci", "normal_quantile"]


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise DomainError(f"interval bounds out of order: [{self.lower}, {self.upper}]")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def normal_quantile(p: float, tol: float = 1e-10) -> float:
    """Standard normal quantile by bisection on :func:`std_normal_cdf`."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if std_normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def inversion_tau_bounds(tau_hat, m, alpha: float):
    """Non-centrality bounds ``(tau_1, tau_2)`` with F(tau_1) = 1 - alpha/2, F(tau_2) = alpha/2."""
    _check_alpha(alpha)
    tau_hat = np.asarray(tau_hat, dtype=float)
    if np.any(np.abs(tau_hat) > TAU_LIMIT):
        raise CDFSaturated(f"|tau_hat| > {TAU_LIMIT:g}: interval endpoints saturate", math.nan)
    t1 = invert_many(tau_hat, m, 1.0 - alpha / 2.0)
    t2 = invert_many(tau_hat, m, alpha / 2.0)
    return t1, t2


def inversion_ci(d_hat: float, m: int, v1sq: float, alpha: float = 0.05) -> ConfidenceInterval:
    """Interval for ``d`` by inverting the non-central t CDF over its non-centrality."""
    if not v1sq > 0:
        raise DomainError("v1_squared must be positive")
    root = math.sqrt(v1sq)
    t1, t2 = inversion_tau_bounds(d_hat / root, m, alpha)
    return ConfidenceInterval(float(t1) * root, float(t2) * root, 1.0 - alpha, "inversion")


def inversion_ci_many(d_hat: np.ndarray, m: int, v1sq: np.ndarray, alpha: float = 0.05):
    """Arrays ``(lower, upper)`` for many estimates at once."""
    root = np.sqrt(np.asarray(v1sq, dtype=float))
    t1, t2 = inversion_tau_bounds(np.asarray(d_hat, dtype=float) / root, m, alpha)
    return t1 * root, t2 * root


def normal_ci(d_u: float, se: float, alpha: float = 0.05) -> ConfidenceInterval:
    """``d_u -/+ z se`` with ``z`` the exact ``1 - alpha/2`` normal quantile."""
    _check_alpha(alpha)
    z = normal_quantile(1.0 - alpha / 2.0)
    return ConfidenceInterval(d_u - z * se, d_u + z * se, 1.0 - alpha, "normal")
