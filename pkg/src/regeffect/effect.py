"""Effect-size estimators for a two-group difference, with or without covariates.

Sign convention: group 1 minus group 0, the same sign as the regression
coefficient of the group indicator.  All bias corrections use the exact
``c(m)``; the approximations in :mod:`regeffect.nct` are for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateVariance, DomainError, NumericalError
from .linalg import RegressionFit
from .nct import c_factor

__all__ = [
    "EffectSizeEstimate",
    "MomentPair",
    "cohens_d",
    "cohens_d_classic",
    "cohens_d_from_t",
    "hedges_g",
    "se_hedges_g",
    "dhat_moments",
    "f_squared",
    "tau_hat",
    "estimate",
    "effect_label",
]


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float


@dataclass(frozen=True)
class EffectSizeEstimate:
    d_hat: float
    d_u: float
    se_d_u: float
    tau_hat: float
    v1_squared: float
    m: int
    f_squared: float
    c_m: float


def cohens_d(fit: RegressionFit) -> float:
    """``beta_1 / sigma_hat`` from a regression fit."""
    if not fit.sigma2_hat > 0:
        raise DegenerateVariance("residual variance is zero (perfect fit); d is undefined")
    return fit.beta1 / math.sqrt(fit.sigma2_hat)


def cohens_d_classic(mean0: float, mean1: float, q0: float, q1: float, n0: int, n1: int) -> float:
    """Mean difference over the pooled SD ``sqrt((Q0 + Q1) / (n0 + n1 - 2))``.

    ``q0`` and ``q1`` are within-group sums of squared deviations.
    """
    if n0 + n1 <= 2:
        raise DomainError("need n0 + n1 > 2")
    pooled = (q0 + q1) / (n0 + n1 - 2)
    if not pooled > 0:
        raise DegenerateVariance("pooled variance is zero")
    return (mean1 - mean0) / math.sqrt(pooled)


def cohens_d_from_t(t: float, n0: int, n1: int) -> float:
    if n0 < 1 or n1 < 1:
        raise DomainError("group sizes must be positive")
    return t * math.sqrt((n0 + n1) / (n0 * n1))


def hedges_g(d_hat: float, m: int) -> float:
    """Unbiased estimate ``d_hat / c(m)``."""
    return d_hat / c_factor(m)


def se_hedges_g(d_u: float, m: int, v1sq: float) -> float:
    if m <= 2:
        raise DomainError(f"standard error needs m > 2, got {m}")
    r = m / (c_factor(m) ** 2 * (m - 2))
    radicand = r * v1sq + (r - 1.0) * d_u * d_u
    if not radicand > 0:
        raise NumericalError(f"standard error radicand is not positive ({radicand!r})")
    return math.sqrt(radicand)


def dhat_moments(d: float, m: int, v1sq: float) -> MomentPair:
    """Exact mean and variance of ``d_hat`` when the true effect is ``d``."""
    if m <= 2:
        raise DomainError(f"variance of d_hat needs m > 2, got {m}")
    c = c_factor(m)
    r = m / (m - 2)
    return MomentPair(mean=c * d, variance=r * v1sq + (r - c * c) * d * d)


def f_squared(d_hat: float, m: int, v1sq: float) -> float:
    return d_hat * d_hat / (m * v1sq)


def tau_hat(d_hat: float, v1sq: float) -> float:
    return d_hat / math.sqrt(v1sq)


def estimate(fit: RegressionFit) -> EffectSizeEstimate:
    d = cohens_d(fit)
    v1sq = fit.v1_squared
    c = c_factor(fit.m)
    d_u = d / c
    return EffectSizeEstimate(
        d_hat=d,
        d_u=d_u,
        se_d_u=se_hedges_g(d_u, fit.m, v1sq),
        tau_hat=tau_hat(d, v1sq),
        v1_squared=v1sq,
        m=fit.m,
        f_squared=f_squared(d, fit.m, v1sq),
        c_m=c,
    )


def effect_label(d: float) -> str:
    """Conventional wording for ``|d|`` (0.2 small, 0.5 medium, 0.8 large)."""
    a = abs(d)
    if a < 0.2:
        return "negligible"
    if a < 0.5:
        return "small"
    if a < 0.8:
        return "medium"
    return "large"
