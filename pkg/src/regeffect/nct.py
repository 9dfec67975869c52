"""Non-central t distribution t(m, tau).

The CDF sums the Poisson-mixture series

    F(t; m, tau) = Phi(-tau) + sum_j [p_j I_x(j + 1/2, m/2) + q_j I_x(j + 1, m/2)],
    x = t^2 / (t^2 + m),

for ``t >= 0``, starting at the Poisson mode ``j = floor(tau^2 / 2)`` and
walking outwards in both directions so that no weight underflows for large
``|tau|``.  Incomplete-beta values after the first one come from the
two-term recurrences, not fresh continued fractions.  Negative ``t`` goes
through ``F(t; m, tau) = 1 - F(-t; m, -tau)``.

Everything below is vectorised over numpy arrays; the scalar functions are
thin wrappers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BracketFailure, CDFSaturated, DomainError, NoConvergence
from .special import ln_gamma, regularized_incomplete_beta, std_normal_cdf

__all__ = [
    "CFactorMethod",
    "NctParams",
    "TAU_LIMIT",
    "c_factor",
    "nct_mean",
    "nct_variance",
    "nct_cdf",
    "nct_sf",
    "invert_noncentrality",
]

TAU_LIMIT = 1e3
SERIES_TOL = 1e-13
SF_RTOL = 1e-15
SERIES_MIN_TERMS = 2000
BISECT_WIDTH = 1e-10
_SQRT1_2 = 1.0 / math.sqrt(2.0)


class CFactorMethod(str, Enum):
    EXACT = "exact"
    HEDGES = "hedges"
    TRICOMI = "tricomi"
    LAFORGIA = "laforgia"


_MIN_M = {
    CFactorMethod.EXACT: 2,
    CFactorMethod.HEDGES: 2,
    CFactorMethod.TRICOMI: 1,
    CFactorMethod.LAFORGIA: 2,
}


def _check_df(m, minimum: int = 1) -> int:
    if isinstance(m, bool) or int(m) != m:
        raise DomainError(f"degrees of freedom must be an integer, got {m!r}")
    m = int(m)
    if m < minimum:
        raise DomainError(f"degrees of freedom must be >= {minimum}, got {m}")
    return m


def c_factor(m: int, method: CFactorMethod | str = CFactorMethod.EXACT) -> float:
    """Mean-inflation factor ``c(m)`` of t(m, tau), exactly or approximately.

    ``exact``     Gamma((m-1)/2) sqrt(m/2) / Gamma(m/2)
    ``hedges``    1 / (1 - 3/(4m - 1))
    ``tricomi``   1 + 3/(4m)
    ``laforgia``  sqrt(2m / (2m - 3))
    """
    method = CFactorMethod(method)
    m = _check_df(m, _MIN_M[method])
    if method is CFactorMethod.EXACT:
        return math.exp(ln_gamma((m - 1) / 2) + 0.5 * math.log(m / 2) - ln_gamma(m / 2))
    if method is CFactorMethod.HEDGES:
        return 1.0 / (1.0 - 3.0 / (4 * m - 1))
    if method is CFactorMethod.TRICOMI:
        return 1.0 + 3.0 / (4 * m)
    return math.sqrt(2 * m / (2 * m - 3))


@dataclass(frozen=True)
class NctParams:
    m: int
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "m", _check_df(self.m))
        if not math.isfinite(self.tau) or abs(self.tau) > TAU_LIMIT:
            raise DomainError(f"non-centrality must be finite with |tau| <= {TAU_LIMIT:g}")

    def mean(self) -> float:
        return nct_mean(self.m, self.tau)

    def variance(self) -> float:
        return nct_variance(self.m, self.tau)

    def cdf(self, x):
        return nct_cdf(x, self.m, self.tau)


def nct_mean(m: int, tau: float) -> float:
    """Mean of t(m, tau): ``c(m) * tau``. Needs ``m > 1``."""
    m = _check_df(m, 2)
    return c_factor(m) * tau


def nct_variance(m: int, tau: float) -> float:
    """Variance ``m/(m-2) + (m/(m-2) - c(m)^2) tau^2``. Needs ``m > 2``."""
    m = _check_df(m, 3)
    r = m / (m - 2)
    var = r + (r - c_factor(m) ** 2) * tau * tau
    if not var > 0:
        raise NoConvergence(f"non-positive variance {var!r} for m={m}, tau={tau}")
    return var


# --------------------------------------------------------------------------
# CDF


def _small(bound: np.ndarray, total: np.ndarray, relative: bool) -> np.ndarray:
    if relative:
        return bound <= SF_RTOL * np.abs(total)
    return bound < SERIES_TOL


def _series_nonneg(t: np.ndarray, m: np.ndarray, delta: np.ndarray, upper: bool = False) -> np.ndarray:
    """F(t; m, delta) for t >= 0 (1-d arrays of equal length).

    With ``upper`` the complementary series
    ``sum_j [p_j I_{1-x}(m/2, j + 1/2) + q_j I_{1-x}(m/2, j + 1)]`` gives
    ``1 - F`` directly, keeping relative accuracy far in the upper tail.
    """
    out = std_normal_cdf(delta if upper else -delta) if delta.size else np.empty(0)
    out = np.asarray(out, dtype=float).copy()
    # t so small that t^2 underflows behaves exactly like t = 0
    sel = np.flatnonzero(t * t > 0)
    if sel.size == 0:
        return out
    if upper:
        out[sel] = 0.0

    t, m, delta = t[sel], m[sel], delta[sel]
    b = 0.5 * m
    t2 = t * t
    x = t2 / (t2 + m)
    x1 = m / (t2 + m)
    lx = np.log(x)
    l1x = np.log(x1)
    y = 0.5 * delta * delta
    k = np.floor(y)
    with np.errstate(divide="ignore"):
        klogy = np.where(k > 0, k * np.log(np.where(y > 0, y, 1.0)), 0.0)

    p0 = 0.5 * np.exp(-y + klogy - ln_gamma(k + 1.0))
    q0 = 0.5 * delta * _SQRT1_2 * np.exp(-y + klogy - ln_gamma(k + 1.5))
    a_half = k + 0.5
    a_int = k + 1.0
    if upper:
        ia0 = regularized_incomplete_beta(b, a_half, x1)
        ib0 = regularized_incomplete_beta(b, a_int, x1)
        sign = 1.0
    else:
        ia0 = regularized_incomplete_beta(a_half, b, x)
        ib0 = regularized_incomplete_beta(a_int, b, x)
        sign = -1.0
    lgb = ln_gamma(b)
    ga0 = np.exp(ln_gamma(a_half + b) - ln_gamma(a_half + 1.0) - lgb + a_half * lx + b * l1x)
    gb0 = np.exp(ln_gamma(a_int + b) - ln_gamma(a_int + 1.0) - lgb + a_int * lx + b * l1x)

    total = p0 * ia0 + q0 * ib0
    max_terms = SERIES_MIN_TERMS + int(20.0 * math.sqrt(float(np.max(y))))

    with np.errstate(all="ignore"):
        # forward: j = k+1, k+2, ...; I_x(a+1, b) = I_x(a, b) - g(a)
        p, q, ia, ib, ga, gb = p0, q0, ia0, ib0, ga0, gb0
        ah, ai, j = a_half.copy(), a_int.copy(), k.copy()
        active = np.ones(sel.size, dtype=bool)
        for _ in range(max_terms):
            ia = ia + sign * ga
            ib = ib + sign * gb
            ga = ga * x * (ah + b) / (ah + 1.0)
            gb = gb * x * (ai + b) / (ai + 1.0)
            ah = ah + 1.0
            ai = ai + 1.0
            j = j + 1.0
            p = p * y / j
            q = q * y / (j + 0.5)
            total = np.where(active, total + p * ia + q * ib, total)
            r = y / (j + 1.0)
            bound = (p + np.abs(q)) * (1.0 if upper else np.clip(ia, 0.0, 1.0)) * r / (1.0 - r)
            active &= ~_small(bound, total, upper)
            if not active.any():
                break
        else:
            raise NoConvergence(f"non-central t series: forward sum exceeded {max_terms} terms")

        # backward: j = k-1, ..., 0
        p, q, ia, ib, ga, gb = p0, q0, ia0, ib0, ga0, gb0
        ah, ai, j = a_half.copy(), a_int.copy(), k.copy()
        active = k > 0
        for _ in range(max_terms):
            if not active.any():
                break
            ga = ga * ah / (x * (ah - 1.0 + b))
            gb = gb * ai / (x * (ai - 1.0 + b))
            ah = ah - 1.0
            ai = ai - 1.0
            ia = ia - sign * ga
            ib = ib - sign * gb
            p = p * j / y
            q = q * (j + 0.5) / y
            j = j - 1.0
            total = np.where(active, total + p * ia + q * ib, total)
            r = (j + 0.5) / y
            bound = (p + np.abs(q)) * (np.clip(ia, 0.0, 1.0) if upper else 1.0) * r / (1.0 - r)
            active &= (j > 0) & ~_small(bound, total, upper)
        else:
            if active.any():
                raise NoConvergence(f"non-central t series: backward sum exceeded {max_terms} terms")

    out[sel] = out[sel] + total
    return out


def _cdf_array(x: np.ndarray, m: np.ndarray, tau: np.ndarray) -> np.ndarray:
    neg = x < 0
    t = np.abs(x)
    delta = np.where(neg, -tau, tau)
    f = _series_nonneg(t.ravel(), m.ravel().astype(float), delta.ravel()).reshape(x.shape)
    f = np.clip(f, 0.0, 1.0)
    return np.where(neg, 1.0 - f, f)


def nct_cdf(x, m, tau):
    """CDF of the non-central t distribution with ``m`` df at ``x``.

    Broadcasts over array arguments.  Raises :class:`CDFSaturated` when
    ``|tau| > 1e3``; the exception's ``value`` holds the 0/1 limit.
    """
    scalar = np.ndim(x) == 0 and np.ndim(m) == 0 and np.ndim(tau) == 0
    x, m, tau = _validated(x, m, tau)
    out = _cdf_array(x, m, tau)
    return float(out) if scalar else out


def _validated(x, m, tau):
    x, m, tau = np.broadcast_arrays(np.asarray(x, float), np.asarray(m), np.asarray(tau, float))
    if not np.all(np.isfinite(x)):
        raise DomainError("nct_cdf requires finite x")
    if np.any(m < 1) or np.any(np.asarray(m, float) != np.floor(np.asarray(m, float))):
        raise DomainError("degrees of freedom must be integers >= 1")
    if not np.all(np.isfinite(tau)):
        raise DomainError("non-centrality must be finite")
    big = np.abs(tau) > TAU_LIMIT
    if big.any():
        limit = 0.0 if float(tau[big].flat[0]) > 0 else 1.0
        raise CDFSaturated(f"|tau| > {TAU_LIMIT:g}: CDF saturated at {limit:g}", limit)
    return x, m, tau


def nct_sf(x, m, tau):
    """Survival function ``1 - F(x; m, tau)``, accurate in the upper tail."""
    scalar = np.ndim(x) == 0 and np.ndim(m) == 0 and np.ndim(tau) == 0
    x, m, tau = _validated(x, m, tau)
    neg = x < 0
    t = np.abs(x).ravel()
    delta = np.where(neg, -tau, tau).ravel()
    mf = m.ravel().astype(float)
    f = np.empty_like(t)
    # x >= 0: complementary series; x < 0: P(T > x) = F(-x; m, -tau)
    pos = ~neg.ravel()
    f[pos] = _series_nonneg(t[pos], mf[pos], delta[pos], upper=True)
    f[~pos] = _series_nonneg(t[~pos], mf[~pos], delta[~pos])
    out = np.clip(f, 0.0, 1.0).reshape(x.shape)
    return float(out) if scalar else out


# --------------------------------------------------------------------------
# inversion over tau


def invert_many(x, m, prob) -> np.ndarray:
    """Vectorised :func:`invert_noncentrality` over broadcast arrays."""
    x, m, prob = np.broadcast_arrays(np.asarray(x, float), np.asarray(m), np.asarray(prob, float))
    shape = x.shape
    x, m, prob = x.ravel(), m.ravel().astype(float), prob.ravel()
    if not np.all((prob > 0.0) & (prob < 1.0)):
        raise DomainError("probability must lie strictly between 0 and 1")

    tau0 = np.clip(x * (1.0 - 1.0 / (4.0 * m)), -TAU_LIMIT, TAU_LIMIT)
    f0 = _cdf_array(x, m, tau0)
    # F decreases in tau: F(tau0) > prob means the root lies above tau0
    up = f0 > prob
    lo = tau0.copy()
    hi = tau0.copy()
    step = np.ones_like(tau0)
    pending = np.ones(x.size, dtype=bool)
    while pending.any():
        idx = np.flatnonzero(pending)
        base = np.where(up[idx], hi[idx], lo[idx])
        cand = np.where(up[idx], base + step[idx], base - step[idx])
        cand = np.clip(cand, -TAU_LIMIT, TAU_LIMIT)
        stuck = cand == base
        if stuck.any():
            raise BracketFailure(
                f"no root with |tau| <= {TAU_LIMIT:g} for x={x[idx][stuck][0]!r}, prob={prob[idx][stuck][0]!r}"
            )
        fc = _cdf_array(x[idx], m[idx], cand)
        found = np.where(up[idx], fc <= prob[idx], fc >= prob[idx])
        # the candidate becomes the new outer end; the old one tightens the inner end
        new_lo = np.where(up[idx], base, cand)
        new_hi = np.where(up[idx], cand, base)
        lo[idx] = np.where(up[idx] & ~found, cand, new_lo)
        hi[idx] = np.where(~up[idx] & ~found, cand, new_hi)
        step[idx] *= 2.0
        pending[idx] = ~found

    while True:
        wide = np.flatnonzero(hi - lo > BISECT_WIDTH)
        if wide.size == 0:
            break
        mid = 0.5 * (lo[wide] + hi[wide])
        fm = _cdf_array(x[wide], m[wide], mid)
        above = fm > prob[wide]
        lo[wide] = np.where(above, mid, lo[wide])
        hi[wide] = np.where(above, hi[wide], mid)
    return (0.5 * (lo + hi)).reshape(shape)


def invert_noncentrality(x: float, m: int, prob: float) -> float:
    """Non-centrality ``tau`` solving ``nct_cdf(x, m, tau) == prob``.

    Brackets by doubling steps from ``x (1 - 1/(4m))``, then bisects to a
    bracket width of 1e-10.
    """
    m = _check_df(m)
    if not 0.0 < prob < 1.0:
        raise DomainError("probability must lie strictly between 0 and 1")
    return float(invert_many(x, m, prob))
