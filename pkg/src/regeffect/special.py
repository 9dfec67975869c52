"""Scalar special functions used by the non-central t distribution.

All functions accept Python floats or numpy arrays. Scalar input gives a
Python float back, array input an ndarray of the broadcast shape.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NoConvergence

__all__ = [
    "ln_gamma",
    "ln_beta",
    "regularized_incomplete_beta",
    "std_normal_cdf",
]

# Godfrey's coefficients for the Lanczos approximation, g = 607/128, n = 15.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

CF_EPS = 1e-15
CF_MIN_ITER = 300
_TINY = 1e-300


def _scalar_out(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def _lanczos(x: np.ndarray) -> np.ndarray:
    # valid for x >= 0.5
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``.

    Lanczos approximation; arguments below 0.5 are shifted up by one with
    ``ln Gamma(x) = ln Gamma(x + 1) - ln x``.
    """
    scalar = np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    if not np.all(xa > 0) or not np.all(np.isfinite(xa)):
        raise DomainError("ln_gamma requires finite x > 0")
    small = xa < 0.5
    shifted = np.where(small, xa + 1.0, xa)
    out = _lanczos(shifted)
    out = np.where(small, out - np.log(xa), out)
    return _scalar_out(out, scalar)


def ln_beta(a, b):
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(np.add(a, b))


def _betacf(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    max_iter = int(max(CF_MIN_ITER, 10.0 * math.sqrt(float(np.max(np.maximum(a, b), initial=1.0)))))
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= CF_EPS
        if not active.any():
            return h
    raise NoConvergence(f"incomplete beta continued fraction did not converge in {max_iter} iterations")


def regularized_incomplete_beta(a, b, x):
    """Regularized incomplete beta function ``I_x(a, b)``.

    Continued fraction, evaluated on the reflected problem
    ``1 - I_{1-x}(b, a)`` when ``x > (a + 1) / (a + b + 2)``.
    Exact 0 at ``x == 0`` and exact 1 at ``x == 1``.
    """
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0 and np.ndim(x) == 0
    a, b, x = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(x, float))
    if not (np.all(a > 0) and np.all(b > 0)):
        raise DomainError("incomplete beta requires a > 0 and b > 0")
    if not np.all((x >= 0.0) & (x <= 1.0)):
        raise DomainError("incomplete beta requires 0 <= x <= 1")

    out = np.where(x >= 1.0, 1.0, 0.0)
    interior = (x > 0.0) & (x < 1.0)
    if interior.any():
        ai, bi, xi = a[interior], b[interior], x[interior]
        flip = xi > (ai + 1.0) / (ai + bi + 2.0)
        aa = np.where(flip, bi, ai)
        bb = np.where(flip, ai, bi)
        xx = np.where(flip, 1.0 - xi, xi)
        log_front = aa * np.log(xx) + bb * np.log1p(-xx) - ln_beta(aa, bb)
        val = np.exp(log_front) * _betacf(aa, bb, xx) / aa
        val = np.where(flip, 1.0 - val, val)
        out[interior] = np.clip(val, 0.0, 1.0)
    return _scalar_out(out, scalar)


_SQRT1_2 = 1.0 / math.sqrt(2.0)
_erfc = np.frompyfunc(math.erfc, 1, 1)


def std_normal_cdf(x):
    """Standard normal CDF, ``0.5 * erfc(-x / sqrt 2)``."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) * _SQRT1_2)
    xa = np.asarray(x, dtype=float)
    return 0.5 * _erfc(-xa * _SQRT1_2).astype(float)
