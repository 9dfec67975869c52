"""Design matrices and Householder-QR least squares.

The fitting core works on stacks of designs, ``(batch, n, p)``, so the
Monte Carlo harness can fit thousands of replications in one call.  The
single-fit API is a batch of one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import (
    DataError,
    InsufficientRows,
    MissingValue,
    NonBinaryGroup,
    NonNumericColumn,
    RankDeficient,
)
from .formula import ModelSpec

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class DesignMatrix:
    """``[1, group, covariates...]`` with the group coded 0 (reference) / 1."""

    values: np.ndarray
    column_names: tuple[str, ...]
    response: np.ndarray
    group_column_index: int = 1
    reference_level: str = "0"
    other_level: str = "1"
    rows_dropped: int = 0

    def __post_init__(self):
        self.values.setflags(write=False)
        self.response.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1] - 2

    @property
    def group(self) -> np.ndarray:
        return self.values[:, self.group_column_index]


@dataclass(frozen=True)
class RegressionFit:
    beta_hat: np.ndarray
    sigma2_hat: float
    m: int
    v_diag: np.ndarray
    n0: int
    n1: int
    column_names: tuple[str, ...] = ()
    group_index: int = 1

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @property
    def k(self) -> int:
        return len(self.beta_hat) - 2

    @property
    def sigma_hat(self) -> float:
        return float(np.sqrt(self.sigma2_hat))

    @property
    def beta1(self) -> float:
        return float(self.beta_hat[self.group_index])

    @property
    def v1_squared(self) -> float:
        return float(self.v_diag[self.group_index])


def _format_level(value) -> str:
    if isinstance(value, float):
        return format(value, "g")
    return str(value)


def build_design_matrix(dataset: Dataset, spec: ModelSpec, drop_missing: bool = False) -> DesignMatrix:
    """Lay out intercept, 0/1 group regressor and covariates in formula order.

    The reference level (coded 0) is ``spec.reference_level`` when given,
    otherwise the smaller of the two levels.  Rows with a missing value in
    any used column raise :class:`MissingValue` unless ``drop_missing``.
    """
    used = [spec.response, spec.group, *spec.covariates]
    for name in used:
        dataset.column(name)
    for name in (spec.response, *spec.covariates):
        if not dataset.is_numeric(name):
            raise NonNumericColumn(f"column {name!r} must be numeric")

    dropped = 0
    if dataset.n:
        missing = np.any([dataset.missing_mask(name) for name in used], axis=0)
        for name in (spec.response, *spec.covariates):
            missing |= ~np.isfinite(dataset.column(name)) & ~np.isnan(dataset.column(name))
        if missing.any():
            if not drop_missing:
                first = int(np.flatnonzero(missing)[0])
                bad = [nm for nm in used if dataset.missing_mask(nm)[first]] or used
                raise MissingValue(
                    f"{int(missing.sum())} row(s) with missing or non-finite values in used columns "
                    f"(first at data row {first + 1}, column {bad[0]!r}); pass drop_missing to drop them"
                )
            dropped = int(missing.sum())
            dataset = dataset.take(np.flatnonzero(~missing))

    n, k = dataset.n, spec.k
    if n <= 2 + k:
        raise InsufficientRows(f"need more than {2 + k} rows for {k} covariate(s), have {n}")

    raw = dataset.column(spec.group)
    levels = sorted(set(raw.tolist()))
    if len(levels) != 2:
        shown = ", ".join(_format_level(v) for v in levels[:5])
        raise NonBinaryGroup(f"group column {spec.group!r} must have exactly 2 levels, found {len(levels)}: {shown}")
    names = [_format_level(v) for v in levels]
    if spec.reference_level is None:
        ref = 0
    elif spec.reference_level in names:
        ref = names.index(spec.reference_level)
    else:
        try:
            ref = [float(v) for v in levels].index(float(spec.reference_level))
        except (ValueError, TypeError):
            raise DataError(
                f"reference level {spec.reference_level!r} is not a level of {spec.group!r} ({', '.join(names)})"
            ) from None
    group = (raw != levels[ref]).astype(float)

    columns = [np.ones(n), group] + [np.asarray(dataset.column(c), dtype=float) for c in spec.covariates]
    values = np.column_stack(columns)
    return DesignMatrix(
        values=values,
        column_names=("(Intercept)", spec.group, *spec.covariates),
        response=np.asarray(dataset.column(spec.response), dtype=float).copy(),
        group_column_index=1,
        reference_level=names[ref],
        other_level=names[1 - ref],
        rows_dropped=dropped,
    )


def householder_qr(a: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR of a stack of matrices, applying ``Q'`` to ``y``.

    ``a`` has shape ``(batch, n, p)``, ``y`` shape ``(batch, n)``.  Returns
    the upper-triangular ``R`` ``(batch, p, p)`` and ``Q'y`` ``(batch, n)``.
    No pivoting.
    """
    a = np.array(a, dtype=float)
    qty = np.array(y, dtype=float)
    p = a.shape[-1]
    for j in range(p):
        x = a[:, j:, j]
        norm = np.sqrt(np.einsum("bi,bi->b", x, x))
        alpha = np.where(x[:, 0] >= 0, -norm, norm)
        v = x.copy()
        v[:, 0] -= alpha
        vv = np.einsum("bi,bi->b", v, v)
        scale = np.divide(2.0, vv, out=np.zeros_like(vv), where=vv > 0)
        sub = a[:, j:, j:]
        sub -= (scale[:, None] * v)[:, :, None] * np.einsum("bi,bij->bj", v, sub)[:, None, :]
        seg = qty[:, j:]
        seg -= (scale * np.einsum("bi,bi->b", v, seg))[:, None] * v
    return np.triu(a[:, :p, :]), qty


def _back_substitute(r: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``R z = rhs`` for stacked upper-triangular ``R``; rhs ``(batch, p, q)``."""
    p = r.shape[-1]
    z = np.zeros_like(rhs)
    for i in range(p - 1, -1, -1):
        acc = rhs[:, i, :] - np.einsum("bj,bjq->bq", r[:, i, i + 1:], z[:, i + 1:, :])
        z[:, i, :] = acc / r[:, i, i][:, None]
    return z


def ols_fit_many(x: np.ndarray, y: np.ndarray):
    """Least squares for a stack of problems.

    Returns ``(beta, rss, v_diag, full_rank)``; rows with ``full_rank``
    False hold NaN.  ``v_diag`` is the diagonal of ``(X'X)^-1``, obtained by
    back-solving ``R`` against unit vectors.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 2:
        x = np.broadcast_to(x, (y.shape[0], *x.shape))
    batch, n, p = x.shape
    r, qty = householder_qr(x, y)
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    full_rank = np.all(diag >= n * _EPS * diag.max(axis=1, keepdims=True), axis=1) & (diag.max(axis=1) > 0)
    r_safe = np.where(full_rank[:, None, None], r, np.eye(p))

    beta = _back_substitute(r_safe, qty[:, :p, None])[:, :, 0]
    resid = qty[:, p:]
    rss = np.einsum("bi,bi->b", resid, resid)
    # exact fits leave only rounding noise in Q'y below row p
    floor = (n * _EPS) ** 2 * np.einsum("bi,bi->b", y, y)
    rss = np.where(rss <= floor, 0.0, rss)
    r_inv = _back_substitute(r_safe, np.broadcast_to(np.eye(p), (batch, p, p)).copy())
    v_diag = np.einsum("bij,bij->bi", r_inv, r_inv)

    nan = np.nan
    beta[~full_rank] = nan
    rss[~full_rank] = nan
    v_diag[~full_rank] = nan
    return beta, rss, v_diag, full_rank


def ols_fit(x: DesignMatrix | np.ndarray, y: np.ndarray | None = None, group_index: int = 1) -> RegressionFit:
    """Ordinary least squares via Householder QR.

    ``x`` is a :class:`DesignMatrix` (``y`` defaults to its response) or a
    plain ``n x (2+k)`` array whose column ``group_index`` holds the 0/1
    group coding.
    """
    if isinstance(x, DesignMatrix):
        names = x.column_names
        group_index = x.group_column_index
        y = x.response if y is None else y
        x = x.values
    else:
        x = np.asarray(x, dtype=float)
        names = tuple(f"x{j}" for j in range(x.shape[1]))
    y = np.asarray(y, dtype=float)
    n, p = x.shape
    if y.shape != (n,):
        raise DataError(f"response has length {len(y)}, design has {n} rows")
    if n <= p:
        raise InsufficientRows(f"need more than {p} rows, have {n}")

    beta, rss, v_diag, full_rank = ols_fit_many(x[None], y[None])
    if not full_rank[0]:
        raise RankDeficient("design matrix is not of full column rank")
    m = n - p
    n1 = int(np.count_nonzero(x[:, group_index] == 1.0))
    return RegressionFit(
        beta_hat=beta[0],
        sigma2_hat=float(rss[0] / m),
        m=m,
        v_diag=v_diag[0],
        n0=n - n1,
        n1=n1,
        column_names=names,
        group_index=group_index,
    )


def v1_squared_two_group(n0: int, n1: int) -> float:
    """``(n0 + n1) / (n0 n1)``: the group entry of ``(X'X)^-1`` without covariates."""
    if n0 < 1 or n1 < 1:
        raise InsufficientRows(f"both groups need at least one observation, got n0={n0}, n1={n1}")
    return (n0 + n1) / (n0 * n1)
