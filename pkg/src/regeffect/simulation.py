"""Monte Carlo check of the sampling behaviour of d_hat, d_u and both intervals.

Each replication draws ``y = X beta + sigma * eps`` with the group column
fixed (``n0`` zeros then ``n1`` ones), refits by least squares and records
the estimates and intervals.  Extra covariates are standard normal and are
redrawn every replication unless ``fixed_design`` is set, in which case one
design is drawn and reused.

Random streams are keyed by replication index, and aggregates use
``math.fsum``, so a report depends only on the config (not on ``chunk``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, RankDeficient
from .intervals import inversion_ci_many, normal_quantile
from .linalg import ols_fit_many
from .nct import c_factor
from .rng import CounterRNG

MAX_CONSECUTIVE_RANK_FAILURES = 100
_ERRORS, _COVARIATES = 0, 1
_FIXED_DESIGN_REP = 2**40


@dataclass(frozen=True)
class SimConfig:
    n0: int
    n1: int
    k: int
    beta: tuple[float, ...]
    sigma: float
    alpha: float = 0.05
    reps: int = 1000
    seed: int = 0
    fixed_design: bool = False

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if self.n0 < 1 or self.n1 < 1:
            raise ConfigError("n0 and n1 must be at least 1")
        if self.k < 0:
            raise ConfigError("k must be non-negative")
        if len(self.beta) != 2 + self.k:
            raise ConfigError(f"beta needs 2 + k = {2 + self.k} entries, got {len(self.beta)}")
        if self.n0 + self.n1 <= 3 + self.k:
            raise ConfigError(f"need n0 + n1 > {3 + self.k} so that m > 1")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.m <= 2:
            raise ConfigError(f"residual degrees of freedom m = {self.m} must exceed 2")

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @property
    def m(self) -> int:
        return self.n - 2 - self.k

    @property
    def d(self) -> float:
        return self.beta[1] / self.sigma


@dataclass(frozen=True)
class SimulationReport:
    mean_d_hat: float
    mean_d_u: float
    theoretical_mean: float
    empirical_var_d_hat: float
    theoretical_var: float
    coverage_inversion: float
    coverage_normal: float
    reps_used: int
    true_d: float
    m: int
    mean_v1_squared: float
    mc_se_mean: float
    mc_se_var: float
    rank_retries: int

    def to_dict(self) -> dict:
        return asdict(self)


def _design_stack(cfg: SimConfig, rng: CounterRNG, reps: np.ndarray) -> tuple[np.ndarray, int]:
    """Designs for the given replications, redrawing rank-deficient ones."""
    n, k = cfg.n, cfg.k
    base = np.zeros((n, 2 + k))
    base[:, 0] = 1.0
    base[cfg.n0:, 1] = 1.0
    if k == 0:
        return np.broadcast_to(base, (reps.size, n, 2)), 0

    def draw(rep_ids, attempt):
        streams = (rep_ids.astype(np.uint64) << np.uint64(8)) | np.uint64((attempt << 1) | _COVARIATES)
        x = np.broadcast_to(base, (rep_ids.size, n, 2 + k)).copy()
        x[:, :, 2:] = rng.normals(streams, n * k).reshape(rep_ids.size, n, k)
        return x

    if cfg.fixed_design:
        x = draw(np.array([_FIXED_DESIGN_REP]), 0)
        if not ols_fit_many(x, np.zeros((1, n)))[3][0]:
            raise RankDeficient("fixed simulation design is rank deficient")
        return np.broadcast_to(x[0], (reps.size, n, 2 + k)), 0

    x = draw(reps, 0)
    retries = 0
    bad = ~ols_fit_many(x, np.zeros((reps.size, n)))[3]
    attempt = 0
    while bad.any():
        attempt += 1
        if attempt >= MAX_CONSECUTIVE_RANK_FAILURES:
            raise RankDeficient(f"{MAX_CONSECUTIVE_RANK_FAILURES} consecutive rank-deficient designs")
        idx = np.flatnonzero(bad)
        retries += idx.size
        x[idx] = draw(reps[idx], attempt)
        bad[idx] = ~ols_fit_many(x[idx], np.zeros((idx.size, n)))[3]
    return x, retries


def simulate_replications(cfg: SimConfig, start: int, stop: int) -> dict[str, np.ndarray]:
    """Per-replication results for replication indices ``start <= r < stop``."""
    rng = CounterRNG(cfg.seed)
    reps = np.arange(start, stop, dtype=np.int64)
    x, retries = _design_stack(cfg, rng, reps)
    eps = rng.normals((reps.astype(np.uint64) << np.uint64(8)) | np.uint64(_ERRORS), cfg.n)
    y = np.einsum("bij,j->bi", x, np.asarray(cfg.beta)) + cfg.sigma * eps

    beta, rss, v_diag, full_rank = ols_fit_many(x, y)
    if not full_rank.all():
        raise RankDeficient("rank-deficient design slipped through")
    m = cfg.m
    c = c_factor(m)
    d_hat = beta[:, 1] / np.sqrt(rss / m)
    v1sq = v_diag[:, 1]
    d_u = d_hat / c
    r = m / (c * c * (m - 2))
    se = np.sqrt(r * v1sq + (r - 1.0) * d_u * d_u)
    lo, hi = inversion_ci_many(d_hat, m, v1sq, cfg.alpha)
    z = normal_quantile(1.0 - cfg.alpha / 2.0)
    d = cfg.d
    return {
        "d_hat": d_hat,
        "d_u": d_u,
        "se_d_u": se,
        "v1_squared": v1sq,
        "inversion_lower": lo,
        "inversion_upper": hi,
        "normal_lower": d_u - z * se,
        "normal_upper": d_u + z * se,
        "covered_inversion": (lo <= d) & (d <= hi),
        "covered_normal": (d_u - z * se <= d) & (d <= d_u + z * se),
        "rank_retries": np.array([retries]),
    }


def run_simulation(cfg: SimConfig, chunk: int = 5000) -> SimulationReport:
    """Run ``cfg.reps`` replications and aggregate them."""
    parts = [simulate_replications(cfg, s, min(s + chunk, cfg.reps)) for s in range(0, cfg.reps, chunk)]
    cat = {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}
    reps = cfg.reps
    d_hat = cat["d_hat"]

    mean_d = math.fsum(d_hat) / reps
    mean_v1 = math.fsum(cat["v1_squared"]) / reps
    if reps > 1:
        dev = d_hat - mean_d
        ss = math.fsum(dev * dev)
        var = ss / (reps - 1)
        m4 = math.fsum(dev**4) / reps
        mc_se_var = math.sqrt(max(m4 - (ss / reps) ** 2, 0.0) / reps)
        mc_se_mean = math.sqrt(var / reps)
    else:
        var = mc_se_var = mc_se_mean = math.nan

    m, d = cfg.m, cfg.d
    c = c_factor(m)
    ratio = m / (m - 2)
    return SimulationReport(
        mean_d_hat=mean_d,
        mean_d_u=math.fsum(cat["d_u"]) / reps,
        theoretical_mean=c * d,
        empirical_var_d_hat=var,
        # E[v1^2] over the design draws; exact for fixed designs
        theoretical_var=ratio * mean_v1 + (ratio - c * c) * d * d,
        coverage_inversion=int(np.count_nonzero(cat["covered_inversion"])) / reps,
        coverage_normal=int(np.count_nonzero(cat["covered_normal"])) / reps,
        reps_used=reps,
        true_d=d,
        m=m,
        mean_v1_squared=mean_v1,
        mc_se_mean=mc_se_mean,
        mc_se_var=mc_se_var,
        rank_retries=int(cat["rank_retries"].sum()),
    )
