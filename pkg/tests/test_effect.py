import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regeffect.effect import (
    cohens_d,
    cohens_d_classic,
    cohens_d_from_t,
    dhat_moments,
    effect_label,
    estimate,
    f_squared,
    hedges_g,
    se_hedges_g,
    tau_hat,
)
from regeffect.errors import DegenerateVariance, DomainError
from regeffect.linalg import RegressionFit, ols_fit
from regeffect.nct import c_factor, nct_mean, nct_variance

# printed in the data example (k = 2 covariates, m = 391)
BETA1, V1SQ, SIGMA, M = 0.6212941, 0.01642807, 4.265321, 391


def summary_fit(beta1, sigma, v1sq, m, n0=307, n1=88):
    return RegressionFit(
        beta_hat=np.array([0.0, beta1]), sigma2_hat=sigma**2, m=m, v_diag=np.array([1.0, v1sq]), n0=n0, n1=n1
    )


def test_cohens_d_from_fit():
    assert cohens_d(summary_fit(BETA1, SIGMA, V1SQ, M)) == pytest.approx(0.1456617, abs=5e-8)
    assert cohens_d(summary_fit(1.162903, 4.561543, 395 / 27016, 393)) == pytest.approx(0.2549, abs=5e-5)
    assert cohens_d(summary_fit(0.0, 2.0, 0.1, 10)) == 0.0
    with pytest.raises(DegenerateVariance):
        cohens_d(summary_fit(1.0, 0.0, 0.1, 10))


def test_cohens_d_classic():
    assert cohens_d_classic(3.0, 3.0, 4.0, 5.0, 10, 12) == 0.0
    # groups {0, 2} and {1, 3}: means 1 and 2, Q0 = Q1 = 2, S = sqrt(2)
    assert cohens_d_classic(1.0, 2.0, 2.0, 2.0, 2, 2) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    with pytest.raises(DegenerateVariance):
        cohens_d_classic(1.0, 2.0, 0.0, 0.0, 3, 3)


def test_cohens_d_classic_from_group_summaries():
    # pooled SD recovered from sigma_hat of the k=0 fit: S^2 = (Q0 + Q1) / 393
    q = 4.561543**2 * 393
    d = cohens_d_classic(9.511364, 10.674267, q / 2, q / 2, 307, 88)
    assert d == pytest.approx(0.2549, abs=1e-4)


def test_cohens_d_from_t():
    assert cohens_d_from_t(2.1084, 307, 88) == pytest.approx(0.2549, abs=5e-5)
    assert cohens_d_from_t(0.0, 5, 9) == 0.0
    assert cohens_d_from_t(1.0, 2, 2) == 1.0


def test_hedges_g():
    assert hedges_g(0.2549, 393) == pytest.approx(0.2544, abs=5e-5)
    assert hedges_g(BETA1 / SIGMA, 391) == pytest.approx(0.1453821, abs=5e-8)
    assert hedges_g(0.0, 50) == 0.0
    with pytest.raises(DomainError):
        hedges_g(0.3, 1)


@given(st.floats(-5, 5, allow_subnormal=False).filter(lambda v: abs(v) > 1e-300), st.integers(2, 10**6))
def test_hedges_g_shrinks(d, m):
    assert abs(hedges_g(d, m)) < abs(d)


def test_se_hedges_g():
    assert se_hedges_g(0.1453822, 391, V1SQ) == pytest.approx(0.1283604, abs=5e-8)
    m, v = 40, 0.12
    assert se_hedges_g(0.0, m, v) == pytest.approx(math.sqrt(m * v / (c_factor(m) ** 2 * (m - 2))), rel=1e-14)
    with pytest.raises(DomainError):
        se_hedges_g(0.1, 2, 0.1)


def test_se_is_variance_of_unbiased_estimator():
    rng = np.random.default_rng(0)
    for _ in range(50):
        d_u, m, v = rng.normal(), int(rng.integers(3, 1000)), rng.uniform(0.001, 2)
        mom = dhat_moments(d_u, m, v)
        assert se_hedges_g(d_u, m, v) ** 2 == pytest.approx(mom.variance / c_factor(m) ** 2, rel=1e-12)


def test_dhat_moments():
    mom = dhat_moments(0.0, 20, 0.3)
    assert mom.mean == 0.0 and mom.variance == pytest.approx(20 * 0.3 / 18, rel=1e-15)
    d, m, v = 0.7, 25, 0.2
    mom = dhat_moments(d, m, v)
    tau = d / math.sqrt(v)
    assert mom.mean == pytest.approx(math.sqrt(v) * nct_mean(m, tau), rel=1e-14)
    assert mom.variance == pytest.approx(v * nct_variance(m, tau), rel=1e-14)
    with pytest.raises(DomainError):
        dhat_moments(0.5, 2, 0.1)


def test_dhat_moments_monte_carlo():
    # simulate regressions with k=0, n0 = n1 = 11 (m = 20, v1^2 = 2/11) many times
    rng = np.random.default_rng(77)
    n0 = n1 = 11
    m = n0 + n1 - 2
    reps = 10**6
    d = 0.5
    y0 = rng.normal(0.0, 1.0, size=(reps, n0))
    y1 = rng.normal(d, 1.0, size=(reps, n1))
    q = ((y0 - y0.mean(1, keepdims=True)) ** 2).sum(1) + ((y1 - y1.mean(1, keepdims=True)) ** 2).sum(1)
    dh = (y1.mean(1) - y0.mean(1)) / np.sqrt(q / m)
    mom = dhat_moments(d, m, (n0 + n1) / (n0 * n1))
    se_mean = dh.std() / math.sqrt(reps)
    se_var = math.sqrt((np.mean((dh - dh.mean()) ** 4) - dh.var() ** 2) / reps)
    assert abs(dh.mean() - mom.mean) < 3 * se_mean
    assert abs(dh.var(ddof=1) - mom.variance) < 3 * se_var


def test_asymptotic_unbiasedness_bound():
    d, v = 0.4, 0.05
    for m in (10, 100, 10**4):
        mom = dhat_moments(d, m, v)
        assert mom.mean - d == pytest.approx(d * (c_factor(m) - 1), rel=1e-9)
        assert 0 < c_factor(m) - 1 <= 1.0 / m


def test_f_squared_and_tau():
    assert f_squared(BETA1 / SIGMA, 391, V1SQ) == pytest.approx(0.003303146, abs=5e-10)
    assert f_squared(0.0, 10, 0.2) == 0.0
    assert f_squared(0.3, 1, 0.09) == pytest.approx(1.0, rel=1e-15)
    assert tau_hat(0.1456617, V1SQ) == pytest.approx(1.136455, abs=5e-7)
    assert tau_hat(0.0, 0.3) == 0.0
    assert tau_hat(0.37, 1.0) == 0.37


def test_estimate_bundle_invariants():
    est = estimate(summary_fit(BETA1, SIGMA, V1SQ, M))
    assert est.d_u == est.d_hat / est.c_m
    assert est.tau_hat == pytest.approx(est.d_hat / math.sqrt(est.v1_squared), rel=1e-15)
    assert est.f_squared == pytest.approx(est.d_hat**2 / (est.m * est.v1_squared), rel=1e-15)
    assert est.se_d_u == pytest.approx(0.1283604, abs=5e-8)


def _two_group(rng):
    n0, n1 = (int(v) for v in rng.integers(2, 60, size=2))
    y = rng.normal(size=n0 + n1) * rng.uniform(0.5, 5) + rng.normal() * np.r_[np.zeros(n0), np.ones(n1)]
    X = np.column_stack([np.ones(n0 + n1), np.r_[np.zeros(n0), np.ones(n1)]])
    return n0, n1, X, y


def test_three_routes_agree_for_two_groups():
    rng = np.random.default_rng(12)
    for _ in range(100):
        n0, n1, X, y = _two_group(rng)
        y0, y1 = y[:n0], y[n0:]
        q0, q1 = ((y0 - y0.mean()) ** 2).sum(), ((y1 - y1.mean()) ** 2).sum()
        pooled = math.sqrt((q0 + q1) / (n0 + n1 - 2))
        t = (y1.mean() - y0.mean()) / (pooled * math.sqrt(1 / n0 + 1 / n1))
        d_reg = cohens_d(ols_fit(X, y))
        assert d_reg == pytest.approx(cohens_d_classic(y0.mean(), y1.mean(), q0, q1, n0, n1), abs=1e-10)
        assert d_reg == pytest.approx(cohens_d_from_t(t, n0, n1), abs=1e-10)


def test_scale_and_sign_behaviour():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n0, n1, X, y = _two_group(rng)
        d = cohens_d(ols_fit(X, y))
        assert cohens_d(ols_fit(X, 7.3 * y)) == pytest.approx(d, abs=1e-10)
        flipped = X.copy()
        flipped[:, 1] = 1.0 - flipped[:, 1]
        assert cohens_d(ols_fit(flipped, y)) == pytest.approx(-d, abs=1e-12)


def test_labels():
    assert [effect_label(v) for v in (0.1, -0.25, 0.6, 1.2)] == ["negligible", "small", "medium", "large"]
