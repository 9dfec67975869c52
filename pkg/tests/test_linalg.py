import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regeffect.data import Dataset
from regeffect.errors import InsufficientRows, MissingValue, NonBinaryGroup, NonNumericColumn, RankDeficient, UnknownColumn
from regeffect.formula import ModelSpec
from regeffect.linalg import build_design_matrix, householder_qr, ols_fit, ols_fit_many, v1_squared_two_group


def two_group_design(n0, n1, k=0, rng=None):
    cols = [np.ones(n0 + n1), np.r_[np.zeros(n0), np.ones(n1)]]
    if k:
        cols += list(rng.normal(size=(k, n0 + n1)))
    return np.column_stack(cols)


def test_layout_without_covariates():
    ds = Dataset.from_dict({"y": [1, 2, 3, 4], "g": ["A", "A", "B", "B"]})
    X = build_design_matrix(ds, ModelSpec("y", "g"))
    assert X.values.T.tolist() == [[1, 1, 1, 1], [0, 0, 1, 1]]
    assert (X.reference_level, X.other_level) == ("A", "B")
    assert X.column_names == ("(Intercept)", "g")


def test_layout_with_covariates_and_reference():
    ds = Dataset.from_dict({"y": [1, 2, 3, 4, 5], "g": ["u", "r", "u", "r", "u"], "a": [1, 2, 3, 4, 6], "b": [0, 1, 0, 2, 2]})
    X = build_design_matrix(ds, ModelSpec("y", "g", ("b", "a"), reference_level="u"))
    assert X.column_names == ("(Intercept)", "g", "b", "a")
    assert X.values[:, 1].tolist() == [0, 1, 0, 1, 0]
    assert X.values[:, 2].tolist() == [0, 1, 0, 2, 2]
    assert X.reference_level == "u"


def test_numeric_group_levels():
    ds = Dataset.from_dict({"y": [1, 2, 3, 4], "g": [2, 1, 2, 1]})
    X = build_design_matrix(ds, ModelSpec("y", "g"))
    assert X.values[:, 1].tolist() == [1, 0, 1, 0]
    X = build_design_matrix(ds, ModelSpec("y", "g", reference_level="2"))
    assert X.values[:, 1].tolist() == [0, 1, 0, 1]


def test_design_errors():
    ds = Dataset.from_dict({"y": [1, 2, 3, 4, 5], "g": ["a", "b", "c", "a", "b"], "t": ["x", "y", "x", "y", "x"]})
    with pytest.raises(NonBinaryGroup):
        build_design_matrix(ds, ModelSpec("y", "g"))
    with pytest.raises(NonNumericColumn):
        build_design_matrix(ds, ModelSpec("y", "t", ("g",)))
    with pytest.raises(UnknownColumn):
        build_design_matrix(ds, ModelSpec("y", "nope"))
    small = Dataset.from_dict({"y": [1, 2], "g": ["a", "b"]})
    with pytest.raises(InsufficientRows):
        build_design_matrix(small, ModelSpec("y", "g"))
    empty = Dataset.from_dict({"y": [], "g": []})
    with pytest.raises(InsufficientRows):
        build_design_matrix(empty, ModelSpec("y", "g"))


def test_missing_values_rejected_unless_dropped():
    ds = Dataset.from_dict({"y": [1, 2, "", 4, 5, 6], "g": ["a", "b", "a", "b", "a", "b"], "unused": ["", "", "", "", "", ""]})
    with pytest.raises(MissingValue):
        build_design_matrix(ds, ModelSpec("y", "g"))
    X = build_design_matrix(ds, ModelSpec("y", "g"), drop_missing=True)
    assert X.n == 5 and X.rows_dropped == 1


def test_v1_squared_two_group():
    assert v1_squared_two_group(2, 2) == 1.0
    assert v1_squared_two_group(1, 1) == 2.0
    assert v1_squared_two_group(307, 88) == pytest.approx(395 / 27016, rel=1e-15)
    assert v1_squared_two_group(307, 88) == pytest.approx(0.01462097, abs=5e-9)
    with pytest.raises(InsufficientRows):
        v1_squared_two_group(0, 5)


@settings(max_examples=50)
@given(st.integers(1, 60), st.integers(1, 60))
def test_k0_group_entry_equals_two_group_formula(n0, n1):
    if n0 + n1 < 3:
        return
    X = two_group_design(n0, n1)
    fit = ols_fit(X, np.arange(n0 + n1, dtype=float) ** 0.5)
    assert fit.v1_squared == pytest.approx(v1_squared_two_group(n0, n1), abs=1e-12)


def test_k0_collapse_to_group_means():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n0, n1 = rng.integers(2, 40, size=2)
        y = rng.normal(size=n0 + n1) * 3 + 1
        fit = ols_fit(two_group_design(n0, n1), y)
        y0, y1 = y[:n0], y[n0:]
        q = ((y0 - y0.mean()) ** 2).sum() + ((y1 - y1.mean()) ** 2).sum()
        assert fit.beta1 == pytest.approx(y1.mean() - y0.mean(), abs=1e-10)
        assert fit.sigma2_hat == pytest.approx(q / (n0 + n1 - 2), abs=1e-10)
        assert (fit.n0, fit.n1, fit.m) == (n0, n1, n0 + n1 - 2)


def test_against_lstsq_and_orthogonality():
    rng = np.random.default_rng(4)
    for k in range(4):
        X = two_group_design(25, 17, k, rng)
        y = rng.normal(size=42)
        fit = ols_fit(X, y)
        ref, *_ = np.linalg.lstsq(X, y, rcond=None)
        assert np.allclose(fit.beta_hat, ref, atol=1e-12)
        assert np.allclose(fit.v_diag, np.diag(np.linalg.inv(X.T @ X)), rtol=1e-12)
        resid = y - X @ fit.beta_hat
        assert np.linalg.norm(X.T @ resid) <= 1e-8 * np.linalg.norm(X.T @ y)
        assert fit.m == 42 - 2 - k
        assert np.all(fit.v_diag > 0)


def test_adjusted_response_identity():
    rng = np.random.default_rng(5)
    X = two_group_design(30, 22, 2, rng)
    y = X @ np.array([1.0, 0.7, -0.4, 2.0]) + rng.normal(size=52)
    fit = ols_fit(X, y)
    adj = y - X[:, 2:] @ fit.beta_hat[2:]
    g = X[:, 1] == 1
    assert adj[g].mean() - adj[~g].mean() == pytest.approx(fit.beta1, abs=1e-10)


def test_row_permutation_invariance():
    rng = np.random.default_rng(6)
    X = two_group_design(20, 31, 2, rng)
    y = rng.normal(size=51)
    perm = rng.permutation(51)
    a, b = ols_fit(X, y), ols_fit(X[perm], y[perm])
    assert np.allclose(a.beta_hat, b.beta_hat, atol=1e-10)
    assert a.sigma2_hat == pytest.approx(b.sigma2_hat, abs=1e-10)
    assert np.allclose(a.v_diag, b.v_diag, atol=1e-10)


def test_perfect_fit_has_zero_variance():
    rng = np.random.default_rng(8)
    X = two_group_design(6, 6, 1, rng)
    y = X[:, 2].copy()
    fit = ols_fit(X, y)
    assert fit.sigma2_hat == 0.0
    assert np.allclose(X @ fit.beta_hat, y, atol=1e-12)


def test_rank_deficiency_detected():
    rng = np.random.default_rng(9)
    X = two_group_design(10, 10, 1, rng)
    X = np.column_stack([X, 2.0 * X[:, 2]])
    with pytest.raises(RankDeficient):
        ols_fit(X, rng.normal(size=20))
    # group column duplicated by a covariate
    X2 = np.column_stack([two_group_design(5, 5), np.r_[np.zeros(5), np.ones(5)]])
    with pytest.raises(RankDeficient):
        ols_fit(X2, rng.normal(size=10))


def test_batched_qr_matches_single():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(7, 30, 4))
    Y = rng.normal(size=(7, 30))
    beta, rss, vd, ok = ols_fit_many(X, Y)
    assert ok.all()
    for i in range(7):
        fit = ols_fit(X[i], Y[i])
        assert np.allclose(beta[i], fit.beta_hat, atol=1e-13)
        assert rss[i] / fit.m == pytest.approx(fit.sigma2_hat, rel=1e-13)
    r, qty = householder_qr(X[:1], Y[:1])
    assert np.allclose(np.abs(np.diag(r[0])), np.abs(np.diag(np.linalg.qr(X[0])[1])), rtol=1e-12)
