import math

import numpy as np
import pytest

from regeffect.errors import ConfigError
from regeffect.rng import CounterRNG
from regeffect.simulation import SimConfig, run_simulation, simulate_replications


def test_rng_is_deterministic_and_stream_separated():
    a, b = CounterRNG(1), CounterRNG(1)
    assert np.array_equal(a.bits([0, 5], 0, 10), b.bits([0, 5], 0, 10))
    assert not np.array_equal(a.bits([0], 0, 10), a.bits([1], 0, 10))
    assert not np.array_equal(a.bits([0], 0, 10), CounterRNG(2).bits([0], 0, 10))
    # counter mode: a window equals the matching slice of a longer draw
    assert np.array_equal(a.bits([3], 4, 6), a.bits([3], 0, 10)[:, 4:])


def test_rng_uniform_and_normal_moments():
    rng = CounterRNG(99)
    u = rng.uniform([0], 0, 200_000)[0]
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005
    z = rng.normals(np.arange(50), 4000).ravel()
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1.0) < 0.01
    assert abs(np.mean(z**4) - 3.0) < 0.05


def test_rng_normals_prefix_stable():
    rng = CounterRNG(5)
    assert np.array_equal(rng.normals([7], 9), rng.normals([7], 20)[:, :9])
    with pytest.raises(ValueError):
        CounterRNG(-1)


def _cfg(**kw):
    base = dict(n0=10, n1=12, k=2, beta=(0.0, 0.5, 0.3, -0.2), sigma=1.0, reps=300, seed=4)
    base.update(kw)
    return SimConfig(**base)


def test_simulation_bit_identical_across_runs_and_chunks():
    cfg = _cfg()
    a, b, c = run_simulation(cfg), run_simulation(cfg), run_simulation(cfg, chunk=7)
    assert a == b == c


def test_replications_independent_of_window():
    cfg = _cfg()
    whole = simulate_replications(cfg, 0, 50)
    part = simulate_replications(cfg, 20, 30)
    assert np.array_equal(whole["d_hat"][20:30], part["d_hat"])


def test_single_replication():
    cfg = _cfg(reps=1)
    rep = run_simulation(cfg)
    one = simulate_replications(cfg, 0, 1)
    assert rep.mean_d_hat == one["d_hat"][0]
    assert math.isnan(rep.empirical_var_d_hat)
    assert rep.coverage_inversion in (0.0, 1.0)


def test_report_fields_consistent():
    rep = run_simulation(_cfg())
    assert rep.reps_used == 300 and rep.m == 18 and rep.true_d == 0.5
    assert 0.0 <= rep.coverage_normal <= 1.0
    assert set(rep.to_dict()) >= {"mean_d_hat", "theoretical_var", "coverage_inversion"}


def test_fixed_design_reuses_covariates():
    cfg = _cfg(fixed_design=True)
    out = simulate_replications(cfg, 0, 40)
    assert np.allclose(out["v1_squared"], out["v1_squared"][0], rtol=0, atol=0)
    free = simulate_replications(_cfg(), 0, 40)
    assert np.ptp(free["v1_squared"]) > 0


def test_fixed_design_theoretical_variance_is_exact():
    cfg = _cfg(fixed_design=True, reps=2000)
    rep = run_simulation(cfg)
    assert abs(rep.empirical_var_d_hat - rep.theoretical_var) < 4 * rep.mc_se_var


@pytest.mark.parametrize(
    "kw",
    [
        dict(n0=0),
        dict(k=-1, beta=(0.0, 1.0)),
        dict(beta=(0.0, 1.0)),
        dict(sigma=0.0),
        dict(alpha=1.0),
        dict(reps=0),
        dict(seed=-3),
        dict(n0=2, n1=2, k=0, beta=(0.0, 1.0)),
    ],
)
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        _cfg(**kw)
