import dataclasses
import math

import numpy as np
import pytest

from premia.core import LogNormalGrowth
from premia.data_io import load_model_config
from premia.errors import InvalidParameter, InvariantViolation, NoFixedPoint, TooShort
from premia.lognormal import hj_bound
from premia.lrr import (
    LrrParams,
    LrrStatePath,
    claim_returns,
    euler_residual,
    premium_by_simulation,
    risk_free_path,
    sdf_path,
    simulate_states,
    solve_consumption_claim,
    solve_dividend_claim,
)
from premia.stats import batch_means_se

BASE = load_model_config("by-2004-monthly-like")
QUIET = dataclasses.replace(BASE, phi_e=0.0, sigma_w=0.0)
# ies = 0.5 and alpha = 2 give theta = 1 exactly
CRRA = dataclasses.replace(BASE, alpha=2.0, ies=0.5)


@pytest.fixture(scope="module")
def long_run():
    cons = solve_consumption_claim(BASE)
    div = solve_dividend_claim(BASE, cons)
    states = simulate_states(BASE, 10**6, seed=1)
    m = sdf_path(BASE, states, cons)
    return BASE, cons, div, states, m


def test_config_values():
    assert BASE.alpha == 10.0 and BASE.ies == 1.5 and BASE.beta == 0.998
    assert BASE.sigma2_bar == pytest.approx(0.0078 ** 2, rel=1e-12)


def test_theta_identity():
    rng = np.random.default_rng(5)
    for _ in range(100):
        alpha = rng.uniform(0.1, 20.0)
        ies = rng.uniform(0.1, 3.0)
        if alpha == 1.0 or ies == 1.0:
            continue
        p = dataclasses.replace(BASE, alpha=alpha, ies=ies)
        assert abs(p.theta - (1 - alpha) / (1 - 1 / ies)) <= 1e-14 * max(1.0, abs(p.theta))


@pytest.mark.parametrize(
    "change",
    [dict(ies=1.0), dict(sigma2_bar=0.0), dict(nu1=1.0), dict(nu1=-0.1), dict(alpha=1.0), dict(sigma_w=-1e-6)],
)
def test_invariants(change):
    with pytest.raises(InvariantViolation):
        dataclasses.replace(BASE, **change)


def test_shocks_off_paths():
    states = simulate_states(QUIET, 10**5, seed=3)
    assert np.all(states.q_series == 0.0)
    assert np.all(states.sigma2_series == QUIET.sigma2_bar)
    g = states.g_series
    sd = math.sqrt(QUIET.sigma2_bar)
    assert abs(g.mean() - QUIET.mu) < 3 * sd / math.sqrt(g.size)
    assert g.std(ddof=1) == pytest.approx(sd, rel=0.01)
    assert abs(np.corrcoef(g[:-1], g[1:])[0, 1]) < 3 / math.sqrt(g.size)


def test_variance_mean_within_three_se(long_run):
    p, _, _, states, _ = long_run
    s2 = states.sigma2_series
    assert abs(s2.mean() - p.sigma2_bar) < 3 * batch_means_se(s2)
    assert states.floor_rate < 0.01
    assert np.all(s2 >= 1e-12)


def test_shock_streams_independent(long_run):
    states = long_run[3]
    c = np.corrcoef([states.eps, states.eta, states.u, states.w])
    off = c[~np.eye(4, dtype=bool)]
    assert np.all(np.abs(off) < 4 / math.sqrt(states.horizon))


def test_simulation_deterministic():
    a = simulate_states(BASE, 1000, seed=9)
    b = simulate_states(BASE, 1000, seed=9)
    for name in ("q_series", "sigma2_series", "g_series", "gd_series"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    with pytest.raises(InvalidParameter):
        simulate_states(BASE, 0, seed=1)


def test_consumption_claim_solution():
    c = solve_consumption_claim(BASE)
    assert 0 < c.a1 < 1
    assert c.a1 == pytest.approx(math.exp(c.z_bar) / (1 + math.exp(c.z_bar)), rel=1e-12)
    assert c.z_bar == pytest.approx(c.A0 + c.A2 * BASE.sigma2_bar, abs=1e-9)
    assert c.residual < 1e-10
    # good long-run news raises valuations when ies > 1
    assert c.A1 > 0
    low = solve_consumption_claim(dataclasses.replace(BASE, ies=0.8))
    assert low.A1 < 0


def test_no_fixed_point_when_iterations_run_out():
    with pytest.raises(NoFixedPoint):
        solve_consumption_claim(BASE, max_iter=2)


def test_crra_reduction_pointwise():
    assert CRRA.theta == 1.0
    c = solve_consumption_claim(CRRA)
    states = simulate_states(CRRA, 10**4, seed=2)
    m = sdf_path(CRRA, states, c)
    expected = math.log(CRRA.beta) - states.g_series / CRRA.ies
    assert np.max(np.abs(m - expected)) <= 1e-12
    # approaching theta = 1 from outside the special case gives the same SDF
    near = dataclasses.replace(CRRA, alpha=2.0 + 1e-9)
    m_near = sdf_path(near, states, solve_consumption_claim(near))
    assert np.max(np.abs(m_near - expected)) < 1e-8


def test_quiet_crra_constants():
    # variance at the floor: growth shocks are of order 1e-6 and vanish from the rate
    p = dataclasses.replace(CRRA, phi_e=0.0, sigma_w=0.0, sigma2_bar=1e-12)
    c = solve_consumption_claim(p)
    states = simulate_states(p, 10**4, seed=4)
    m = sdf_path(p, states, c)
    rf = risk_free_path(p, states, c)
    assert np.ptp(rf) == 0.0
    np.testing.assert_allclose(rf, -math.log(p.beta) + p.mu / p.ies, atol=1e-11)
    np.testing.assert_allclose(m, -rf, atol=1e-5)
    assert abs(m.mean() + rf[0]) < 1e-7


@pytest.mark.parametrize("asset", ["risk_free", "consumption", "dividend"])
def test_euler_residuals(long_run, asset):
    p, cons, div, states, m = long_run
    if asset == "risk_free":
        r = risk_free_path(p, states, cons)
    elif asset == "consumption":
        r = claim_returns(cons, states, states.g_series)
    else:
        r = claim_returns(div, states, states.gd_series)
    res = euler_residual(m, r)
    assert res.residual < 5e-3
    assert res.n == 10**6


def test_euler_residual_identity_and_errors():
    m = np.random.default_rng(0).normal(size=10**4)
    assert euler_residual(m, -m).residual == 0.0
    with pytest.raises(TooShort):
        euler_residual(m[:100], -m[:100])
    with pytest.raises(InvalidParameter):
        euler_residual(m, m[:-1])


def test_sdf_mean_stable_across_seeds():
    c = solve_consumption_claim(BASE)
    means, ses = [], []
    for seed in (11, 12):
        m = sdf_path(BASE, simulate_states(BASE, 2 * 10**5, seed=seed), c)
        assert np.all(np.isfinite(m))
        means.append(m.mean())
        ses.append(batch_means_se(m))
    assert abs(means[0] - means[1]) < 3 * math.hypot(*ses)


def conditional_rf(p, c, q, sigma2):
    states = LrrStatePath(
        q_series=np.array([q, 0.0]),
        sigma2_series=np.array([sigma2, sigma2]),
        g_series=np.zeros(1),
        gd_series=np.zeros(1),
        eps=np.zeros(1),
        eta=np.zeros(1),
        u=np.zeros(1),
        w=np.zeros(1),
        seed=None,
    )
    return float(risk_free_path(p, states, c)[0])


def test_risk_free_linear_in_growth_state():
    p = dataclasses.replace(BASE, sigma_w=0.0)
    c = solve_consumption_claim(p)
    h = 1e-4
    base = conditional_rf(p, c, 0.0, p.sigma2_bar)
    slopes = [(conditional_rf(p, c, q + h, p.sigma2_bar) - conditional_rf(p, c, q - h, p.sigma2_bar)) / (2 * h) for q in (-0.002, 0.0, 0.003)]
    # the slope is the same everywhere and equals 1/ies
    np.testing.assert_allclose(slopes, 1 / p.ies, rtol=1e-7)
    assert conditional_rf(p, c, 0.001, p.sigma2_bar) - base == pytest.approx(0.001 / p.ies, rel=1e-7)


def test_premium_reduces_to_lognormal_crra():
    p = dataclasses.replace(CRRA, phi_e=0.0, sigma_w=0.0)
    res = premium_by_simulation(p, 10**6, seed=6, claim="consumption")
    sigma = math.sqrt(p.sigma2_bar)
    hj = hj_bound(p.alpha, LogNormalGrowth(p.mu, sigma))
    # log premium plus the variance term equals alpha sigma^2 = (alpha sigma) * sigma
    assert abs(res.premium + 0.5 * p.sigma2_bar - hj.approx_ratio * sigma) < 3 * res.se


def test_sharpe_constant_without_vol_of_vol():
    res = premium_by_simulation(dataclasses.replace(BASE, sigma_w=0.0), 10**5, seed=7)
    assert res.sharpe_std <= 1e-10 * abs(res.sharpe_mean)


def test_sharpe_varies_with_vol_of_vol():
    res = premium_by_simulation(BASE, 10**5, seed=7)
    assert res.sharpe_std > 0.01 * abs(res.sharpe_mean)


def test_premium_positive_and_deterministic():
    a = premium_by_simulation(BASE, 10**5, seed=8)
    b = premium_by_simulation(BASE, 10**5, seed=8)
    assert a == b
    assert a.premium > 0 and a.floor_rate < 0.01
    with pytest.raises(InvalidParameter):
        premium_by_simulation(BASE, 100, seed=1, claim="bond")
