import math
import time

import numpy as np
import pytest

from premia.calibration import (
    TwoStateParams,
    calibrate_two_state,
    max_premium_search,
    sample_moments,
    to_gross_growth,
    two_state_moments,
)
from premia.core import MomentTargets, TimeSeries
from premia.errors import EmptyFeasibleSet, InvalidMoments, InvalidParameter, InvariantViolation, TooShort, ZeroVariance
from premia.markov import simulate_path

# tests/oracles/compute_oracles.py: scalar double loop over the same 200 x 200
# grid with each point priced by Cramer's rule
BRUTE_MAX = dict(premium=0.0036034701744770206, alpha=2.412819095477387, beta=0.999, rf=0.03981064958553182)

MP_TARGETS = MomentTargets(1.018, 0.036 ** 2, -0.14)


def symmetric_chain_growth(mu, gamma, phi, horizon, rng):
    """Growth path of the symmetric chain: the state flips with probability 1 - phi."""
    start = rng.integers(0, 2)
    flips = rng.random(horizon - 1) >= phi
    state = np.concatenate([[start], start ^ (np.cumsum(flips) & 1)])
    return np.where(state == 0, 1 + mu + gamma, 1 + mu - gamma)


def growth_moments(g):
    d = g - g.mean()
    return g.mean(), g.var(ddof=1), np.dot(d[:-1], d[1:]) / np.dot(d, d)


def test_degenerate_moments():
    m = two_state_moments(TwoStateParams(0.0, 0.0, 0.5))
    assert (m.mean_growth, m.variance, m.autocorr) == (1.0, 0.0, 0.0)


@pytest.mark.parametrize("params", [(0.02, 0.03, 0.6), (0.018, 0.036, 0.43)])
def test_moments_match_simulation_oracle(params):
    mu, gamma, phi = params
    T = 10**7
    g = symmetric_chain_growth(mu, gamma, phi, T, np.random.default_rng(17))
    mean, var, ac = growth_moments(g)
    m = two_state_moments(TwoStateParams(*params))
    rho = 2 * phi - 1
    # switches are i.i.d., so the state products s_t s_{t+1} are i.i.d. too
    assert abs(mean - m.mean_growth) < 3 * math.sqrt(gamma ** 2 * (1 + rho) / (1 - rho) / T)
    assert abs(ac - m.autocorr) < 3 * math.sqrt((1 - rho ** 2) / T)
    assert var == pytest.approx(m.variance, rel=1e-4)


def test_calibration_examples():
    assert calibrate_two_state(MomentTargets(1.0, 0.0, 0.0)) == TwoStateParams(0.0, 0.0, 0.5)
    p = calibrate_two_state(MP_TARGETS)
    assert (p.mu, p.gamma, p.phi) == pytest.approx((0.018, 0.036, 0.43), abs=1e-15)
    with pytest.raises(InvalidMoments):
        calibrate_two_state(MomentTargets(1.0, 1e-4, 1.2))


def test_params_invariants():
    with pytest.raises(InvariantViolation):
        TwoStateParams(0.0, -0.1, 0.5)
    with pytest.raises(InvariantViolation):
        TwoStateParams(0.0, 0.1, 1.5)
    with pytest.raises(InvariantViolation):
        TwoStateParams(0.0, 1.0, 0.5)


def test_round_trip_on_random_draws():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(1000):
        mu = rng.uniform(-0.05, 0.1)
        gamma = rng.uniform(0.0, 0.5)
        phi = rng.uniform(0.0, 1.0)
        if phi in (0.0, 1.0):
            continue
        back = calibrate_two_state(two_state_moments(TwoStateParams(mu, gamma, phi)))
        worst = max(worst, abs(back.mu - mu), abs(back.gamma - gamma), abs(back.phi - phi))
    assert worst <= 1e-14


def series(values):
    return TimeSeries(tuple(range(len(values))), np.asarray(values, dtype=float))


def test_sample_moment_errors():
    with pytest.raises(ZeroVariance):
        sample_moments(series([1.02] * 20))
    with pytest.raises(ZeroVariance):
        sample_moments(series([5.0] * 20), kind="levels")
    with pytest.raises(TooShort):
        sample_moments(series([1.0, 1.1]))
    with pytest.raises(TooShort):
        sample_moments(series([1.0, 1.1, 1.2]), kind="levels")
    with pytest.raises(InvalidParameter):
        to_gross_growth([1.0, 2.0], "percent")


def test_alternating_levels():
    n = 10_001
    levels = np.where(np.arange(n) % 2 == 0, 1.0, 1.1)
    m = sample_moments(series(levels), kind="levels")
    k = n - 1
    # growth alternates 1.1, 1/1.1 with an even count; centered deviations are +-a
    assert m.mean_growth == pytest.approx((1.1 + 1 / 1.1) / 2, rel=1e-14)
    assert m.autocorr == pytest.approx(-(k - 1) / k, rel=1e-12)


def test_growth_kinds_agree():
    rng = np.random.default_rng(4)
    growth = 1 + rng.normal(0.02, 0.03, 50)
    levels = np.concatenate([[100.0], 100.0 * np.cumprod(growth)])
    ref = sample_moments(series(growth))
    for kind, values in [("levels", levels), ("log_levels", np.log(levels)), ("log_growth", np.log(growth))]:
        m = sample_moments(series(values), kind=kind)
        assert (m.mean_growth, m.variance, m.autocorr) == pytest.approx(
            (ref.mean_growth, ref.variance, ref.autocorr), rel=1e-10
        )


def test_simulated_chain_moments_within_three_se():
    mu, gamma, phi = 0.02, 0.03, 0.6
    chain = TwoStateParams(mu, gamma, phi).chain()
    T = 10**6
    path = simulate_path(chain, T - 1, np.random.default_rng(21))
    m = sample_moments(series(chain.states[path]))
    rho = 2 * phi - 1
    target = two_state_moments(TwoStateParams(mu, gamma, phi))
    assert abs(m.mean_growth - target.mean_growth) < 3 * math.sqrt(gamma ** 2 * (1 + rho) / (1 - rho) / T)
    assert abs(m.autocorr - target.autocorr) < 3 * math.sqrt((1 - rho ** 2) / T)
    assert m.variance == pytest.approx(target.variance, rel=1e-3)


def sample_moment_rms(T, reps, seed):
    mu, gamma, phi = 0.02, 0.03, 0.6
    target = two_state_moments(TwoStateParams(mu, gamma, phi))
    rng = np.random.default_rng(seed)
    err = []
    for _ in range(reps):
        m = sample_moments(series(symmetric_chain_growth(mu, gamma, phi, T, rng)))
        err.append([m.mean_growth - target.mean_growth, m.autocorr - target.autocorr])
    return np.sqrt(np.mean(np.square(err), axis=0))


def test_sample_moments_converge_at_root_t():
    ratio = sample_moment_rms(10**4, 200, 1) / sample_moment_rms(10**6, 30, 2)
    assert np.all((ratio > 10 / 3) & (ratio < 30)), ratio


def test_max_premium_reproduction():
    start = time.perf_counter()
    res = max_premium_search(MP_TARGETS)
    elapsed = time.perf_counter() - start
    assert 0.0025 <= res.premium <= 0.0045
    assert elapsed < 10
    assert res.premium == pytest.approx(BRUTE_MAX["premium"], rel=1e-10)
    assert (res.alpha, res.beta, res.rf) == pytest.approx((BRUTE_MAX["alpha"], BRUTE_MAX["beta"], BRUTE_MAX["rf"]), rel=1e-10)
    assert res.alphas.shape == (200,) and res.betas.shape == (200,)
    assert res.n_feasible > 0


def test_max_premium_riskless_economy():
    res = max_premium_search(MomentTargets(1.018, 0.0, -0.14), n_alpha=30, n_beta=30)
    ok = np.isfinite(res.premium_grid)
    # round-off is relative to the gross return, which is huge for small beta
    assert np.all(np.abs(res.premium_grid[ok]) <= 1e-14 * (1 + np.abs(res.rf_grid[ok])))
    assert abs(res.premium) < 1e-14


def test_max_premium_empty_band():
    # the rate is unbounded above as beta -> 0, so only a band below every
    # attainable rate is empty; about 0.017 is the lowest on the default grid
    with pytest.raises(EmptyFeasibleSet):
        max_premium_search(MP_TARGETS, rf_band=(-0.9, -0.5))


def test_max_premium_empty_range():
    with pytest.raises(InvalidParameter):
        max_premium_search(MP_TARGETS, alpha_range=(5.0, 5.0))


def test_max_premium_monotone_in_alpha_range():
    # nested grids: every point of a narrower range is also in the wider one
    alphas = np.linspace(0.05, 10.0, 200)
    betas = np.linspace(0.001, 0.999, 100)
    last = -np.inf
    for cap in (1.0, 2.0, 4.0, 7.0, 10.0):
        res = max_premium_search(MP_TARGETS, alphas=alphas[alphas <= cap], betas=betas)
        assert res.premium >= last
        last = res.premium


def test_max_premium_is_deterministic():
    a = max_premium_search(MP_TARGETS, n_alpha=50, n_beta=50)
    b = max_premium_search(MP_TARGETS, n_alpha=50, n_beta=50)
    assert (a.premium, a.alpha, a.beta, a.rf) == (b.premium, b.alpha, b.beta, b.rf)
