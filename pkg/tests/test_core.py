import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from premia.core import (
    LogNormalGrowth,
    MarkovChain,
    MomentTargets,
    PreferenceParams,
    TimeSeries,
    validate_chain,
)
from premia.errors import (
    InvalidMoments,
    InvariantViolation,
    NegativeEntry,
    NonErgodic,
    NonMonotonicTime,
    NonPositiveState,
    NonStochasticRow,
)


@given(st.floats(1e-3, 10.0))
def test_beta_delta_round_trip(beta):
    prefs = PreferenceParams(alpha=2.0, beta=beta)
    back = PreferenceParams.from_delta(2.0, prefs.delta)
    assert back.beta == pytest.approx(beta, rel=1e-14, abs=0)
    assert prefs.delta == -math.log(beta)


@given(st.floats(-2.0, 5.0))
def test_delta_beta_round_trip(delta):
    prefs = PreferenceParams.from_delta(3.0, delta)
    assert prefs.delta == pytest.approx(delta, rel=1e-14, abs=1e-14)


def test_beta_above_one_is_allowed_but_not_orthodox():
    assert not PreferenceParams(alpha=50, beta=1.02).orthodox
    assert PreferenceParams(alpha=2, beta=0.97).orthodox


@pytest.mark.parametrize("alpha,beta", [(0.0, 0.9), (-1.0, 0.9), (2.0, 0.0), (2.0, -0.5), (math.nan, 0.9)])
def test_preference_invariants(alpha, beta):
    with pytest.raises(InvariantViolation):
        PreferenceParams(alpha=alpha, beta=beta)


def test_single_state_chain():
    chain = validate_chain([1.0], [[1.0]])
    assert chain.n == 1 and chain.aperiodic


def test_two_state_chain():
    chain = validate_chain([1.054, 0.982], [[0.43, 0.57], [0.57, 0.43]])
    assert chain.n == 2
    np.testing.assert_array_equal(chain.states, [1.054, 0.982])


@pytest.mark.parametrize(
    "states,transition,error",
    [
        ([1.0, 1.1], [[0.5, 0.4], [0.5, 0.5]], NonStochasticRow),
        ([1.0, 1.1], [[1.2, -0.2], [0.5, 0.5]], NegativeEntry),
        ([1.0, 1.1], [[1.0, 0.0], [0.5, 0.5]], NonErgodic),
        ([1.0, 1.1], [[1.0, 0.0], [0.0, 1.0]], NonErgodic),
        ([1.0, 0.0], [[0.5, 0.5], [0.5, 0.5]], NonPositiveState),
        ([1.0, -1.0], [[0.5, 0.5], [0.5, 0.5]], NonPositiveState),
    ],
)
def test_chain_errors(states, transition, error):
    with pytest.raises(error):
        validate_chain(states, transition)


def test_row_sum_tolerance_is_not_renormalized():
    validate_chain([1.0, 1.1], [[0.5, 0.5 + 5e-13], [0.5, 0.5]])
    with pytest.raises(NonStochasticRow):
        validate_chain([1.0, 1.1], [[0.5, 0.5 + 5e-12], [0.5, 0.5]])


def test_shape_mismatch():
    with pytest.raises(InvariantViolation):
        validate_chain([1.0, 1.1, 1.2], [[0.5, 0.5], [0.5, 0.5]])


def test_periodic_chain_is_ergodic_but_not_aperiodic():
    chain = validate_chain([1.0, 1.1], [[0.0, 1.0], [1.0, 0.0]])
    assert not chain.aperiodic


@st.composite
def ergodic_chains(draw):
    n = draw(st.integers(1, 5))
    rows = draw(st.lists(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n), min_size=n, max_size=n))
    P = np.array(rows)
    P = P / P.sum(axis=1, keepdims=True)
    states = draw(st.lists(st.floats(0.5, 1.5), min_size=n, max_size=n))
    return states, P


@given(ergodic_chains())
def test_validation_is_idempotent(chain_data):
    states, P = chain_data
    chain = validate_chain(states, P)
    again = validate_chain(chain.states, chain.transition)
    assert again == chain


def test_chain_arrays_are_read_only():
    chain = validate_chain([1.054, 0.982], [[0.43, 0.57], [0.57, 0.43]])
    with pytest.raises(ValueError):
        chain.transition[0, 0] = 0.5
    with pytest.raises(ValueError):
        chain.states[0] = 2.0


def test_lognormal_growth_invariants():
    LogNormalGrowth(0.01, 0.0)
    with pytest.raises(InvariantViolation):
        LogNormalGrowth(0.01, -0.01)


@pytest.mark.parametrize("mean,var,rho", [(1.0, -1e-4, 0.0), (1.0, 1e-4, 1.0), (1.0, 1e-4, -1.2)])
def test_moment_target_invariants(mean, var, rho):
    with pytest.raises(InvalidMoments):
        MomentTargets(mean, var, rho)


def test_time_series_ordering():
    ts = TimeSeries((2, 10, 11), [1.0, 2.0, 3.0])
    assert len(ts) == 3
    with pytest.raises(NonMonotonicTime):
        TimeSeries((1990, 1990, 1991), [1.0, 2.0, 3.0])
    with pytest.raises(NonMonotonicTime):
        TimeSeries(("1991q1", "1990q4"), [1.0, 2.0])
    with pytest.raises(InvariantViolation):
        TimeSeries((1, 2), [1.0])
