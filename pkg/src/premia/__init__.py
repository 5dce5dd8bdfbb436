"""Consumption-based asset pricing: lognormal bounds, Markov endowment
economies, rare disasters, external habit, long-run risks and heterogeneous
consumers."""

from .calibration import TwoStateParams, calibrate_two_state, max_premium_search, sample_moments, two_state_moments
from .core import LogNormalGrowth, MarkovChain, MomentTargets, PreferenceParams, TimeSeries, validate_chain
from .disaster import DisasterSpec, build_rietz_chain, find_disaster_calibration, premium_sweep
from .habit import HabitParams, simulate_surplus
from .hetero import aggregated_euler_residual, general_b, idiosyncratic_b, simulate_cross_section
from .lognormal import hj_bound, implied_risk_aversion, implied_subjective_discount, risk_free_rate
from .lrr import LrrParams, premium_by_simulation, simulate_states, solve_consumption_claim, solve_dividend_claim
from .markov import simulate_economy, solve_equilibrium, stationary_distribution

__version__ = "0.1.0"
