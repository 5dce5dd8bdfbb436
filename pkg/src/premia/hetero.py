"""Heterogeneous consumers with uninsurable, market-dependent idiosyncratic risk.

Each consumer's log consumption growth is ``eta_i * b - b**2 / 2`` with
``eta_i ~ N(0, 1)`` independent across consumers and dates, so individual
gross growth has mean one. Choosing

    b = sqrt(2 / (alpha (alpha + 1))) * sqrt(delta - ln R)

makes every consumer's Euler equation ``E[e^{-delta} g_i^{-alpha} R] = 1``
hold exactly for the market return ``R``; dispersion rises as the market falls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParameter, NegativeDiscriminant, TooFewConsumers
from .quadrature import DEFAULT_NODES, expect_normal


def _scale(alpha: float) -> float:
    if not alpha > 0:
        raise InvalidParameter(f"alpha must be > 0, got {alpha}")
    return math.sqrt(2.0 / (alpha * (alpha + 1.0)))


# discriminants this far below zero, relative to the size of their terms,
# are round-off at the b = 0 boundary (e.g. ln(exp(delta)) - delta)
BOUNDARY_TOL = 4 * np.finfo(float).eps


def _root(disc, scale, what: str):
    disc = np.asarray(disc, dtype=float)
    slack = BOUNDARY_TOL * np.maximum(np.asarray(scale, dtype=float), 1.0)
    if np.any(disc < -slack) or np.any(np.isnan(disc)):
        bad = disc[disc < -slack] if disc.ndim else disc
        raise NegativeDiscriminant(f"{what} is negative: {bad}")
    return np.sqrt(np.maximum(disc, 0.0))


def idiosyncratic_b(market_return, delta: float, alpha: float):
    """Cross-sectional log-growth dispersion needed to price gross return ``R``."""
    R = np.asarray(market_return, dtype=float)
    if np.any(R <= 0):
        raise InvalidParameter("gross market return must be > 0")
    log_r = np.log(R)
    out = _scale(alpha) * _root(delta - log_r, np.abs(delta) + np.abs(log_r), "delta - ln R")
    return out[()]


def general_b(m_value, consumption_growth, delta: float, alpha: float):
    """Dispersion that makes individual marginal utility reproduce the SDF ``m``.

    ``consumption_growth`` is gross aggregate growth ``C_{t+1}/C_t``.
    """
    m = np.asarray(m_value, dtype=float)
    g = np.asarray(consumption_growth, dtype=float)
    if np.any(m <= 0) or np.any(g <= 0):
        raise InvalidParameter("SDF realization and aggregate growth must be > 0")
    terms = (np.log(m), delta, alpha * np.log(g))
    scale = sum(np.abs(t) for t in terms)
    out = _scale(alpha) * _root(sum(terms), scale, "ln m + delta + alpha ln growth")
    return out[()]


def per_consumer_euler(market_return, delta: float, alpha: float, nodes: int = DEFAULT_NODES):
    """``E[e^{-delta} g_i^{-alpha} R]`` over the idiosyncratic normal, by quadrature.

    Uses ``b = idiosyncratic_b(R, delta, alpha)``; the result is one whenever
    ``R`` is admissible.
    """
    R = np.asarray(market_return, dtype=float)
    b = np.asarray(idiosyncratic_b(R, delta, alpha))
    marginal = expect_normal(
        lambda x: np.exp(-alpha * (x * b[..., None] - 0.5 * b[..., None] ** 2)), 0.0, 1.0, nodes
    )
    return (math.exp(-delta) * marginal * R)[()]


@dataclass(frozen=True, eq=False)
class CrossSection:
    """Simulated panel of individual consumption.

    ``log_growth[t, i]`` is consumer i's log growth from date t to t+1.
    ``consumption_matrix`` has ``T + 1`` rows and starts at one for everybody.
    """

    n_consumers: int
    delta: float | None
    alpha: float | None
    b_series: np.ndarray = field(repr=False)
    log_growth: np.ndarray = field(repr=False)
    seed: int | None

    @cached_property
    def consumption_matrix(self) -> np.ndarray:
        levels = np.ones((self.log_growth.shape[0] + 1, self.n_consumers))
        np.exp(np.cumsum(self.log_growth, axis=0), out=levels[1:])
        return levels

    @property
    def horizon(self) -> int:
        return self.log_growth.shape[0]


def simulate_cross_section(
    n_consumers: int,
    b_series,
    seed: int | None = None,
    delta: float | None = None,
    alpha: float | None = None,
) -> CrossSection:
    """Draw the idiosyncratic growth panel for the given dispersion path.

    Each date gets its own child stream of ``SeedSequence(seed)``, so a date's
    draws do not depend on how many dates are simulated or in which order.
    """
    if n_consumers < 2:
        raise TooFewConsumers(f"need at least 2 consumers, got {n_consumers}")
    b = np.atleast_1d(np.asarray(b_series, dtype=float))
    if b.ndim != 1 or np.any(b < 0) or not np.all(np.isfinite(b)):
        raise InvalidParameter("b_series must be a finite 1-d array of values >= 0")
    growth = np.empty((b.shape[0], n_consumers))
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(b.shape[0])):
        eta = np.random.default_rng(child).standard_normal(n_consumers)
        growth[t] = eta * b[t] - 0.5 * b[t] ** 2
    b.setflags(write=False)
    growth.setflags(write=False)
    return CrossSection(n_consumers, delta, alpha, b, growth, seed)


def aggregation_multiplier(sigma2_n, alpha: float):
    """``exp(alpha^2 sigma_N^2 / 2)``; never below one."""
    return np.exp(0.5 * alpha ** 2 * np.asarray(sigma2_n, dtype=float))[()]


@dataclass(frozen=True, eq=False)
class AggregatedEuler:
    """Per-date pricing errors of an excess return in two aggregate forms.

    ``finite_n[t] = E_N[exp(-alpha dc_i)] * Re_t`` averages individual
    marginal-utility growth; ``lognormal[t] = exp(-alpha E_N[dc] + alpha^2
    sigma_N^2 / 2) * Re_t`` uses only the cross-sectional mean and variance.
    """

    finite_n: np.ndarray = field(repr=False)
    lognormal: np.ndarray = field(repr=False)
    multiplier: np.ndarray = field(repr=False)
    mean_finite_n: float
    mean_lognormal: float
    mean_abs_gap: float
    max_abs_gap: float


def aggregated_euler_residual(cross_section: CrossSection, excess_returns, alpha: float, ddof: int = 0) -> AggregatedEuler:
    """Compare finite-N and lognormal-aggregated Euler errors date by date.

    ``ddof=0`` is the population cross-sectional variance; ``ddof=1`` the
    sample variance.
    """
    cs = cross_section
    if cs.n_consumers < 2:
        raise TooFewConsumers(f"need at least 2 consumers, got {cs.n_consumers}")
    re = np.asarray(excess_returns, dtype=float)
    if re.shape != (cs.horizon,):
        raise InvalidParameter(f"expected {cs.horizon} excess returns, got shape {re.shape}")
    dc = cs.log_growth
    mean = dc.mean(axis=1)
    var = dc.var(axis=1, ddof=ddof)
    # factor out the mean so large alpha*dc does not overflow
    finite = np.exp(-alpha * mean) * np.exp(-alpha * (dc - mean[:, None])).mean(axis=1) * re
    mult = aggregation_multiplier(var, alpha)
    lognormal = np.exp(-alpha * mean) * np.atleast_1d(mult) * re
    gap = np.abs(finite - lognormal)
    return AggregatedEuler(
        finite_n=finite,
        lognormal=lognormal,
        multiplier=np.atleast_1d(mult),
        mean_finite_n=float(finite.mean()),
        mean_lognormal=float(lognormal.mean()),
        mean_abs_gap=float(gap.mean()),
        max_abs_gap=float(gap.max()),
    )
