"""Method-of-moments calibration of the symmetric two-state growth chain.

With growth ``1 + mu +/- gamma`` and stay probability ``phi`` in both states,
the stationary law is uniform and the moments are available in closed form:
mean ``1 + mu``, variance ``gamma**2``, lag-1 autocorrelation ``2*phi - 1``.
Calibration inverts that map exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import MarkovChain, MomentTargets, TimeSeries
from .errors import EmptyFeasibleSet, InvalidMoments, InvalidParameter, InvariantViolation, TooShort, ZeroVariance
from .markov import price_batch, stationary_distribution


@dataclass(frozen=True)
class TwoStateParams:
    mu: float
    gamma: float
    phi: float

    def __post_init__(self):
        if not self.gamma >= 0:
            raise InvariantViolation(f"gamma must be >= 0, got {self.gamma}")
        if not 0 <= self.phi <= 1:
            raise InvariantViolation(f"phi must lie in [0, 1], got {self.phi}")
        if not 1 + self.mu - self.gamma > 0:
            raise InvariantViolation("both growth states must be positive")

    @property
    def states(self) -> tuple[float, float]:
        return (1 + self.mu + self.gamma, 1 + self.mu - self.gamma)

    def chain(self) -> MarkovChain:
        p = self.phi
        return MarkovChain(self.states, [[p, 1 - p], [1 - p, p]])


def two_state_moments(params: TwoStateParams) -> MomentTargets:
    return MomentTargets(
        mean_growth=1 + params.mu,
        variance=params.gamma ** 2,
        autocorr=2 * params.phi - 1,
    )


def calibrate_two_state(targets: MomentTargets) -> TwoStateParams:
    if targets.variance < 0 or not abs(targets.autocorr) < 1:
        raise InvalidMoments("variance must be >= 0 and |autocorr| < 1")
    return TwoStateParams(
        mu=targets.mean_growth - 1,
        gamma=math.sqrt(targets.variance),
        phi=(1 + targets.autocorr) / 2,
    )


GROWTH_KINDS = ("gross_growth", "levels", "log_levels", "log_growth")


def to_gross_growth(values, kind: str) -> np.ndarray:
    """Convert observations to gross growth rates.

    ``levels`` takes ratios of consecutive levels, ``log_levels`` exponentiates
    first differences, ``log_growth`` exponentiates, ``gross_growth`` passes
    through.
    """
    values = np.asarray(values, dtype=float)
    if kind == "gross_growth":
        return values
    if kind == "levels":
        return values[1:] / values[:-1]
    if kind == "log_levels":
        return np.exp(np.diff(values))
    if kind == "log_growth":
        return np.exp(values)
    raise InvalidParameter(f"unknown series kind {kind!r}; expected one of {GROWTH_KINDS}")


def sample_moments(series: TimeSeries, kind: str = "gross_growth") -> MomentTargets:
    """Sample mean, unbiased variance and lag-1 autocorrelation of gross growth."""
    if len(series) < 3:
        raise TooShort(f"need at least 3 observations, got {len(series)}")
    growth = to_gross_growth(series.values, kind)
    if growth.shape[0] < 3:
        raise TooShort("fewer than 3 growth observations")
    d = growth - growth.mean()
    ss = float(np.dot(d, d))
    if ss == 0 or np.ptp(growth) == 0:
        raise ZeroVariance("growth series is constant; autocorrelation undefined")
    return MomentTargets(
        mean_growth=float(growth.mean()),
        variance=float(growth.var(ddof=1)),
        autocorr=float(np.dot(d[:-1], d[1:]) / ss),
    )


@dataclass(frozen=True, eq=False)
class MaxPremiumResult:
    premium: float
    alpha: float
    beta: float
    rf: float
    params: TwoStateParams
    alphas: np.ndarray = field(repr=False)
    betas: np.ndarray = field(repr=False)
    premium_grid: np.ndarray = field(repr=False)
    rf_grid: np.ndarray = field(repr=False)
    feasible: np.ndarray = field(repr=False)

    @property
    def n_feasible(self) -> int:
        return int(self.feasible.sum())


def default_grid(lo: float, hi: float, n: int, shrink: float, open_hi: bool) -> np.ndarray:
    """``n`` points over (lo, hi] or (lo, hi); open ends are pulled in by ``shrink``."""
    return np.linspace(lo + shrink, hi - shrink if open_hi else hi, n)


def max_premium_search(
    targets: MomentTargets,
    alpha_range: tuple[float, float] = (0.0, 10.0),
    beta_range: tuple[float, float] = (0.0, 1.0),
    rf_band: tuple[float, float] = (0.0, 0.04),
    n_alpha: int = 200,
    n_beta: int = 200,
    shrink: float = 1e-3,
    alphas=None,
    betas=None,
) -> MaxPremiumResult:
    """Largest equilibrium premium over an (alpha, beta) grid.

    The chain is calibrated to ``targets``; each grid point is priced and kept
    when an equilibrium exists and the unconditional net risk-free rate lies
    in ``rf_band``. ``alpha_range`` is treated as (lo, hi] and ``beta_range``
    as (lo, hi). Explicit ``alphas``/``betas`` arrays override the grids.
    """
    params = calibrate_two_state(targets)
    chain = params.chain()
    if alphas is None:
        if n_alpha < 1 or alpha_range[1] <= alpha_range[0]:
            raise InvalidParameter("empty alpha range")
        alphas = default_grid(*alpha_range, n_alpha, shrink, open_hi=False)
    if betas is None:
        if n_beta < 1 or beta_range[1] <= beta_range[0]:
            raise InvalidParameter("empty beta range")
        betas = default_grid(*beta_range, n_beta, shrink, open_hi=True)
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)

    a_grid, b_grid = np.meshgrid(alphas, betas, indexing="ij")
    out = price_batch(
        chain.states, chain.transition, a_grid, b_grid, stationary_distribution(chain), aperiodic=chain.aperiodic
    )
    rf = out["rf"]
    feasible = out["exists"] & (rf >= rf_band[0]) & (rf <= rf_band[1])
    if not feasible.any():
        raise EmptyFeasibleSet(f"no grid point has a risk-free rate in [{rf_band[0]}, {rf_band[1]}]")
    premium = np.where(feasible, out["premium"], -np.inf)
    i, j = np.unravel_index(int(np.argmax(premium)), premium.shape)
    return MaxPremiumResult(
        premium=float(premium[i, j]),
        alpha=float(alphas[i]),
        beta=float(betas[j]),
        rf=float(rf[i, j]),
        params=params,
        alphas=alphas,
        betas=betas,
        premium_grid=np.where(out["exists"], out["premium"], np.nan),
        rf_grid=rf,
        feasible=feasible,
    )
