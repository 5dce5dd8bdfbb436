"""Closed-form SDF analytics under lognormal consumption growth.

With CRRA utility and log growth ``x ~ N(E, sigma^2)`` the discount factor is
``m = beta * exp(-alpha * x)``. Its volatility ratio sigma(m)/E(m) bounds the
Sharpe ratio of every asset, with equality on the mean-variance frontier
(the return called ``R^mv`` in the docs; it has no data representation here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import LogNormalGrowth, PreferenceParams
from .errors import InvalidParameter, NoSolution

ALPHA_SEARCH_MAX = 1e4
ALPHA_XTOL = 1e-10


@dataclass(frozen=True)
class HjResult:
    exact_ratio: float
    approx_ratio: float
    relative_gap: float


def _exact_bound(alpha: float, sigma: float) -> float:
    # y * sqrt(expm1(y^2) / y^2) keeps exact >= y = alpha*sigma even when y^2 underflows
    y = alpha * sigma
    x = y * y
    if y == 0:
        return 0.0
    if x == 0:
        return y
    with np.errstate(over="ignore"):
        return float(y * np.sqrt(max(np.expm1(x) / x, 1.0)))


def hj_bound(alpha: float, growth: LogNormalGrowth) -> HjResult:
    """Hansen-Jagannathan volatility ratio for the CRRA lognormal SDF.

    ``exact_ratio = sqrt(exp(alpha^2 sigma^2) - 1)`` and the first-order
    ``approx_ratio = alpha * sigma``. The mean of log growth drops out.
    """
    if not alpha >= 0:
        raise InvalidParameter(f"alpha must be >= 0, got {alpha}")
    exact = _exact_bound(alpha, growth.sigma)
    approx = alpha * growth.sigma
    gap = (exact - approx) / exact if exact > 0 else 0.0
    return HjResult(exact_ratio=exact, approx_ratio=approx, relative_gap=gap)


def risk_free_rate(prefs: PreferenceParams, growth: LogNormalGrowth, jensen: bool = True) -> float:
    """Log risk-free rate ``delta + alpha*E(dc) - alpha^2 sigma^2 / 2``.

    ``jensen=False`` drops the variance term.
    """
    rate = prefs.delta + prefs.alpha * growth.mean
    if jensen:
        rate -= 0.5 * (prefs.alpha * growth.sigma) ** 2
    return rate


@dataclass(frozen=True)
class ImpliedAlpha:
    approx: float
    exact: float


def implied_risk_aversion(
    sharpe: float, growth: LogNormalGrowth, correlation: float = 1.0
) -> ImpliedAlpha:
    """Risk aversion needed for the bound times |correlation| to reach ``sharpe``.

    The linear form inverts ``sharpe = corr * alpha * sigma``; the exact form is
    found by bisection on ``corr * sqrt(exp(alpha^2 sigma^2) - 1) = sharpe``
    over ``alpha`` in (0, 1e4].
    """
    if not sharpe >= 0:
        raise InvalidParameter(f"sharpe must be >= 0, got {sharpe}")
    if not growth.sigma > 0:
        raise InvalidParameter("sigma must be > 0 to invert the bound")
    if not 0 < correlation <= 1:
        raise InvalidParameter(f"correlation must lie in (0, 1], got {correlation}")
    if sharpe == 0:
        return ImpliedAlpha(0.0, 0.0)

    target = sharpe / correlation
    approx = target / growth.sigma

    def excess(alpha):
        return _exact_bound(alpha, growth.sigma) - target

    if excess(ALPHA_SEARCH_MAX) < 0:
        raise NoSolution(
            f"Sharpe ratio {sharpe} with correlation {correlation} exceeds the bound "
            f"attainable for alpha <= {ALPHA_SEARCH_MAX:g}"
        )
    exact = bisect(excess, 0.0, ALPHA_SEARCH_MAX, xtol=ALPHA_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
    return ImpliedAlpha(approx=approx, exact=float(exact))


def implied_subjective_discount(
    target_rf: float, alpha: float, growth: LogNormalGrowth, jensen: bool = True
) -> float:
    """Discount rate delta that delivers a log risk-free rate of ``target_rf``."""
    if not alpha >= 0:
        raise InvalidParameter(f"alpha must be >= 0, got {alpha}")
    delta = target_rf - alpha * growth.mean
    if jensen:
        delta += 0.5 * (alpha * growth.sigma) ** 2
    return delta

