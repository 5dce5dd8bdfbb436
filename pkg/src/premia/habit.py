"""External-habit economy driven by the log surplus consumption ratio.

Log consumption growth is i.i.d. ``N(g, sigma^2)``. The log surplus ratio
``s = ln((C - X) / C)`` follows

    s' = (1 - rho) * s_bar + rho * s + lam(s) * (dc' - g)

with sensitivity ``lam(s) = sqrt(1 - 2 (s - s_bar)) / S_bar - 1`` and steady
state ``S_bar = sigma * sqrt(alpha / (1 - rho))``. This choice makes the
risk-free rate constant. ``lam`` reaches zero at ``s_max = s_bar + (1 -
S_bar^2) / 2``; above that point it is clamped at zero and simulated paths are
capped at ``s_max``.

Gross mean growth ``G`` in the SDF is read as ``exp(g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidParameter, InvalidSurplus, InvariantViolation, OutOfDomain
from .quadrature import DEFAULT_NODES, expect_normal


@dataclass(frozen=True)
class HabitParams:
    """Preference and endowment parameters.

    ``alpha == 0`` or ``sigma == 0`` give a degenerate steady state
    ``S_bar == 0`` (``s_bar == -inf``); the constant-rate formula and the
    Sharpe ratio stay defined there, the surplus dynamics do not.
    """

    alpha: float
    beta: float
    g: float
    sigma: float
    rho: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise InvariantViolation(f"alpha must be >= 0, got {self.alpha}")
        if not self.beta > 0:
            raise InvariantViolation(f"beta must be > 0, got {self.beta}")
        if not self.sigma >= 0:
            raise InvariantViolation(f"sigma must be >= 0, got {self.sigma}")
        if not 0 <= self.rho < 1:
            raise InvariantViolation(f"rho must lie in [0, 1), got {self.rho}")
        if not self.S_bar < 1:
            raise InvariantViolation(
                f"steady-state surplus sigma*sqrt(alpha/(1-rho)) = {self.S_bar:.6g} must be < 1"
            )

    @property
    def S_bar(self) -> float:
        return self.sigma * math.sqrt(self.alpha / (1 - self.rho))

    @property
    def s_bar(self) -> float:
        return math.log(self.S_bar) if self.S_bar > 0 else -math.inf

    @property
    def s_max(self) -> float:
        return self.s_bar + 0.5 * (1 - self.S_bar ** 2)

    @property
    def degenerate(self) -> bool:
        return self.S_bar == 0


def _require_regular(params: HabitParams):
    if params.degenerate:
        raise OutOfDomain("surplus dynamics are undefined when S_bar == 0")


def sensitivity(s, params: HabitParams):
    """lam(s), clamped at zero for ``s >= s_max``. Accepts arrays."""
    _require_regular(params)
    s_arr = np.asarray(s, dtype=float)
    arg = 1 - 2 * (s_arr - params.s_bar)
    if np.any(arg < 0) or np.any(~np.isfinite(s_arr)):
        raise OutOfDomain(f"1 - 2(s - s_bar) < 0 for s above {params.s_bar + 0.5:.6g}")
    lam = np.maximum(np.sqrt(arg) / params.S_bar - 1, 0.0)
    return float(lam) if lam.ndim == 0 else lam


def risk_free_const(params: HabitParams) -> float:
    """``-ln(beta) + alpha*g - alpha*(1 - rho)/2``."""
    return -math.log(params.beta) + params.alpha * params.g - 0.5 * params.alpha * (1 - params.rho)


def sdf(s_t, shock, params: HabitParams):
    """One-period discount factor given the current log surplus and the growth shock."""
    if params.alpha == 0:
        return params.beta * np.ones(np.broadcast(np.asarray(s_t), np.asarray(shock)).shape)[()]
    lam = np.asarray(sensitivity(s_t, params))
    shock = np.asarray(shock, dtype=float)
    expo = (1 - params.rho) * (params.s_bar - np.asarray(s_t, dtype=float)) + shock * (1 + lam)
    return params.beta * np.exp(-params.alpha * params.g) * np.exp(-params.alpha * expo)


def expected_sdf(s_t, params: HabitParams, nodes: int = DEFAULT_NODES):
    """E_t[M_{t+1}] by Gauss-Hermite quadrature over the growth shock."""
    s_arr = np.asarray(s_t, dtype=float)
    out = expect_normal(lambda x: sdf(s_arr[..., None], x, params), 0.0, params.sigma, nodes)
    return out[()] if np.ndim(out) == 0 else out


def risk_free_quadrature(s_t, params: HabitParams, nodes: int = DEFAULT_NODES):
    return -np.log(expected_sdf(s_t, params, nodes))


def conditional_sharpe(s, params: HabitParams) -> tuple:
    """(exact, approx) conditional Sharpe bound at log surplus ``s``.

    exact = sqrt(exp(alpha^2 sigma^2 (1 + lam)^2) - 1), approx = alpha sigma (1 + lam).
    """
    if params.alpha == 0 or params.sigma == 0:
        zero = np.zeros(np.shape(s))[()]
        return zero, zero
    lam = np.asarray(sensitivity(s, params))
    approx = params.alpha * params.sigma * (1 + lam)
    exact = np.sqrt(np.expm1(approx ** 2))
    return exact[()], approx[()]


def local_curvature(S_t, alpha: float):
    """``alpha / S_t``."""
    S = np.asarray(S_t, dtype=float)
    if np.any(S <= 0) or np.any(S > 1):
        raise InvalidSurplus(f"surplus ratio must lie in (0, 1], got {S_t}")
    return (alpha / S)[()]


@dataclass(frozen=True, eq=False)
class SurplusPath:
    s_series: np.ndarray = field(repr=False)
    shocks: np.ndarray = field(repr=False)
    seed: int | None
    cap_hits: int = 0


def simulate_surplus(
    params: HabitParams,
    horizon: int,
    seed: int | None = None,
    burn_in: int = 0,
    shocks=None,
) -> SurplusPath:
    """Surplus path of length ``horizon + 1`` started at ``s_bar``.

    Shocks are i.i.d. ``N(0, sigma^2)`` from ``seed`` unless given explicitly.
    ``burn_in`` extra periods are simulated first and dropped.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be >= 1, got {horizon}")
    total = horizon + burn_in
    if shocks is None:
        if params.sigma == 0:
            shocks = np.zeros(total)
        else:
            shocks = np.random.default_rng(seed).normal(0.0, params.sigma, size=total)
    shocks = np.asarray(shocks, dtype=float)
    if shocks.shape != (total,):
        raise InvalidParameter(f"expected {total} shocks, got shape {shocks.shape}")
    if params.degenerate:
        if np.any(shocks != 0):
            raise OutOfDomain("surplus dynamics are undefined when S_bar == 0")
        s = np.full(total + 1, params.s_bar)
        caps = 0
    else:
        s, caps = _kernels.surplus_path(shocks, params.s_bar, params.s_bar, params.S_bar, params.s_max, params.rho)
    return SurplusPath(s_series=s[burn_in:], shocks=shocks[burn_in:], seed=seed, cap_hits=int(caps))
