"""Pure-exchange equilibrium with Markov consumption growth.

Dividends equal consumption and grow by ``states[j]`` when the chain moves to
state ``j``. Prices are homogeneous of degree one in the endowment, so the
equity price is ``w_i * c`` and the price-dividend weights solve

    w_i = beta * sum_j P_ij * lam_j^(1 - alpha) * (w_j + 1).

Returns are reported as net rates per period. Nothing here takes an
endowment level as input, which is the homogeneity property in code form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import MarkovChain, PreferenceParams
from .errors import InvalidHorizon, NoEquilibrium, SingularSystem
from .stats import batch_means_se

RADIUS_TOL = 1e-10
RADIUS_MAX_ITER = 10_000
SINGULAR_COND = 1e12


def stationary_distribution(chain: MarkovChain) -> np.ndarray:
    """Solve ``pi = P^T pi`` with ``sum(pi) = 1`` by a direct linear solve."""
    return stationary_from_transition(chain.transition)


def stationary_from_transition(transition) -> np.ndarray:
    transition = np.asarray(transition, dtype=float)
    n = transition.shape[0]
    system = transition.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(system, rhs)
    # round-off can leave entries of order -1e-17
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    return pi / pi.sum()


def spectral_radius(a, tol: float = RADIUS_TOL, max_iter: int = RADIUS_MAX_ITER, shift: bool = False):
    """Perron root of nonnegative irreducible matrices by power iteration.

    Works on stacks ``(..., n, n)``. The Collatz-Wielandt quotients of the
    iterate bracket the root from both sides; iteration stops once the bracket
    is narrower than ``tol`` (relative). ``shift=True`` iterates on ``A + I``,
    which is needed for periodic patterns. Returns ``(estimate, lower, upper)``.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[-1]
    m = a + np.eye(n) if shift else a
    x = np.ones(a.shape[:-1])
    lo = hi = None
    for _ in range(max_iter):
        y = np.einsum("...ij,...j->...i", m, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = y / x
        lo = ratio.min(axis=-1)
        hi = ratio.max(axis=-1)
        if np.all(hi - lo <= tol * np.maximum(np.abs(hi), 1e-300)):
            break
        x = y / y.max(axis=-1, keepdims=True)
    off = 1.0 if shift else 0.0
    lo, hi = lo - off, hi - off
    return 0.5 * (lo + hi), lo, hi


def pricing_matrix(states, transition, alpha, beta):
    """``A_ij = beta * P_ij * lam_j^(1 - alpha)``, broadcasting over leading axes."""
    states = np.asarray(states, dtype=float)
    alpha = np.asarray(alpha, dtype=float)[..., None]
    beta = np.asarray(beta, dtype=float)[..., None, None]
    scale = states ** (1.0 - alpha)
    return beta * np.asarray(transition, dtype=float) * scale[..., None, :]


def price_batch(states, transition, alpha, beta, stationary, aperiodic: bool = True):
    """Vectorized pricer used by grid searches.

    ``states`` is ``(..., n)``, ``transition`` ``(..., n, n)``, ``alpha`` and
    ``beta`` broadcast over the leading axes. Returns a dict of arrays; points
    with no equilibrium have ``exists == False`` and NaN prices.
    """
    states = np.asarray(states, dtype=float)
    transition = np.asarray(transition, dtype=float)
    a = pricing_matrix(states, transition, alpha, beta)
    shape = a.shape[:-2]
    n = a.shape[-1]
    transition = np.broadcast_to(transition, shape + (n, n))
    states = np.broadcast_to(states, shape + (n,))
    alpha_b = np.broadcast_to(np.asarray(alpha, dtype=float), shape)
    beta_b = np.broadcast_to(np.asarray(beta, dtype=float), shape)
    stationary = np.broadcast_to(np.asarray(stationary, dtype=float), shape + (n,))

    radius, _, hi = spectral_radius(a, shift=not aperiodic)
    exists = hi < 1.0

    safe = np.where(exists[..., None, None], a, 0.0)
    lhs = np.eye(n) - safe
    w = np.linalg.solve(lhs, safe.sum(axis=-1)[..., None])[..., 0]
    w = np.where(exists[..., None], w, np.nan)

    ret = states[..., None, :] * (w[..., None, :] + 1.0) / w[..., :, None] - 1.0
    cond_equity = np.sum(transition * ret, axis=-1)
    rf_price = beta_b[..., None] * np.sum(transition * states[..., None, :] ** (-alpha_b[..., None, None]), axis=-1)
    cond_rf = 1.0 / rf_price - 1.0
    equity = np.sum(stationary * cond_equity, axis=-1)
    rf = np.sum(stationary * cond_rf, axis=-1)
    rf = np.where(exists, rf, np.nan)
    return {
        "exists": exists,
        "radius": radius,
        "weights": w,
        "equity_return_matrix": ret,
        "conditional_equity": cond_equity,
        "rf_prices": rf_price,
        "conditional_rf": cond_rf,
        "equity": equity,
        "rf": rf,
        "premium": equity - rf,
        "lhs": lhs,
    }


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    weights: np.ndarray
    equity_return_matrix: np.ndarray
    conditional_equity: np.ndarray
    rf_prices: np.ndarray
    conditional_rf: np.ndarray
    stationary: np.ndarray
    unconditional_equity: float
    unconditional_rf: float
    premium: float
    spectral_radius: float


def solve_equilibrium(chain: MarkovChain, prefs: PreferenceParams) -> EquilibriumSolution:
    pi = stationary_distribution(chain)
    out = price_batch(chain.states, chain.transition, prefs.alpha, prefs.beta, pi, aperiodic=chain.aperiodic)
    if not out["exists"]:
        raise NoEquilibrium(
            f"spectral radius {float(out['radius']):.12g} >= 1 for alpha={prefs.alpha}, beta={prefs.beta}"
        )
    cond = np.linalg.cond(out["lhs"])
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularSystem(f"I - A has condition number {cond:.3g}")
    arrays = {}
    for key in ("weights", "equity_return_matrix", "conditional_equity", "rf_prices", "conditional_rf"):
        arr = np.array(out[key])
        arr.setflags(write=False)
        arrays[key] = arr
    pi.setflags(write=False)
    return EquilibriumSolution(
        stationary=pi,
        unconditional_equity=float(out["equity"]),
        unconditional_rf=float(out["rf"]),
        premium=float(out["premium"]),
        spectral_radius=float(out["radius"]),
        **arrays,
    )


@dataclass(frozen=True)
class EconomySimulation:
    horizon: int
    seed: int
    equity: float
    rf: float
    premium: float
    equity_se: float
    rf_se: float
    premium_se: float


def simulate_path(chain: MarkovChain, horizon: int, rng: np.random.Generator, start: int | None = None) -> np.ndarray:
    """State indices of length ``horizon + 1``; the start is drawn from pi by default."""
    if start is None:
        pi = stationary_distribution(chain)
        start = int(rng.choice(chain.n, p=pi))
    cumulative = np.cumsum(chain.transition, axis=1)
    return _kernels.markov_path(rng.random(horizon), cumulative, start)


def simulate_economy(chain: MarkovChain, prefs: PreferenceParams, horizon: int, seed: int) -> EconomySimulation:
    """Sample averages of realized equity and risk-free returns along one path.

    The equity return realized on a move i -> j is ``r_ij``; the risk-free
    return earned from state i is ``R^f_i``. Standard errors use batch means.
    """
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    sol = solve_equilibrium(chain, prefs)
    rng = np.random.default_rng(seed)
    path = simulate_path(chain, horizon, rng)
    equity = sol.equity_return_matrix[path[:-1], path[1:]]
    rf = sol.conditional_rf[path[:-1]]
    excess = equity - rf
    return EconomySimulation(
        horizon=horizon,
        seed=seed,
        equity=float(equity.mean()),
        rf=float(rf.mean()),
        premium=float(excess.mean()),
        equity_se=batch_means_se(equity),
        rf_se=batch_means_se(rf),
        premium_se=batch_means_se(excess),
    )
