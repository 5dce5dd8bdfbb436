"""Long-run-risks economy with recursive preferences.

State dynamics (all shocks i.i.d. standard normal and mutually independent):

    q'       = rho * q + phi_e * sigma_t * eps'
    g'       = mu + q + sigma_t * eta'
    g_d'     = mu_d + phi_lev * q + phi_d * sigma_t * u'
    sigma2'  = sigma2_bar + nu1 * (sigma2_t - sigma2_bar) + sigma_w * w'

The log SDF is ``m' = theta ln(beta) - (theta/ies) g' + (theta - 1) r_a'`` with
``theta = (1 - alpha) / (1 - 1/ies)``, where ``r_a`` is the log return on the
consumption claim. Claims are priced with the log-linear return

    r' = k0 + k1 z' - z + (log dividend growth)',   z = A0 + A1 q + A2 sigma2,

so conditional on date-t states every log return and the log SDF are
Gaussian and the Euler equation can be imposed coefficient by coefficient.
The linearization constants ``k0, k1`` are solved jointly with the mean log
valuation ratio ``z_bar = A0 + A2 sigma2_bar``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidParameter, InvariantViolation, NoFixedPoint, TooShort
from .stats import batch_means_se

VARIANCE_FLOOR = 1e-12
FIXED_POINT_TOL = 1e-10
FIXED_POINT_MAX_ITER = 10_000
DAMPING = 0.5
MIN_EULER_LENGTH = 10_000


@dataclass(frozen=True)
class LrrParams:
    beta: float
    alpha: float
    ies: float
    mu: float
    mu_d: float
    rho: float
    phi_e: float
    phi_lev: float
    phi_d: float
    sigma2_bar: float
    nu1: float
    sigma_w: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvariantViolation(f"beta must be > 0, got {self.beta}")
        if not self.ies > 0:
            raise InvariantViolation(f"ies must be > 0, got {self.ies}")
        if self.ies == 1:
            raise InvariantViolation("ies = 1 leaves theta undefined")
        if self.alpha == 1:
            # theta = 0: the SDF is -r_a and claim prices are indeterminate
            raise InvariantViolation("alpha = 1 gives theta = 0; valuation ratios are not identified")
        if not self.sigma2_bar > 0:
            raise InvariantViolation(f"sigma2_bar must be > 0, got {self.sigma2_bar}")
        if not 0 <= self.nu1 < 1:
            raise InvariantViolation(f"nu1 must lie in [0, 1), got {self.nu1}")
        if not abs(self.rho) < 1:
            raise InvariantViolation(f"|rho| must be < 1, got {self.rho}")
        if self.sigma_w < 0 or self.phi_e < 0 or self.phi_d < 0:
            raise InvariantViolation("volatility scales must be >= 0")

    @property
    def theta(self) -> float:
        return (1 - self.alpha) / (1 - 1 / self.ies)


@dataclass(frozen=True)
class ClaimSolution:
    """Log-linear valuation of a claim: ``z = A0 + A1 q + A2 sigma2``.

    ``a0``/``a1`` are the linearization constants k0/k1. The same record
    serves the consumption claim and the dividend claim.
    """

    a0: float
    a1: float
    A0: float
    A1: float
    A2: float
    z_bar: float
    residual: float
    iterations: int

    def z(self, q, sigma2):
        return self.A0 + self.A1 * np.asarray(q) + self.A2 * np.asarray(sigma2)


# backwards-readable alias matching the consumption-claim use
ConsumptionClaimSolution = ClaimSolution


def _linearization(z_bar: float) -> tuple[float, float]:
    # k1 = e^z / (1 + e^z), k0 = ln(1 + e^z) - k1 z, written to avoid overflow
    k1 = 1.0 / (1.0 + math.exp(-z_bar))
    k0 = (z_bar + math.log1p(math.exp(-z_bar)) if z_bar > 0 else math.log1p(math.exp(z_bar))) - k1 * z_bar
    return k0, k1


@dataclass(frozen=True)
class _AffineSdf:
    """m' = const + mq q + ms sigma2 + sigma_t (l_eta eta' + l_eps eps') + l_w w'."""

    const: float
    mq: float
    ms: float
    l_eta: float
    l_eps: float
    l_w: float


def _consumption_coefficients(p: LrrParams, k0: float, k1: float):
    th = p.theta
    a = 1 - 1 / p.ies
    A1 = a / (1 - k1 * p.rho)
    A2 = 0.5 * ((th * a) ** 2 + (th * k1 * A1 * p.phi_e) ** 2) / (th * (1 - k1 * p.nu1))
    A0 = (
        math.log(p.beta)
        + a * p.mu
        + k0
        + k1 * A2 * p.sigma2_bar * (1 - p.nu1)
        + 0.5 * th * (k1 * A2 * p.sigma_w) ** 2
    ) / (1 - k1)
    return A0, A1, A2


def _iterate(coefficients, z0: float, tol: float, damping: float, max_iter: int, sigma2_bar: float, what: str):
    z = z0
    for it in range(1, max_iter + 1):
        k0, k1 = _linearization(z)
        A0, A1, A2 = coefficients(k0, k1)
        z_new = A0 + A2 * sigma2_bar
        if not math.isfinite(z_new):
            break
        step = z_new - z
        if abs(step) < tol:
            k0, k1 = _linearization(z_new)
            A0, A1, A2 = coefficients(k0, k1)
            resid = abs(A0 + A2 * sigma2_bar - z_new)
            return ClaimSolution(k0, k1, A0, A1, A2, z_new, resid, it)
        # keep the damped step bounded so exp(z) stays representable
        z = z + damping * max(min(step, 50.0), -50.0)
    raise NoFixedPoint(f"{what}: linearization fixed point did not converge in {max_iter} steps")


def solve_consumption_claim(
    params: LrrParams,
    tol: float = FIXED_POINT_TOL,
    damping: float = DAMPING,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> ClaimSolution:
    """Undetermined coefficients for the wealth-consumption ratio.

    Imposing E_t[exp(m' + r_a')] = 1 for every (q, sigma2) gives

        A1 = (1 - 1/ies) / (1 - k1 rho)
        A2 = [(theta (1 - 1/ies))^2 + (theta k1 A1 phi_e)^2] / (2 theta (1 - k1 nu1))

    and A0 from the constant term; k1 depends on z_bar, so the system is
    iterated with damping until z_bar is stationary.
    """
    z0 = math.log(params.beta / abs(1 - params.beta)) if params.beta != 1 else 5.0
    return _iterate(
        lambda k0, k1: _consumption_coefficients(params, k0, k1),
        z0, tol, damping, max_iter, params.sigma2_bar, "consumption claim",
    )


def _sdf_coefficients(p: LrrParams, c: ClaimSolution) -> _AffineSdf:
    th = p.theta
    k0, k1 = c.a0, c.a1
    const = (
        th * math.log(p.beta)
        - th / p.ies * p.mu
        + (th - 1) * (k0 + (k1 - 1) * c.A0 + k1 * c.A2 * p.sigma2_bar * (1 - p.nu1) + p.mu)
    )
    mq = -th / p.ies + (th - 1) * (c.A1 * (k1 * p.rho - 1) + 1)
    ms = (th - 1) * c.A2 * (k1 * p.nu1 - 1)
    return _AffineSdf(
        const=const,
        mq=mq,
        ms=ms,
        l_eta=-th / p.ies + (th - 1),
        l_eps=(th - 1) * k1 * c.A1 * p.phi_e,
        l_w=(th - 1) * k1 * c.A2 * p.sigma_w,
    )


def _dividend_coefficients(p: LrrParams, s: _AffineSdf, k0: float, k1: float):
    A1 = (s.mq + p.phi_lev) / (1 - k1 * p.rho)
    A2 = (s.ms + 0.5 * (s.l_eta ** 2 + (s.l_eps + k1 * A1 * p.phi_e) ** 2 + p.phi_d ** 2)) / (1 - k1 * p.nu1)
    A0 = (
        s.const + k0 + k1 * A2 * p.sigma2_bar * (1 - p.nu1) + p.mu_d + 0.5 * (s.l_w + k1 * A2 * p.sigma_w) ** 2
    ) / (1 - k1)
    return A0, A1, A2


def solve_dividend_claim(
    params: LrrParams,
    claim: ClaimSolution | None = None,
    tol: float = FIXED_POINT_TOL,
    damping: float = DAMPING,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> ClaimSolution:
    """Same machinery applied to the dividend stream, priced by the solved SDF."""
    if claim is None:
        claim = solve_consumption_claim(params, tol, damping, max_iter)
    s = _sdf_coefficients(params, claim)
    return _iterate(
        lambda k0, k1: _dividend_coefficients(params, s, k0, k1),
        claim.z_bar, tol, damping, max_iter, params.sigma2_bar, "dividend claim",
    )


@dataclass(frozen=True, eq=False)
class LrrStatePath:
    q_series: np.ndarray = field(repr=False)
    sigma2_series: np.ndarray = field(repr=False)
    g_series: np.ndarray = field(repr=False)
    gd_series: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    seed: int | None
    floor_hits: int = 0

    @property
    def horizon(self) -> int:
        return self.g_series.shape[0]

    @property
    def floor_rate(self) -> float:
        return self.floor_hits / self.horizon


def simulate_states(params: LrrParams, horizon: int, seed: int | None = None) -> LrrStatePath:
    """State path from ``q_0 = 0``, ``sigma2_0 = sigma2_bar``.

    ``q_series`` and ``sigma2_series`` have ``horizon + 1`` entries; growth
    series have ``horizon`` entries with ``g_series[t]`` realized between
    dates t and t+1. Variance is floored at ``VARIANCE_FLOOR``.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be >= 1, got {horizon}")
    rng = np.random.default_rng(seed)
    eps, eta, u, w = rng.standard_normal((4, horizon))
    p = params
    q, s2, hits = _kernels.lrr_states(eps, w, p.rho, p.phi_e, p.sigma2_bar, p.nu1, p.sigma_w, VARIANCE_FLOOR)
    sd = np.sqrt(s2[:-1])
    g = p.mu + q[:-1] + sd * eta
    gd = p.mu_d + p.phi_lev * q[:-1] + p.phi_d * sd * u
    return LrrStatePath(q, s2, g, gd, eps, eta, u, w, seed, int(hits))


def claim_returns(claim: ClaimSolution, states: LrrStatePath, growth) -> np.ndarray:
    """Realized log returns ``k0 + k1 z_{t+1} - z_t + growth_t``."""
    z = claim.z(states.q_series, states.sigma2_series)
    return claim.a0 + claim.a1 * z[1:] - z[:-1] + np.asarray(growth)


def sdf_path(params: LrrParams, states: LrrStatePath, claim: ClaimSolution) -> np.ndarray:
    th = params.theta
    m = th * math.log(params.beta) - th / params.ies * states.g_series
    if th != 1:
        m = m + (th - 1) * claim_returns(claim, states, states.g_series)
    return m


def _conditional_rf(p: LrrParams, c: ClaimSolution, q, sigma2):
    th = p.theta
    k1 = c.a1
    mean_g = p.mu + q
    z = c.z(q, sigma2)
    mean_z_next = c.A0 + c.A1 * p.rho * q + c.A2 * (p.sigma2_bar + p.nu1 * (sigma2 - p.sigma2_bar))
    mean_ra = c.a0 + k1 * mean_z_next - z + mean_g
    var = (
        (th / p.ies + 1 - th) ** 2 * sigma2
        + ((1 - th) * k1 * c.A1 * p.phi_e) ** 2 * sigma2
        + ((1 - th) * k1 * c.A2 * p.sigma_w) ** 2
    )
    return -th * math.log(p.beta) + th / p.ies * mean_g + (1 - th) * mean_ra - 0.5 * var


def risk_free_path(params: LrrParams, states: LrrStatePath, claim: ClaimSolution) -> np.ndarray:
    """Conditional log risk-free rate known at each date t = 0..T-1."""
    return _conditional_rf(params, claim, states.q_series[:-1], states.sigma2_series[:-1])


@dataclass(frozen=True)
class EulerResidual:
    residual: float
    se: float
    mean: float
    n: int


def euler_residual(m_series, r_series, min_length: int = MIN_EULER_LENGTH) -> EulerResidual:
    """|mean(exp(m + r)) - 1| with its i.i.d. standard error."""
    m = np.asarray(m_series, dtype=float)
    r = np.asarray(r_series, dtype=float)
    if m.shape != r.shape:
        raise InvalidParameter(f"length mismatch: {m.shape} vs {r.shape}")
    if m.shape[0] < min_length:
        raise TooShort(f"need at least {min_length} periods, got {m.shape[0]}")
    x = np.exp(m + r)
    mean = float(x.mean())
    return EulerResidual(abs(mean - 1.0), float(x.std(ddof=1) / math.sqrt(x.shape[0])), mean, x.shape[0])


def conditional_moments(params: LrrParams, claim: ClaimSolution, priced: ClaimSolution, q, sigma2, growth: str):
    """Conditional mean excess log return and log-return volatility of ``priced``.

    ``claim`` is the consumption-claim solution behind the SDF; ``growth``
    selects the cash flow of ``priced``: ``"dividend"`` or ``"consumption"``.
    """
    p = params
    c = priced
    k1 = c.a1
    if growth == "dividend":
        mean_cf, cf_q_var = p.mu_d + p.phi_lev * q, p.phi_d ** 2
    else:
        mean_cf, cf_q_var = p.mu + q, 1.0
    mean_z_next = c.A0 + c.A1 * p.rho * q + c.A2 * (p.sigma2_bar + p.nu1 * (sigma2 - p.sigma2_bar))
    mean_r = c.a0 + k1 * mean_z_next - c.z(q, sigma2) + mean_cf
    var_r = ((k1 * c.A1 * p.phi_e) ** 2 + cf_q_var) * sigma2 + (k1 * c.A2 * p.sigma_w) ** 2
    excess = mean_r - _conditional_rf(p, claim, q, sigma2)
    return excess, np.sqrt(var_r)


@dataclass(frozen=True)
class LrrPremium:
    premium: float
    se: float
    mean_rf: float
    sharpe_mean: float
    sharpe_std: float
    claim: str
    horizon: int
    seed: int | None
    floor_rate: float


def premium_by_simulation(params: LrrParams, horizon: int, seed: int | None = None, claim: str = "dividend") -> LrrPremium:
    """Average realized log excess return on a claim along a simulated path.

    ``claim="dividend"`` prices the market (dividend) claim, ``"consumption"``
    the wealth claim. The conditional Sharpe ratio (mean excess log return over
    log-return volatility) is evaluated at each visited state; its dispersion
    is zero exactly when volatility is constant.
    """
    if claim not in ("dividend", "consumption"):
        raise InvalidParameter(f"claim must be 'dividend' or 'consumption', got {claim!r}")
    cons = solve_consumption_claim(params)
    states = simulate_states(params, horizon, seed)
    if claim == "dividend":
        priced = solve_dividend_claim(params, cons)
        r = claim_returns(priced, states, states.gd_series)
    else:
        priced = cons
        r = claim_returns(priced, states, states.g_series)
    rf = risk_free_path(params, states, cons)
    excess = r - rf
    mean_x, vol = conditional_moments(params, cons, priced, states.q_series[:-1], states.sigma2_series[:-1], claim)
    sharpe = mean_x / vol
    return LrrPremium(
        premium=float(excess.mean()),
        se=batch_means_se(excess),
        mean_rf=float(rf.mean()),
        sharpe_mean=float(sharpe.mean()),
        sharpe_std=float(sharpe.std()),
        claim=claim,
        horizon=horizon,
        seed=seed,
        floor_rate=states.floor_rate,
    )
