"""Three-state growth chain with a rare crash state (good / bad / ugly).

Growth rates are ``1 + mu + gamma``, ``1 + mu - gamma`` and ``psi * (1 + mu)``.
A crash can follow either normal state with probability ``eta``, never
follows itself, and is followed by the good or bad state with equal odds:

    [[phi,           1 - phi - eta, eta],
     [1 - phi - eta, phi,           eta],
     [1/2,           1/2,           0  ]]
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .core import MarkovChain, PreferenceParams
from .errors import InvalidParameter, NonStochastic, NotFound, OrderingViolated
from .markov import price_batch, solve_equilibrium, stationary_from_transition

# crash probabilities covered by the standard calibration; informational only
CALIBRATION_ETA_BAND = (0.0001, 0.2)


@dataclass(frozen=True)
class DisasterSpec:
    mu: float
    gamma: float
    psi: float
    phi: float
    eta: float

    def __post_init__(self):
        lam1, lam2, lam3 = self.states
        if not (lam1 > lam2 > lam3):
            raise OrderingViolated(
                f"need 1+mu+gamma > 1+mu-gamma > psi*(1+mu); got {lam1:.6g}, {lam2:.6g}, {lam3:.6g}"
            )
        if lam3 <= 0:
            raise OrderingViolated(f"crash growth psi*(1+mu) must be > 0, got {lam3}")
        if self.phi < 0 or self.eta < 0:
            raise NonStochastic("phi and eta must be >= 0")
        if self.phi + self.eta > 1:
            raise NonStochastic(f"phi + eta = {self.phi + self.eta} exceeds 1")

    @property
    def states(self) -> tuple[float, float, float]:
        return (1 + self.mu + self.gamma, 1 + self.mu - self.gamma, self.psi * (1 + self.mu))

    @property
    def in_calibration_band(self) -> bool:
        return CALIBRATION_ETA_BAND[0] <= self.eta <= CALIBRATION_ETA_BAND[1]


def rietz_transition(phi: float, eta: float) -> np.ndarray:
    off = 1 - phi - eta
    return np.array([[phi, off, eta], [off, phi, eta], [0.5, 0.5, 0.0]])


def build_rietz_chain(spec: DisasterSpec) -> MarkovChain:
    """The crash-augmented chain.

    With ``eta == 0`` the crash state is unreachable and the chain is not
    irreducible, so the closed two-state subchain is returned instead.
    """
    lam1, lam2, lam3 = spec.states
    if spec.eta == 0:
        return MarkovChain([lam1, lam2], [[spec.phi, 1 - spec.phi], [1 - spec.phi, spec.phi]])
    return MarkovChain([lam1, lam2, lam3], rietz_transition(spec.phi, spec.eta))


@dataclass(frozen=True)
class SweepRow:
    eta: float
    premium: float
    rf: float
    equity: float


def premium_sweep(spec_base: DisasterSpec, etas, prefs: PreferenceParams) -> list[SweepRow]:
    rows = []
    for eta in etas:
        spec = dataclasses.replace(spec_base, eta=float(eta))
        sol = solve_equilibrium(build_rietz_chain(spec), prefs)
        rows.append(SweepRow(float(eta), sol.premium, sol.unconditional_rf, sol.unconditional_equity))
    return rows


@dataclass(frozen=True)
class DisasterCalibration:
    spec: DisasterSpec
    prefs: PreferenceParams
    premium: float
    rf: float
    points_checked: int


def _grid(lo, hi, n):
    return np.linspace(lo, hi, n) if n > 1 else np.array([hi])


def find_disaster_calibration(
    target_premium: float,
    rf_band: tuple[float, float] = (0.0, 0.04),
    alpha_cap: float = 10.0,
    *,
    mu: float,
    gamma: float,
    phi: float,
    eta_range: tuple[float, float] = CALIBRATION_ETA_BAND,
    alpha_min: float = 0.2,
    psi_range: tuple[float, float] = (0.3, 0.98),
    beta_range: tuple[float, float] = (0.02, 0.999),
    points: int = 50,
) -> DisasterCalibration:
    """Grid search for a crash calibration reaching ``target_premium``.

    Every (eta, alpha, psi, beta) grid point with ``alpha <= alpha_cap`` is a
    candidate; it qualifies when an equilibrium exists, the premium is at
    least the target, and the unconditional net risk-free rate is inside
    ``rf_band``. The smallest qualifying eta wins, then the smallest alpha,
    then the largest psi (mildest crash), then the largest beta.
    """
    if points < 1:
        raise InvalidParameter("points must be >= 1")
    if alpha_min > alpha_cap:
        raise InvalidParameter("alpha_min exceeds alpha_cap")
    etas = _grid(*eta_range, points)
    alphas = _grid(alpha_min, alpha_cap, points)
    psis = _grid(*psi_range, points)
    betas = _grid(*beta_range, points)
    lam1, lam2 = 1 + mu + gamma, 1 + mu - gamma

    A, PSI, B = np.meshgrid(alphas, psis, betas, indexing="ij")
    crash = PSI * (1 + mu)
    ordered = crash < lam2
    states = np.stack([np.full_like(crash, lam1), np.full_like(crash, lam2), crash], axis=-1)
    checked = 0
    for eta in etas:
        if eta < 0 or phi + eta > 1:
            continue
        if eta == 0:
            # no crash state; not a disaster calibration
            continue
        transition = rietz_transition(phi, eta)
        pi = stationary_from_transition(transition)
        out = price_batch(states, transition, A, B, pi, aperiodic=True)
        checked += A.size
        ok = (
            ordered
            & out["exists"]
            & (out["premium"] >= target_premium)
            & (out["rf"] >= rf_band[0])
            & (out["rf"] <= rf_band[1])
        )
        if not ok.any():
            continue
        ia = int(np.argmax(ok.any(axis=(1, 2))))
        sub = ok[ia]
        ip = int(np.flatnonzero(sub.any(axis=1))[-1])
        ib = int(np.flatnonzero(sub[ip])[-1])
        spec = DisasterSpec(mu=mu, gamma=gamma, psi=float(psis[ip]), phi=phi, eta=float(eta))
        prefs = PreferenceParams(alpha=float(alphas[ia]), beta=float(betas[ib]))
        sol = solve_equilibrium(build_rietz_chain(spec), prefs)
        return DisasterCalibration(spec, prefs, sol.premium, sol.unconditional_rf, checked)
    raise NotFound(
        f"no grid point reaches premium {target_premium} with alpha <= {alpha_cap} "
        f"and rf in [{rf_band[0]}, {rf_band[1]}]"
    )
