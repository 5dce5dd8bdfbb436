"""Shared parameter records and the validated Markov chain type."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import (
    InvalidMoments,
    InvariantViolation,
    NegativeEntry,
    NonErgodic,
    NonMonotonicTime,
    NonPositiveState,
    NonStochasticRow,
)

ROW_SUM_TOL = 1e-12


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise InvariantViolation(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PreferenceParams:
    """CRRA preferences: risk aversion ``alpha`` and discount factor ``beta``.

    Only ``beta`` is stored; ``delta = -ln(beta)`` is derived so the two can
    never disagree. ``beta > 1`` (negative ``delta``) is allowed; ``orthodox``
    reports whether ``beta`` lies in (0, 1).
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvariantViolation(f"alpha must be > 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvariantViolation(f"beta must be > 0, got {self.beta}")

    @classmethod
    def from_delta(cls, alpha: float, delta: float) -> PreferenceParams:
        return cls(alpha=alpha, beta=math.exp(-delta))

    @property
    def delta(self) -> float:
        return -math.log(self.beta)

    @property
    def orthodox(self) -> bool:
        return 0.0 < self.beta < 1.0


@dataclass(frozen=True)
class LogNormalGrowth:
    """Mean and standard deviation of log consumption growth per period."""

    mean: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise InvariantViolation("mean must be finite")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise InvariantViolation(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class MomentTargets:
    """Mean, variance and lag-1 autocorrelation of gross consumption growth."""

    mean_growth: float
    variance: float
    autocorr: float

    def __post_init__(self):
        if not math.isfinite(self.mean_growth):
            raise InvalidMoments("mean_growth must be finite")
        if not (math.isfinite(self.variance) and self.variance >= 0):
            raise InvalidMoments(f"variance must be >= 0, got {self.variance}")
        if not (abs(self.autocorr) < 1):
            raise InvalidMoments(f"|autocorr| must be < 1, got {self.autocorr}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _label_key(label):
    # numeric labels compare numerically, everything else lexically
    if isinstance(label, (int, float, np.integer, np.floating)):
        return (0, float(label), "")
    return (1, 0.0, str(label))


@dataclass(frozen=True)
class TimeSeries:
    timestamps: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        stamps = tuple(self.timestamps)
        values = _frozen(self.values, 1)
        if len(stamps) != values.shape[0]:
            raise InvariantViolation("timestamps and values differ in length")
        keys = [_label_key(s) for s in stamps]
        for i in range(1, len(keys)):
            if not keys[i] > keys[i - 1]:
                raise NonMonotonicTime(
                    f"period labels not strictly increasing at position {i}: "
                    f"{stamps[i - 1]!r} -> {stamps[i]!r}"
                )
        object.__setattr__(self, "timestamps", stamps)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.timestamps)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.timestamps == other.timestamps and np.array_equal(self.values, other.values)

    __hash__ = None


def _reachability(transition: np.ndarray) -> np.ndarray:
    """Boolean pattern of (I + P)^(n-1), computed without floating point."""
    n = transition.shape[0]
    step = (transition > 0) | np.eye(n, dtype=bool)
    reach = np.eye(n, dtype=bool)
    for _ in range(max(n - 1, 0)):
        reach = (reach.astype(np.int64) @ step.astype(np.int64)) > 0
    return reach


def _is_primitive(transition: np.ndarray) -> bool:
    # Wielandt: an irreducible n x n pattern is primitive iff its power
    # n^2 - 2n + 2 is strictly positive.
    n = transition.shape[0]
    pattern = (transition > 0).astype(np.int64)
    power = np.eye(n, dtype=np.int64)
    for _ in range(n * n - 2 * n + 2):
        power = ((power @ pattern) > 0).astype(np.int64)
    return bool(power.all())


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Finite chain of gross growth rates ``states`` with transition matrix.

    ``transition[i, j]`` is the probability of moving from state ``i`` to
    state ``j``. Construction validates row sums, signs, positivity of the
    states and irreducibility; rows are never renormalized.
    """

    states: np.ndarray
    transition: np.ndarray

    def __post_init__(self):
        states = _frozen(self.states, 1)
        transition = _frozen(self.transition, 2)
        n = states.shape[0]
        if n == 0:
            raise InvariantViolation("a chain needs at least one state")
        if transition.shape != (n, n):
            raise InvariantViolation(
                f"transition shape {transition.shape} does not match {n} states"
            )
        if not np.all(np.isfinite(states)) or np.any(states <= 0):
            raise NonPositiveState(f"growth states must be > 0, got {states.tolist()}")
        if not np.all(np.isfinite(transition)):
            raise NegativeEntry("transition entries must be finite")
        if np.any(transition < 0):
            raise NegativeEntry("transition matrix has negative entries")
        rows = transition.sum(axis=1)
        bad = np.flatnonzero(np.abs(rows - 1.0) > ROW_SUM_TOL)
        if bad.size:
            i = int(bad[0])
            raise NonStochasticRow(f"row {i} sums to {rows[i]!r}")
        if not _reachability(transition).all():
            raise NonErgodic("chain is not irreducible")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "_primitive", _is_primitive(transition))

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def aperiodic(self) -> bool:
        return self._primitive

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, MarkovChain):
            return NotImplemented
        return np.array_equal(self.states, other.states) and np.array_equal(
            self.transition, other.transition
        )

    __hash__ = None


def validate_chain(states: Sequence[float] | np.ndarray, transition) -> MarkovChain:
    return MarkovChain(states, transition)
