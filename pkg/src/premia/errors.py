"""Domain errors.

Every error raised for a model-level problem derives from :class:`PremiaError`.
The CLI prints the class name verbatim and exits with status 1 for these.
"""


class PremiaError(Exception):
    """Base class for all domain errors."""


class InvalidParameter(PremiaError, ValueError):
    """An argument violates an operation's precondition."""


class InvariantViolation(PremiaError, ValueError):
    """A parameter record would break one of its invariants."""


# chains
class NonStochasticRow(InvariantViolation):
    pass


class NegativeEntry(InvariantViolation):
    pass


class NonErgodic(InvariantViolation):
    pass


class NonPositiveState(InvariantViolation):
    pass


# lognormal analytics
class NoSolution(PremiaError):
    pass


# equilibrium pricing
class NoEquilibrium(PremiaError):
    """Spectral radius of the pricing operator is >= 1, so prices diverge."""


class SingularSystem(PremiaError):
    pass


class InvalidHorizon(PremiaError, ValueError):
    pass


# disasters
class OrderingViolated(InvariantViolation):
    pass


class NonStochastic(InvariantViolation):
    pass


class NotFound(PremiaError):
    pass


# calibration
class InvalidMoments(InvariantViolation):
    pass


class TooShort(PremiaError, ValueError):
    pass


class ZeroVariance(PremiaError, ValueError):
    pass


class EmptyFeasibleSet(PremiaError):
    pass


# habit
class OutOfDomain(PremiaError, ValueError):
    pass


class InvalidSurplus(PremiaError, ValueError):
    pass


# long-run risks
class NoFixedPoint(PremiaError):
    pass


# heterogeneous agents
class NegativeDiscriminant(PremiaError, ValueError):
    pass


class TooFewConsumers(PremiaError, ValueError):
    pass


# io
class ParseError(PremiaError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class EmptyFile(PremiaError, ValueError):
    pass


class NonMonotonicTime(PremiaError, ValueError):
    pass


class SchemaError(PremiaError, ValueError):
    pass


