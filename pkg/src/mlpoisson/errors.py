"""Exception types shared across the package."""


class MlPoissonError(Exception):
    """Base class for all library errors."""


class InvalidParams(MlPoissonError):
    """Parameter values outside an operation's domain."""


class NonConvergence(MlPoissonError):
    """A series or iteration failed to reach its stopping rule."""


class OutOfRange(MlPoissonError):
    """Combinatorial index outside the supported exact range."""


class InvalidDistribution(MlPoissonError):
    """Parameterization whose terms are not a valid probability mass."""


class PrecisionExhausted(MlPoissonError):
    """Arbitrary-precision escalation hit its doubling cap."""


class FitError(MlPoissonError):
    """Fit failure that still carries the best result found so far."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class NoSolution(FitError):
    """Moment matching could not drive the residual below tolerance."""


class NotConverged(FitError):
    """Simplex search ran out of iterations before shrinking below tolerance."""
