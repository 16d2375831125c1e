"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class CapacityError(ValueError):
    """An index exceeds the prepared size of a coefficient table."""


class ProximityError(ValueError):
    """Evaluation points are too close for a formula with an ``x - y`` denominator."""


class ConvergenceError(RuntimeError):
    """An iterative or adaptive routine stopped before meeting its tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether a partial answer is still useful.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class NumericError(RuntimeError):
    """A numerical kernel produced non-finite output or failed to converge."""
