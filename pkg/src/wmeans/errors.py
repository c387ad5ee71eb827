"""Exception hierarchy shared by all modules."""


class WMeansError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WMeansError, ValueError):
    """Invalid parameters or malformed input documents."""


class ComputationError(WMeansError, ArithmeticError):
    """A series or continued fraction failed to converge."""

    def __init__(self, message, args_=None):
        super().__init__(message)
        self.arguments = args_


class DomainError(WMeansError, ArithmeticError):
    """An integrand or evaluator produced a non-finite value where it must not."""


class AccuracyError(WMeansError, ArithmeticError):
    """Requested accuracy not reached; ``estimate`` and ``error`` hold the best attempt."""

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergenceError(AccuracyError):
    """An improper integral grows without bound as the endpoint offset shrinks."""


class DegenerateError(WMeansError, ArithmeticError):
    """A denominator (weight mass, hazard, quantile) vanishes."""
