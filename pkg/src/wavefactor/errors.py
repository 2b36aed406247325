"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Input array shape is incompatible with the operator."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a reliable result."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DivergedStepError(NumericalError):
    """A gradient step produced non-finite values; reduce the step size."""


class PreconditionError(ValueError):
    """An operation was called outside its guaranteed regime."""
