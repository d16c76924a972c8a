"""Exception hierarchy shared across the package."""


class GelpfError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GelpfError, ValueError):
    """A parameter lies outside its admissible domain."""


class DataError(GelpfError, ValueError):
    """Input data cannot be used (too short, non-finite, unparseable)."""


class TiesError(DataError):
    """Exact ties in the sample; strict ordering of the spacings fails."""


class QuadratureError(GelpfError, RuntimeError):
    """Numerical integration failed to reach the requested tolerance.

    The achieved relative-error estimate is kept on ``achieved``.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConvergenceError(GelpfError, RuntimeError):
    """An optimizer did not converge; diagnostics on ``diagnostics``."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateBootstrapError(GelpfError, RuntimeError):
    """Too many bootstrap replicates were rejected for intervals to mean anything."""
