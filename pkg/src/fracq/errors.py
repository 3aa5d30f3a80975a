"""Exception hierarchy shared by all fracq modules."""


class FracqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FracqError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class OutOfRegimeError(DomainError):
    """A fitted quantity is outside the regime an estimator applies to."""


class ResourceError(FracqError):
    """A requested size exceeds the configured ceiling."""


class InconclusiveError(FracqError):
    """Finite-range numerics cannot decide the requested classification."""


class FormatError(FracqError):
    """An input file could not be parsed; message names the line or offset."""
