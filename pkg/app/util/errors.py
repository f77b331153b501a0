"""Exception hierarchy shared by the services and the command line."""

from typing import Optional


class FriedlanderError(Exception):
    """Base class of every error raised by the toolkit."""

    exit_code = 1


class DomainError(FriedlanderError, ValueError):
    """Input outside the domain of an operation (non-finite, theta=0, x<0, A<=0)."""

    exit_code = 2


class ArgumentError(FriedlanderError, ValueError):
    """Structurally invalid argument (table index, dimension, count)."""

    exit_code = 2


class RangeError(DomainError):
    """Argument beyond the validated evaluation range."""


class PhaseTrackingError(FriedlanderError, ArithmeticError):
    """Continuity of the tracked phase was lost between two nodes."""

    exit_code = 3

    def __init__(self, message: str, suggested_step: Optional[float] = None):
        super().__init__(message)
        self.suggested_step = suggested_step


class AccuracyError(FriedlanderError, ArithmeticError):
    """A quadrature or solver did not reach its tolerance."""

    exit_code = 3

    def __init__(self, message: str, estimate=None, bound: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.bound = bound


class RegimeError(FriedlanderError):
    """Parameters outside the regime in which a representation is valid."""

    exit_code = 2


class WindowError(FriedlanderError):
    """The reflection window leaves non-negligible boundary terms."""

    exit_code = 3

    def __init__(self, message: str, boundary: Optional[float] = None, interior: Optional[float] = None):
        super().__init__(message)
        self.boundary = boundary
        self.interior = interior


def exit_code_for(exc: BaseException) -> int:
    """Exit status for an exception escaping a command."""
    if isinstance(exc, FriedlanderError):
        return exc.exit_code
    return 1
