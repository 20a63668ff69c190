"""Exception types shared across the package."""

from __future__ import annotations


class LanchesterError(Exception):
    """Base class for errors raised by this package."""


class DomainError(LanchesterError, ValueError):
    """A formula was evaluated outside its mathematical domain."""


class UnsupportedModelError(LanchesterError):
    """The requested operation is not defined for this model kind."""


class NumericalFailure(LanchesterError):
    """Integration produced a non-finite state.

    ``last_good`` holds the last finite ``(t, components)`` sample.
    """

    def __init__(self, message: str, last_good: tuple[float, tuple[float, ...]]):
        super().__init__(message)
        self.last_good = last_good


class InsufficientDataError(LanchesterError, ValueError):
    name = "insufficient-data"


class DegenerateFitError(LanchesterError, ValueError):
    name = "degenerate-fit"
