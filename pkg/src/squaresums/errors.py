"""Exception types shared across the package."""


class SquaresumsError(Exception):
    """Base class for all package-specific errors."""


class TableTooShortError(SquaresumsError):
    """An input table does not cover the requested output range."""


class CountOverflowError(SquaresumsError):
    """An exact count or accumulator would leave the 64-bit range."""


class NotCoprimeError(SquaresumsError):
    """An argument pair that must be coprime is not."""


class DomainError(SquaresumsError):
    """An argument lies outside the mathematical domain of the operation."""


class InsufficientPointsError(SquaresumsError):
    """Too few usable data points to perform a fit."""
