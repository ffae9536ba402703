"""Exception hierarchy.

Every error raised for invalid input derives from :class:`VolRiskError`,
which is itself a ``ValueError`` so callers can catch either.
"""

from __future__ import annotations


class VolRiskError(ValueError):
    """Base class for all validation errors raised by the package."""


# ingestion / alignment

class MissingColumnError(VolRiskError):
    pass


class UnparseableDateError(VolRiskError):
    pass


class NonPositiveValueError(VolRiskError):
    """A price or volume that is zero or negative (``row`` is 1-based, header excluded)."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class DuplicateDateError(VolRiskError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class EmptyIntersectionError(VolRiskError):
    pass


# numerics

class TooShortError(VolRiskError):
    pass


class NonPositiveError(VolRiskError):
    pass


class ZeroVarianceError(VolRiskError):
    pass


class LengthMismatchError(VolRiskError):
    pass


class WindowTooSmallError(VolRiskError):
    pass


class WindowTooLargeError(VolRiskError):
    pass


# risk metrics

class ZeroVolatilityError(VolRiskError):
    pass


class ZeroPriceVolatilityError(ZeroVolatilityError):
    pass


class DegenerateCombinedVolatilityError(VolRiskError):
    """``1 + eta**2 + 2*rho*eta <= 0``; only reachable with negative correlation."""


class NonPositiveSigmaTildeError(VolRiskError):
    pass


# simulation

class RiskAversionUnityError(VolRiskError):
    pass


class NonPositiveSigmaError(VolRiskError):
    pass


class InvalidSpecError(VolRiskError):
    pass


# forecasting

class CoverageGapError(VolRiskError):
    pass


class EmptyInputError(VolRiskError):
    pass
