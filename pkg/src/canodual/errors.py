"""Exception hierarchy.

Every error carries a stable ``code`` string so the CLI can map failures to
exit codes and scripts can branch on machine-readable identifiers.
"""

from __future__ import annotations


class CanodualError(Exception):
    """Base class for all library errors."""

    code = "ERROR"

    def __init__(self, message: str = "", **context):
        self.context = context
        if context:
            detail = ", ".join(f"{k}={v}" for k, v in context.items())
            message = f"{message} ({detail})" if message else detail
        super().__init__(message)


class InvalidModelError(CanodualError):
    code = "INVALID_MODEL"


class NonSymmetricError(InvalidModelError):
    code = "NON_SYMMETRIC"


class NonPositiveParameterError(InvalidModelError):
    code = "NON_POSITIVE_PARAMETER"


class EmptyModelError(InvalidModelError):
    code = "EMPTY_MODEL"


class ParseError(CanodualError):
    code = "PARSE_ERROR"


class SingularMatrixError(CanodualError):
    """The shifted curvature matrix is singular where a solve is required."""

    code = "SINGULAR_GA"


class DomainError(CanodualError):
    """Dual variables outside the open feasible domain of the conjugate."""

    code = "DOMAIN"


class PoleError(CanodualError):
    """Secular expression evaluated at (or too close to) a pole."""

    code = "POLE"


class NotPositiveDefiniteError(CanodualError):
    code = "NOT_PD"


class UnboundedError(CanodualError):
    """The objective is not bounded below."""

    code = "UNBOUNDED"


class NoDualCriticalPointError(CanodualError):
    """Existence condition failed: no dual critical point in the
    positive-definite region (a relatively hard instance)."""

    code = "NOT_EXISTS"


class HardCaseError(CanodualError):
    """Dual ascent converged to the boundary of the positive-definite region
    without reaching a critical point; the instance cannot be certified by
    the analytic recovery formula."""

    code = "NO_SA_PLUS_CRITICAL_POINT"


class NotCriticalError(CanodualError):
    """A point submitted for classification is not a dual critical point."""

    code = "NOT_CRITICAL"


class DimensionTooLargeError(CanodualError):
    code = "DIMENSION_TOO_LARGE"


class ShapeMismatchError(CanodualError):
    """Instance does not match any specialized solver shape."""

    code = "SHAPE_MISMATCH"
