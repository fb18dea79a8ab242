"""Exception hierarchy.

Every failure raised on purpose by the library derives from
``RenyiMaxentError``.  The command line maps usage errors to exit status 1
and all other library errors to exit status 2.
"""

from __future__ import annotations

from typing import Optional


class RenyiMaxentError(Exception):
    """Base class for library errors."""

    usage = False


class InvalidParameterError(RenyiMaxentError):
    usage = True

    def __init__(self, parameter: str, message: str) -> None:
        super().__init__(f"invalid parameter '{parameter}': {message}")
        self.parameter = parameter


class PreconditionError(RenyiMaxentError):
    usage = True


class IndexMismatchError(RenyiMaxentError):
    usage = True


class EmptyDomainError(RenyiMaxentError):
    pass


class DivergentIntegralError(RenyiMaxentError):
    def __init__(self, message: str, location: Optional[float] = None) -> None:
        if location is not None:
            message = f"{message} (at x={location:.12g})"
        super().__init__(message)
        self.location = location


class NoDefinedPointError(RenyiMaxentError):
    pass


class ConstraintUnattainableError(RenyiMaxentError):
    def __init__(self, message: str, closest_mean: Optional[float] = None) -> None:
        if closest_mean is not None:
            message = f"{message}; closest achieved mean {closest_mean:.12g}"
        super().__init__(message)
        self.closest_mean = closest_mean


class InfeasibleConstraintError(RenyiMaxentError):
    pass


class NonConvergenceError(RenyiMaxentError):
    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class BoundaryOptimumWarning(UserWarning):
    """The optimum of a bounded one-dimensional search sits on a bound."""


class ZeroNormalizerError(RenyiMaxentError):
    pass
