"""Semantic exception hierarchy.

Public functions never raise bare ``ValueError``; each failure mode has a
named class so callers (and the CLI exit-code mapping) can distinguish
bad arguments, violated mathematical hypotheses, and numerical breakdown.
"""

from __future__ import annotations


class ConvexTailError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ConvexTailError, ValueError):
    """An argument lies outside the documented domain (e.g. a probability
    outside (0,1), or a tail exponent that does not give a finite mean)."""


class SpecParseError(ConvexTailError, ValueError):
    """A distribution spec string (CLI grammar) could not be parsed."""


class PreconditionError(ConvexTailError, ValueError):
    """The mathematical preconditions of an operation do not hold for the
    given inputs (e.g. an atomic law passed to the hinge minimizer)."""


class EmptyTailError(PreconditionError):
    """The requested upper tail carries no probability mass."""


class HypothesisError(ConvexTailError):
    """A numerically probed hypothesis failed.

    Carries the violating probe point and both sides of the inequality so
    diagnostics can be printed even when the computation is aborted.
    """

    def __init__(self, message: str, *, lhs: float | None = None,
                 rhs: float | None = None, where: tuple | None = None):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs
        self.where = where


class NotRegularError(HypothesisError):
    """The tail-regularity modulus did not stabilise under grid refinement."""


class NumericalError(ConvexTailError, ArithmeticError):
    """Quadrature failed to converge, or a root bracket was not found."""
