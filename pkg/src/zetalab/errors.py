"""Exception hierarchy shared by every zetalab module."""

from __future__ import annotations


class ZetaLabError(Exception):
    """Base class for all errors raised by zetalab."""


class DomainError(ZetaLabError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """zeta was requested at its pole s = 1."""


class OnZeroError(DomainError):
    """The argument of zeta was requested at (or within tolerance of) a zero."""


class NumericalError(ZetaLabError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class PrecisionUnreachable(NumericalError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class NonFiniteIntegrand(NumericalError):
    pass


class BracketError(NumericalError):
    pass


class MissedZeroError(NumericalError):
    pass


class ContinuationError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class TailBoundError(NumericalError):
    """No coefficient-growth metadata is available to bound a series tail."""
