"""Exception types raised across the package."""


class GraviboxError(Exception):
    """Base class for all errors raised by gravibox."""


class DomainError(GraviboxError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """An argument is finite but outside the documented support range."""


class RegimeError(GraviboxError, ValueError):
    """The requested approximation is not valid for the given parameters."""


class QuadratureError(GraviboxError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""
