"""Classical and quantum particle in a square box under gravity."""

__version__ = "0.1.0"

from .errors import DomainError, GraviboxError, QuadratureError, RangeError, RegimeError  # noqa: E402

__all__ = [
    "__version__",
    "DomainError",
    "GraviboxError",
    "QuadratureError",
    "RangeError",
    "RegimeError",
]
