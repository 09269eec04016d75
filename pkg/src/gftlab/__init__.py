"""Numerical laboratory for univalent-function computations."""

from .errors import DomainError, GFTError, NumericalError, SingularityError, UsageError
from .series import TruncatedSeries, compose, evaluate, identity, koebe, lagrange_invert

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "GFTError",
    "NumericalError",
    "SingularityError",
    "TruncatedSeries",
    "UsageError",
    "compose",
    "evaluate",
    "identity",
    "koebe",
    "lagrange_invert",
]
