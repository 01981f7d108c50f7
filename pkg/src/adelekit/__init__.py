"""Exact computations with adeles of one-dimensional schemes."""

from .fields import GF, QQ
from .local import Comparison, Divisor, LocalSeries, PrecisionError, expand
from .poly import Poly, Rat
from .scheme import P1, FinitePoset, SpecZ

__version__ = "0.1.0"

__all__ = [
    "GF", "QQ", "Poly", "Rat", "P1", "SpecZ", "FinitePoset",
    "LocalSeries", "Divisor", "Comparison", "PrecisionError", "expand",
]
