"""Numerical laboratory for -Δu = |x|^β v, -Δv = |x|^α |u|^{p-1} u."""

from .critdim import critical_dimension, threshold_functions
from .params import DerivedParams, Exponents, RegimeTag, SystemParams, classify_regime, derive

__all__ = [
    "DerivedParams",
    "Exponents",
    "RegimeTag",
    "SystemParams",
    "classify_regime",
    "critical_dimension",
    "derive",
    "threshold_functions",
]

__version__ = "0.1.0"
