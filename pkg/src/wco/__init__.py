"""Weakly centered weighted composition operators on finite discrete measure spaces."""

from .measure_space import DiscreteMeasureSpace, InputError
from .model import WcoSystem, conditional_expectation, radon_nikodym, rn_values
from .report import PropertyReport

__all__ = [
    "DiscreteMeasureSpace",
    "InputError",
    "PropertyReport",
    "WcoSystem",
    "conditional_expectation",
    "radon_nikodym",
    "rn_values",
]
__version__ = "0.1.0"
