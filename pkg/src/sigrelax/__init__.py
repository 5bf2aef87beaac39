"""Certified lower bounds for signomial programs via AM/GM (SAGE)
decompositions, computed with relative entropy programming."""

from .signomial import (
    CapacityError,
    ExponentSet,
    Signomial,
    evaluate,
    exponent_set,
    extremal_exponents,
    multiplier_expand,
    multiply,
    screen_unbounded,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ExponentSet",
    "Signomial",
    "evaluate",
    "exponent_set",
    "extremal_exponents",
    "multiplier_expand",
    "multiply",
    "screen_unbounded",
]
