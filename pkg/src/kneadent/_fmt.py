"""Directed rounding of certified endpoints to floats for output."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


def _exceeds(f: float, x) -> bool:
    if isinstance(x, Fraction):
        return Fraction(f) > x
    return mpmath.mpf(f) > x


def _below(f: float, x) -> bool:
    if isinstance(x, Fraction):
        return Fraction(f) < x
    return mpmath.mpf(f) < x


def down(x) -> float:
    """Largest float not above x."""
    f = float(x)
    if _exceeds(f, x):
        f = math.nextafter(f, -math.inf)
    return f


def up(x) -> float:
    """Smallest float not below x."""
    f = float(x)
    if _below(f, x):
        f = math.nextafter(f, math.inf)
    return f
