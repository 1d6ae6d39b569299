"""Certified topological entropy of real quadratic polynomials, indexed by external angle."""

from .angles import AngleError, BinaryAngle, from_fraction, parse_angle
from .kneading import EntropyResult, entropy, extended_entropy
from .realset import is_real_angle, period_doubling, small_copy_tip

__version__ = "0.1.0"

__all__ = [
    "AngleError",
    "BinaryAngle",
    "EntropyResult",
    "entropy",
    "extended_entropy",
    "from_fraction",
    "is_real_angle",
    "parse_angle",
    "period_doubling",
    "small_copy_tip",
]
