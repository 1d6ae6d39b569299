"""Exact angles in [0, 1] with eventually periodic binary expansions.

Every angle is stored as a normalized pair ``(preperiod, period)`` of bit
tuples together with its exact rational value.  Dyadic rationals in (0, 1]
always use the expansion ending in repeating 1s, so that every angle in
(0, 1/2] starts with the digit 0 (1/2 is ``.0(1)``).  The value 1 is kept
distinct from 0 (``.(1)`` versus ``.(0)``); on the circle they coincide,
see :attr:`BinaryAngle.circle_value`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

__all__ = [
    "AngleError",
    "BinaryAngle",
    "from_fraction",
    "parse_angle",
    "double",
    "orbit",
    "orbit_numerators",
    "agreement_depth",
    "distance_bounds_check",
]


class AngleError(ValueError):
    """Invalid angle input or violated precondition."""


def _primitive_root(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _bits_to_int(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


@dataclass(frozen=True)
class BinaryAngle:
    """Angle ``.preperiod(period)`` in [0, 1], normalized on construction.

    An empty period means a terminating expansion; it is converted to the
    repeating-1 form (or to ``.(0)`` for zero).
    """

    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = (0,)
    value: Fraction = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        pre = tuple(int(b) for b in self.preperiod)
        per = tuple(int(b) for b in self.period)
        if any(b not in (0, 1) for b in pre + per):
            raise AngleError("digits must be 0 or 1")
        if not per:
            per = (0,)
        per = _primitive_root(per)
        # shortest preperiod: rotate the cycle backwards while digits agree
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        if per == (0,) and 1 in pre:
            last = max(i for i, b in enumerate(pre) if b)
            pre = pre[:last] + (0,)
            per = (1,)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)
        head = _bits_to_int(pre)
        cyc = Fraction(_bits_to_int(per), (1 << len(per)) - 1)
        object.__setattr__(self, "value", (head + cyc) / (1 << len(pre)))

    @property
    def circle_value(self) -> Fraction:
        """Value reduced mod 1 (the point of R/Z)."""
        return self.value % 1

    @property
    def purely_periodic(self) -> bool:
        return not self.preperiod

    def digit(self, k: int) -> int:
        """The k-th binary digit, 1-based."""
        if k < 1:
            raise IndexError("digits are indexed from 1")
        a = len(self.preperiod)
        if k <= a:
            return self.preperiod[k - 1]
        return self.period[(k - a - 1) % len(self.period)]

    def digits(self, n: int) -> tuple[int, ...]:
        return tuple(self.digit(k) for k in range(1, n + 1))

    def shift(self) -> "BinaryAngle":
        if self.preperiod:
            return BinaryAngle(self.preperiod[1:], self.period)
        return BinaryAngle((), self.period[1:] + self.period[:1])

    def binary_string(self) -> str:
        pre = "".join(map(str, self.preperiod))
        per = "".join(map(str, self.period))
        return f".{pre}({per})"

    def fraction_string(self) -> str:
        v = self.value
        return f"{v.numerator}/{v.denominator}"

    def __str__(self) -> str:
        return self.binary_string()

    def __lt__(self, other: "BinaryAngle") -> bool:
        return self.value < other.value

    def __le__(self, other: "BinaryAngle") -> bool:
        return self.value <= other.value


def from_fraction(numerator: int, denominator: int = 1) -> BinaryAngle:
    """Binary expansion of ``numerator/denominator`` by long division."""
    if denominator == 0:
        raise AngleError("zero denominator")
    x = Fraction(numerator, denominator)
    if x < 0 or x > 1:
        raise AngleError(f"{x} is outside [0, 1]")
    if x == 1:
        return BinaryAngle((), (1,))
    p, q = x.numerator, x.denominator
    seen: dict[int, int] = {}
    bits: list[int] = []
    r = p
    while r not in seen:
        seen[r] = len(bits)
        r *= 2
        bits.append(r // q)
        r %= q
    start = seen[r]
    return BinaryAngle(tuple(bits[:start]), tuple(bits[start:]))


def from_value(x: Fraction) -> BinaryAngle:
    x = Fraction(x)
    return from_fraction(x.numerator, x.denominator)


_FRACTION_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")
_BINARY_RE = re.compile(r"^\s*\.([01]*)(?:\(([01]+)\))?\s*$")


def parse_angle(text: str) -> BinaryAngle:
    """Parse ``"p/q"``, an integer, or ``".b1b2...(per)"``; decimals are rejected."""
    m = _FRACTION_RE.match(text)
    if m:
        den = int(m.group(2)) if m.group(2) is not None else 1
        return from_fraction(int(m.group(1)), den)
    m = _BINARY_RE.match(text)
    if m and (m.group(1) or m.group(2)):
        pre = tuple(int(c) for c in m.group(1))
        per = tuple(int(c) for c in m.group(2)) if m.group(2) else ()
        return BinaryAngle(pre, per)
    raise AngleError(f"cannot parse angle {text!r} (use p/q or .bits(period))")


def double(x: BinaryAngle) -> BinaryAngle:
    """The doubling map: left shift of the digits.

    The shift of ``.0(1)`` is ``.(1)`` whose value is 1, i.e. 0 on the circle.
    """
    return x.shift()


def orbit(x: BinaryAngle) -> list[BinaryAngle]:
    """Forward orbit: the preperiodic points followed by one full cycle."""
    out = [x]
    for _ in range(len(x.preperiod) + len(x.period) - 1):
        out.append(out[-1].shift())
    return out


def orbit_numerators(x: BinaryAngle) -> tuple[list[int], int]:
    """Orbit values of x as integer numerators over a common denominator.

    Same points as :func:`orbit`, computed by ``v -> 2v - digit`` without
    renormalizing each shifted expansion.
    """
    den = x.value.denominator
    a = x.value.numerator
    out = [a]
    for k in range(1, len(x.preperiod) + len(x.period)):
        a = 2 * a - x.digit(k) * den
        out.append(a)
    return out, den


def agreement_depth(x: BinaryAngle, y: BinaryAngle) -> int:
    """1-based index of the first binary digit where x and y differ."""
    if x == y:
        raise AngleError("agreement depth of equal angles is undefined")
    a, b = len(x.period), len(y.period)
    bound = max(len(x.preperiod), len(y.preperiod)) + a * b // gcd(a, b)
    for k in range(1, bound + 1):
        if x.digit(k) != y.digit(k):
            return k
    raise AssertionError("distinct normalized expansions must differ")  # pragma: no cover


def distance_bounds_check(x: BinaryAngle, y: BinaryAngle) -> tuple[Fraction, Fraction, bool]:
    """Check ``c 2^-n <= |x - y| <= 2^(1-n)`` for ``0 < y < x <= 1/2``.

    ``n`` is the agreement depth and ``c = 2(1 - 2x)``, or ``c = 1`` at
    ``x = 1/2``.  Both angles are expected to be real kneading angles; the
    caller is responsible for that.
    """
    half = Fraction(1, 2)
    if not (0 < y.value < x.value <= half):
        raise AngleError("need 0 < y < x <= 1/2")
    n = agreement_depth(x, y)
    c = Fraction(1) if x.value == half else 2 * (1 - 2 * x.value)
    lower = c / (1 << n)
    upper = Fraction(2, 1 << n)
    diff = x.value - y.value
    return lower, upper, lower <= diff <= upper
