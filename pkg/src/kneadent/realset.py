"""The set of real kneading angles and its combinatorics.

An angle ``θ ∈ [0, 1/2]`` is real when its doubling orbit never enters the
open interval ``(θ, 1 - θ)``.  This module decides membership exactly,
builds period doublings and small-copy tips, locates the gap component
containing a non-real angle, and constructs the periodic approximants used
for the lower-bound estimate of the entropy's modulus of continuity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .angles import AngleError, BinaryAngle, from_fraction, orbit, orbit_numerators

__all__ = [
    "AngleClass",
    "RealSetError",
    "SearchExhausted",
    "is_real_angle",
    "period_doubling",
    "small_copy_tip",
    "approximation_delta",
    "approximant_below",
    "approximant_sequence",
    "gap_root",
    "periodic_members",
]

HALF = Fraction(1, 2)


class RealSetError(AngleError):
    """Precondition on real-angle structure violated."""


class SearchExhausted(RealSetError):
    """No admissible periodic angle found below the period cap."""


@dataclass(frozen=True)
class AngleClass:
    member: bool
    purely_periodic: bool
    primitive: bool | None
    witness: int | None

    def to_record(self) -> dict:
        return {
            "member": self.member,
            "purely_periodic": self.purely_periodic,
            "primitive": self.primitive,
            "witness_k": self.witness,
        }


def _check_domain(theta: BinaryAngle):
    if theta.value > HALF:
        raise RealSetError(f"{theta.fraction_string()} exceeds 1/2")


def is_real_angle(theta: BinaryAngle) -> AngleClass:
    _check_domain(theta)
    pts, den = orbit_numerators(theta)
    lo = theta.value.numerator
    hi = den - lo
    periodic = theta.purely_periodic
    for k, y in enumerate(pts):
        if lo < y < hi:
            return AngleClass(False, periodic, None, k)
    if not periodic:
        return AngleClass(True, False, None, None)
    for k, y in enumerate(pts):
        if y == hi:
            return AngleClass(True, True, False, k)
    return AngleClass(True, True, True, None)


def _complement(word):
    return tuple(1 - b for b in word)


def _require_periodic_member(theta: BinaryAngle):
    cls = is_real_angle(theta)
    if not (cls.member and cls.purely_periodic):
        raise RealSetError(f"{theta} is not a purely periodic real angle")
    return cls


def period_doubling(theta: BinaryAngle) -> BinaryAngle:
    _require_periodic_member(theta)
    s = theta.period
    return BinaryAngle((), s + _complement(s))


def small_copy_tip(theta: BinaryAngle) -> BinaryAngle:
    """Tip of the small copy rooted at θ; the copy is the interval (θ, tip).

    For θ = 0 the tail ``.0(1)`` would be 1/2, so the tip is taken to be
    the period doubling 1/3 instead.
    """
    _require_periodic_member(theta)
    if theta.value == 0:
        return period_doubling(theta)
    s = theta.period
    return BinaryAngle(s, _complement(s))


def approximation_delta(theta: BinaryAngle) -> Fraction:
    """Half the smallest overshoot ``D^k(θ) - (1 - θ)`` over orbit points beyond 1 - θ."""
    top = 1 - theta.value
    over = [y.value - top for y in orbit(theta) if y.value > top]
    if not over:
        raise RealSetError(f"orbit of {theta} never exceeds 1 - θ")
    return min(over) / 2


def _is_top(theta: BinaryAngle) -> bool:
    return theta.value == HALF


def approximant_below(theta: BinaryAngle, delta: Fraction | None = None,
                      period_cap: int = 24) -> BinaryAngle:
    """A purely periodic real angle in ``(θ - δ, θ)``.

    Periods are tried in increasing order; within a period the candidate
    closest to θ wins.  θ must be primitive, or the top angle 1/2.
    """
    cls = is_real_angle(theta)
    if not (cls.primitive or _is_top(theta)) or theta.value == 0:
        raise RealSetError(f"{theta} is not a primitive angle in (0, 1/2]")
    d0 = approximation_delta(theta)
    if delta is None:
        delta = d0
    delta = Fraction(delta)
    if not 0 < delta <= d0:
        raise RealSetError(f"delta must lie in (0, {d0}]")
    x = theta.value
    for q in range(1, period_cap + 1):
        m = (1 << q) - 1
        k_hi = (x * m).__ceil__() - 1
        k_lo = ((x - delta) * m).__floor__() + 1
        for k in range(k_hi, k_lo - 1, -1):
            if k < 0:
                break
            cand = from_fraction(k, m)
            if len(cand.period) != q or cand.preperiod:
                continue
            if is_real_angle(cand).member:
                return cand
    raise SearchExhausted(f"no periodic real angle of period <= {period_cap} in ({x - delta}, {x})")


def approximant_sequence(theta: BinaryAngle, theta_prime: BinaryAngle, m: int,
                         *, aligned: bool = False) -> BinaryAngle:
    """The real angle ``.(s^m t)`` built from the period blocks of θ and θ'.

    With ``aligned=True`` both blocks are first repeated to the common length
    ``P = p q``, giving ``.((s^q)^m t^p)`` whose first ``m P`` digits agree
    with θ.  The result is re-checked for membership.
    """
    if m < 1:
        raise RealSetError("m must be positive")
    cls = is_real_angle(theta)
    if not (cls.primitive and 0 < theta.value < HALF):
        raise RealSetError(f"{theta} is not a primitive angle in (0, 1/2)")
    cls2 = is_real_angle(theta_prime)
    if not (cls2.member and cls2.purely_periodic):
        raise RealSetError(f"{theta_prime} is not a purely periodic real angle")
    delta = approximation_delta(theta)
    if not theta.value - delta < theta_prime.value < theta.value:
        raise RealSetError("θ' must lie in (θ - δ, θ)")
    s, t = theta.period, theta_prime.period
    if aligned:
        s, t = s * len(t), t * len(s)
    out = BinaryAngle((), s * m + t)
    if not is_real_angle(out).member:
        raise RealSetError(f"approximant {out} failed the membership re-check")
    return out


def gap_root(x: BinaryAngle) -> BinaryAngle:
    """For a non-real x, the purely periodic real θ with θ < x < pd(θ).

    The first time k at which the orbit of x enters (x, 1 - x) gives the
    candidate block ``x_1 ... x_k``; the result is verified exactly.
    """
    cls = is_real_angle(x)
    if cls.member:
        raise RealSetError(f"{x} is a real angle; it lies in no gap")
    k = cls.witness
    theta = BinaryAngle((), x.digits(k))
    ok = False
    c = is_real_angle(theta)
    if c.member and c.purely_periodic:
        ok = theta.value < x.value < period_doubling(theta).value
    if not ok:
        raise RealSetError(f"gap of {x} not resolved by its first hole visit")
    return theta


def periodic_members(max_period: int, *, min_period: int = 1) -> list[BinaryAngle]:
    """All purely periodic real angles of exact period in the given range, sorted."""
    out = []
    for q in range(min_period, max_period + 1):
        m = (1 << q) - 1
        for k in range(0, m // 2 + 1):
            a = from_fraction(k, m)
            if a.preperiod or len(a.period) != q:
                continue
            if is_real_angle(a).member:
                out.append(a)
    return sorted(out, key=lambda a: a.value)
