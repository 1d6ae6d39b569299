"""Kneading series, certified minimal roots and topological entropy.

For an angle θ in [0, 1/2] with binary digits ``b_1 b_2 ...`` (``b_1 = 0``
in canonical form) the kneading series is

    P(t) = 1 + sum_{k>=1} eps_k t^k,   eps_k = (-1)^{b_{k+1}},

an eventually periodic series stored exactly as N(t) / (1 - t^P).  The
entropy is ``-log r`` where r is the smallest root of P in (0, 1), or 0 when
there is none.  Roots are certified with exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import mpmath
from mpmath import iv

from ._roots import (
    CertificationError,
    SuspectedMultipleRoot,
    eval_exact,
    minimal_root,
    poly_add,
    poly_derivative,
    poly_mul,
    poly_sub,
    poly_trim,
    sign_at,
)
from ._fmt import down as _down, up as _up
from .angles import AngleError, BinaryAngle
from .realset import gap_root, is_real_angle, period_doubling

__all__ = [
    "CertificationError",
    "SuspectedMultipleRoot",
    "KneadingSeries",
    "EntropyResult",
    "series_from_angle",
    "evaluate",
    "entropy",
    "extended_entropy",
    "entropy_stream",
    "pd_identity_check",
    "difference_decomposition",
    "mean_value_check",
    "default_precision",
]

DEFAULT_TOL = Fraction(1, 10**12)
HALF = Fraction(1, 2)
LOG2 = mpmath.log(2)


def default_precision() -> int:
    """Mantissa bits for interval evaluation; ``KNEADENT_PREC`` overrides."""
    return int(os.environ.get("KNEADENT_PREC", "128"))


@dataclass(frozen=True)
class KneadingSeries:
    """Eventually periodic ±1 series ``1 + sum eps_k t^k`` in closed form.

    ``pre_signs`` are eps_1 .. eps_a and ``period_signs`` the repeating block
    that follows, of length ``denominator_exponent``.
    """

    pre_signs: tuple[int, ...]
    period_signs: tuple[int, ...]
    numerator: tuple[int, ...]
    source: BinaryAngle | None = None

    @property
    def denominator_exponent(self) -> int:
        return len(self.period_signs)

    def coefficient(self, k: int) -> int:
        if k == 0:
            return 1
        a = len(self.pre_signs)
        if k <= a:
            return self.pre_signs[k - 1]
        return self.period_signs[(k - a - 1) % len(self.period_signs)]

    def coefficients(self, n: int) -> list[int]:
        return [self.coefficient(k) for k in range(n)]

    def expand(self, n: int) -> list[int]:
        """First n power-series coefficients of N(t) / (1 - t^P), by exact division."""
        P = self.denominator_exponent
        num = list(self.numerator) + [0] * max(0, n - len(self.numerator))
        out = []
        for k in range(n):
            c = num[k] + (out[k - P] if k >= P else 0)
            out.append(c)
        return out

    def denominator(self) -> list[int]:
        P = self.denominator_exponent
        return [1] + [0] * (P - 1) + [-1]


def _series_from_signs(pre: tuple[int, ...], per: tuple[int, ...], source=None) -> KneadingSeries:
    P = len(per)
    a = len(pre)
    head = [1] + list(pre)
    num = poly_mul(head, [1] + [0] * (P - 1) + [-1])
    tail = [0] * (a + 1) + list(per)
    return KneadingSeries(pre, per, tuple(poly_add(num, tail)), source)


def series_from_angle(theta: BinaryAngle) -> KneadingSeries:
    if theta.value > HALF:
        raise AngleError(f"{theta.fraction_string()} exceeds 1/2")
    shifted = theta.shift()
    sign = lambda b: 1 - 2 * b  # noqa: E731
    pre = tuple(sign(b) for b in shifted.preperiod)
    per = tuple(sign(b) for b in shifted.period)
    return _series_from_signs(pre, per, theta)


def evaluate(series: KneadingSeries, t, depth: int | None = None) -> tuple[Fraction, Fraction]:
    """Enclosure of P(t) for 0 < t < 1.

    Without ``depth`` the closed form is used and the enclosure is a point.
    With ``depth`` the partial sum through t^depth is widened by the tail
    bound ``t^(depth+1) / (1 - t)``.
    """
    t = Fraction(t)
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if depth is None:
        v = eval_exact(list(series.numerator), t) / (1 - t ** series.denominator_exponent)
        return v, v
    s = eval_exact(series.coefficients(depth + 1), t)
    tail = t ** (depth + 1) / (1 - t)
    return s - tail, s + tail


# -- interval helpers ---------------------------------------------------------

@contextmanager
def _iv_prec(prec: int):
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _iv_rational(x: Fraction):
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def _iv_hull(lo: Fraction, hi: Fraction):
    a, b = _iv_rational(lo), _iv_rational(hi)
    return iv.mpf([a.a, b.b])


def _iv_horner(p, x):
    acc = iv.mpf(p[-1])
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def _iv_min_abs(x) -> mpmath.mpf:
    a, b = x.a, x.b
    if a <= 0 <= b:
        return mpmath.mpf(0)
    return min(abs(a), abs(b))


def series_derivative_bound(series: KneadingSeries, lo: Fraction, hi: Fraction, prec: int | None = None):
    """Lower bound of |P'(t)| over [lo, hi] by interval arithmetic."""
    prec = prec or default_precision()
    with _iv_prec(prec):
        x = _iv_hull(lo, hi)
        N = list(series.numerator)
        dN = poly_derivative(N)
        P = series.denominator_exponent
        n_val = _iv_horner(N, x)
        dn_val = _iv_horner(dN, x)
        xp = x ** P
        den = 1 - xp
        deriv = (dn_val * den + P * (x ** (P - 1)) * n_val) / (den * den)
        return mpmath.mpf(_iv_min_abs(deriv))


@dataclass(frozen=True)
class EntropyResult:
    """Certified entropy of an angle.

    ``certificate`` is ``"root"`` (minimal root enclosed in [root_lo, root_hi]),
    ``"no_root"`` (no root in (0, 1), entropy exactly 0) or ``"interval"``
    (prefix-based enclosure from :func:`entropy_stream`).
    """

    angle: BinaryAngle | None
    certificate: str
    root_lo: Fraction | None
    root_hi: Fraction | None
    entropy_lo: mpmath.mpf
    entropy_hi: mpmath.mpf
    derivative_lb: mpmath.mpf | None = None
    reduced_to: BinaryAngle | None = None
    depth: int | None = None
    widen: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def entropy(self) -> float:
        return float((self.entropy_lo + self.entropy_hi) / 2)

    @property
    def width(self) -> float:
        return float(self.entropy_hi - self.entropy_lo)

    @property
    def growth_lo(self):
        return mpmath.exp(self.entropy_lo)

    @property
    def growth_hi(self):
        return mpmath.exp(self.entropy_hi)

    def to_record(self) -> dict:
        rec = {
            "angle": self.angle.fraction_string() if self.angle is not None else None,
            "r_lo": _down(self.root_lo) if self.root_lo is not None else None,
            "r_hi": _up(self.root_hi) if self.root_hi is not None else None,
            "entropy_lo": _down(self.entropy_lo),
            "entropy_hi": _up(self.entropy_hi),
            "derivative_lb": _down(self.derivative_lb) if self.derivative_lb is not None else None,
            "certificate": self.certificate,
        }
        if self.reduced_to is not None:
            rec["reduced_to"] = self.reduced_to.fraction_string()
        if self.depth is not None:
            rec["depth"] = self.depth
            rec["widen"] = self.widen
        return rec


def _entropy_bounds(r_lo: Fraction, r_hi: Fraction, prec: int):
    with _iv_prec(prec):
        h = -iv.log(_iv_hull(r_lo, r_hi))
        lo, hi = mpmath.mpf(h.a), mpmath.mpf(h.b)
    return max(lo, mpmath.mpf(0)), hi


def _root_of_numerator(numerator: tuple[int, ...], tol: Fraction, max_bisections: int, prec: int):
    return minimal_root(list(numerator), tol, max_bisections=max_bisections, fast_prec=prec)


@lru_cache(maxsize=65536)
def _cached_root(numerator: tuple[int, ...], tol: Fraction, max_bisections: int, prec: int):
    return _root_of_numerator(numerator, tol, max_bisections, prec)


def _entropy_of_series(series: KneadingSeries, tol: Fraction, max_bisections: int,
                       prec: int) -> EntropyResult:
    enc = _cached_root(series.numerator, tol, max_bisections, prec)
    zero = mpmath.mpf(0)
    if enc is None:
        return EntropyResult(series.source, "no_root", None, None, zero, zero)
    dlb = series_derivative_bound(series, enc.lo, enc.hi, prec)
    # interval wrapping can swamp a small but nonzero |P'|; tighten and retry
    inner = tol
    for _ in range(4):
        if dlb > 0 or enc.exact:
            break
        inner = inner / (1 << 40)
        enc = _cached_root(series.numerator, inner, max_bisections, max(prec, 2 * inner.denominator.bit_length()))
        dlb = series_derivative_bound(series, enc.lo, enc.hi, max(prec, 2 * inner.denominator.bit_length()))
    lo_h, hi_h = _entropy_bounds(enc.lo, enc.hi, prec)
    if dlb <= 0:
        raise SuspectedMultipleRoot(
            f"|P'| not bounded away from 0 at the minimal root of {series.source}: "
            "the root should be simple"
        )
    return EntropyResult(series.source, "root", enc.lo, enc.hi, lo_h, hi_h, dlb)


def entropy(theta: BinaryAngle, tol=DEFAULT_TOL, *, max_bisections: int = 10_000,
            prec: int | None = None) -> EntropyResult:
    """Entropy from the minimal root of the (formal) kneading series of θ.

    This is the entropy of the unimodal map with kneading angle θ when θ is
    a real angle.  For other angles use :func:`extended_entropy`.
    """
    prec = prec or default_precision()
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _entropy_of_series(series_from_angle(theta), tol, max_bisections, prec)


def extended_entropy(theta: BinaryAngle, tol=DEFAULT_TOL, *, max_bisections: int = 10_000,
                     prec: int | None = None) -> EntropyResult:
    """Entropy extended to all of [0, 1/2] by constancy on gaps.

    A non-real angle x lies in a gap (θ, pd(θ)) with θ purely periodic and
    real; its entropy is that of θ (reported in ``reduced_to``).
    """
    cls = is_real_angle(theta)
    if cls.member:
        return entropy(theta, tol, max_bisections=max_bisections, prec=prec)
    root = gap_root(theta)
    res = entropy(root, tol, max_bisections=max_bisections, prec=prec)
    return replace(res, angle=theta, reduced_to=root)


def _prefix_bounds(prefix: list[int], tol: Fraction, prec: int):
    """Tail-bound enclosure of the minimal root over all series with this prefix."""
    depth = len(prefix)
    q = [1] + [1 - 2 * b for b in prefix[1:]]   # eps_1 .. eps_{depth-1}
    base = poly_mul(q, [1, -1])
    tail = [0] * depth + [1]
    lower_env = poly_sub(base, tail)
    upper_env = poly_add(base, tail)
    lo_enc = minimal_root(lower_env, tol, fast_prec=prec)
    r_lo = Fraction(1) if lo_enc is None else lo_enc.lo
    r_hi = Fraction(1)
    hi_enc = minimal_root(upper_env, tol, fast_prec=prec)
    if hi_enc is not None:
        cand = hi_enc.hi
        if cand < 1 and sign_at(upper_env, cand) < 0:
            r_hi = cand
    return r_lo, r_hi


def entropy_stream(digits: Iterable[int], depth: int, tol=Fraction(1, 10**10), *,
                   max_depth: int = 1 << 16, prec: int | None = None) -> EntropyResult:
    """Entropy enclosure from a prefix of the binary expansion.

    Two certified enclosures are intersected: the tail bound of the
    truncated kneading series, and monotonicity of entropy applied to the
    two ends of the binary cylinder of the prefix.  The depth doubles until
    the width is at most ``tol`` or ``max_depth`` is reached, in which case
    ``widen`` is set.
    """
    prec = prec or default_precision()
    tol = Fraction(tol)
    it = iter(digits)
    bits: list[int] = []
    root_tol = tol / 8
    while True:
        need = depth - len(bits)
        bits.extend(itertools.islice(it, need))
        if len(bits) < depth:
            depth = len(bits)
        if not bits or bits[0] != 0:
            raise AngleError("digit stream must start with 0 (angle in [0, 1/2])")
        r_lo, r_hi = _prefix_bounds(bits, root_tol, prec)
        zero = mpmath.mpf(0)
        tail_lo = _entropy_bounds(r_hi, r_hi, prec)[0] if r_hi < 1 else zero
        tail_hi = _entropy_bounds(r_lo, r_lo, prec)[1] if r_lo < 1 else zero
        left = BinaryAngle(tuple(bits), (0,))
        right = BinaryAngle(tuple(bits), (1,))
        e_left = extended_entropy(left, root_tol, prec=prec)
        e_right = extended_entropy(right, root_tol, prec=prec) if right.value <= HALF else None
        mono_lo = e_left.entropy_lo
        mono_hi = e_right.entropy_hi if e_right is not None else mpmath.log(2)
        lo = max(tail_lo, mono_lo)
        hi = min(tail_hi, mono_hi)
        width = hi - lo
        tol_f = mpmath.mpf(tol.numerator) / tol.denominator
        exhausted = len(bits) < depth or depth * 2 > max_depth
        if width <= tol_f or exhausted:
            return EntropyResult(None, "interval", r_lo, r_hi, lo, hi, depth=depth,
                                 widen=bool(width > tol_f),
                                 extra={"tail": (tail_lo, tail_hi), "monotone": (mono_lo, mono_hi)})
        depth *= 2


def _angle_poly(series: KneadingSeries):
    return list(series.numerator), series.denominator()


def pd_identity_check(theta: BinaryAngle) -> bool:
    """Exact check of P_pd(t) (1 + t^p) = P(t) (1 - t^p) after clearing denominators."""
    p = len(theta.period)
    doubled = period_doubling(theta)
    s1, s2 = series_from_angle(theta), series_from_angle(doubled)
    n1, d1 = _angle_poly(s1)
    n2, d2 = _angle_poly(s2)
    plus = [1] + [0] * (p - 1) + [1]
    minus = [1] + [0] * (p - 1) + [-1]
    left = poly_mul(poly_mul(n2, plus), d1)
    right = poly_mul(poly_mul(n1, minus), d2)
    return poly_trim(left) == poly_trim(right)


def _coefficient_agreement(s1: KneadingSeries, s2: KneadingSeries) -> int:
    a = max(len(s1.pre_signs), len(s2.pre_signs))
    p, q = s1.denominator_exponent, s2.denominator_exponent
    from math import gcd
    for k in range(1, a + p * q // gcd(p, q) + 2):
        if s1.coefficient(k) != s2.coefficient(k):
            return k
    raise ValueError("series coincide")


def difference_decomposition(theta: BinaryAngle, theta_prime: BinaryAngle, t) -> tuple[int, Fraction]:
    """Index n of the first differing coefficient and ``(P(t) - P'(t)) / t^n``.

    The quotient is a power series with leading coefficient ±2 and all
    coefficients bounded by 2 in absolute value.
    """
    if theta == theta_prime:
        raise ValueError("angles must differ")
    t = Fraction(t)
    s1, s2 = series_from_angle(theta), series_from_angle(theta_prime)
    n = _coefficient_agreement(s1, s2)
    v1, _ = evaluate(s1, t)
    v2, _ = evaluate(s2, t)
    return n, (v1 - v2) / t ** n


def mean_value_check(theta: BinaryAngle, theta_prime: BinaryAngle, tol=Fraction(1, 10**15),
                     prec: int | None = None) -> dict:
    """Diagnostic: ``|r' - r| <= |h(r)| r^n / min |P'_{θ'}|`` between the two roots."""
    prec = prec or default_precision()
    e1 = entropy(theta, tol, prec=prec)
    e2 = entropy(theta_prime, tol, prec=prec)
    if e1.certificate != "root" or e2.certificate != "root":
        return {"applicable": False}
    s2 = series_from_angle(theta_prime)
    r = (e1.root_lo + e1.root_hi) / 2
    n, hval = difference_decomposition(theta, theta_prime, r)
    lo = min(e1.root_lo, e2.root_lo)
    hi = max(e1.root_hi, e2.root_hi)
    dlb = series_derivative_bound(s2, lo, hi, prec)
    gap = abs((e2.root_lo + e2.root_hi) / 2 - r)
    slack = e1.root_hi - e1.root_lo + e2.root_hi - e2.root_lo
    if dlb <= 0:
        return {"applicable": True, "holds": False, "n": n}
    r_f = mpmath.mpf(r.numerator) / r.denominator
    bound = mpmath.mpf(abs(float(hval))) * r_f ** n / dlb
    lhs = gap - slack
    return {"applicable": True, "holds": bool(mpmath.mpf(lhs.numerator) / lhs.denominator <= bound),
            "n": n, "gap": float(gap), "bound": float(bound)}
