"""Certified real roots of integer polynomials on [1/2, 1).

Polynomials are coefficient lists, lowest degree first.  Isolation uses
Descartes' rule of signs with dyadic bisection (Collins-Akritas), searched
left to right so that the first isolated root is the minimal one.
Refinement is exact sign bisection at dyadic points, optionally seeded by
a high-precision Newton iterate that is always re-certified by two exact
sign evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

import mpmath

__all__ = [
    "CertificationError",
    "RootEnclosure",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_trim",
    "poly_derivative",
    "eval_exact",
    "sign_at",
    "descartes_count",
    "minimal_root",
]

HALF = Fraction(1, 2)


class CertificationError(RuntimeError):
    """A root enclosure could not be certified."""


class SuspectedMultipleRoot(CertificationError):
    """Isolation did not terminate: a multiple root is the likely cause."""


def poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_sub(p, q):
    return poly_add(p, [-c for c in q])


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_derivative(p):
    if len(p) == 1:
        return [0]
    return [k * p[k] for k in range(1, len(p))]


def eval_exact(p, t) -> Fraction:
    t = Fraction(t)
    num, den = t.numerator, t.denominator
    return Fraction(_homogeneous(p, num, den), den ** (len(p) - 1))


def _homogeneous(p, num: int, den: int) -> int:
    # sum_k p[k] num^k den^(d-k)
    acc = p[-1]
    dpow = 1
    for c in reversed(p[:-1]):
        dpow *= den
        acc = acc * num + c * dpow
    return acc


def sign_at(p, t) -> int:
    """Exact sign of p(t) for rational t."""
    t = Fraction(t)
    v = _homogeneous(p, t.numerator, t.denominator)
    return (v > 0) - (v < 0)


def _taylor_shift1(a):
    # coefficients of a(x + 1)
    a = list(a)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += a[j + 1]
    return a


def _variations(coeffs) -> int:
    v = 0
    last = 0
    for c in coeffs:
        if c:
            if last and (c > 0) != (last > 0):
                v += 1
            last = c
    return v


def _unit_count(q) -> int:
    """Descartes bound for roots of q in (0, 1); exact when it is 0 or 1."""
    nz = [c for c in q if c]
    if all(c > 0 for c in nz) or all(c < 0 for c in nz):
        return 0
    return _variations(_taylor_shift1(q[::-1]))


def _halve(q):
    # 2^d q(y/2)
    d = len(q) - 1
    out = [c << (d - i) for i, c in enumerate(q)]
    g = reduce(gcd, out)
    return [c // g for c in out] if g > 1 else out


def _to_unit(p, a: Fraction, b: Fraction):
    """Integer polynomial q(y) proportional to p(a + (b - a) y)."""
    a, w = Fraction(a), Fraction(b) - Fraction(a)
    # p(a + w y): scale by w then shift by a/w, done exactly via Fractions once
    d = len(p) - 1
    coeffs = [Fraction(c) for c in p]
    # substitute t = a + w*y with repeated synthetic division (Taylor expansion at a)
    shifted = list(coeffs)
    for i in range(d):
        for j in range(d - 1, i - 1, -1):
            shifted[j] += a * shifted[j + 1]
    scaled = [c * w ** k for k, c in enumerate(shifted)]
    lcm = reduce(lambda x, y: x * y // gcd(x, y), (c.denominator for c in scaled), 1)
    ints = [int(c * lcm) for c in scaled]
    g = reduce(gcd, ints)
    return [c // g for c in ints] if g > 1 else ints


def descartes_count(p, a, b) -> int:
    """Descartes sign-variation count for roots of p in the open interval (a, b)."""
    return _unit_count(_to_unit(p, a, b))


@dataclass(frozen=True)
class RootEnclosure:
    lo: Fraction
    hi: Fraction
    isolating: tuple[Fraction, Fraction]
    nodes: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def _isolate_minimal(p, a: Fraction, b: Fraction, max_depth: int):
    """Leftmost isolating interval of a root of p in (a, b), or None.

    Returns ``(lo, hi, exact, nodes)``; when ``exact`` the root is ``lo``.
    """
    q0 = _to_unit(p, a, b)
    w = b - a
    stack = [("node", 0, 0, q0)]
    nodes = 0
    while stack:
        item = stack.pop()
        if item[0] == "mid":
            _, k, c = item
            t = a + w * Fraction(c, 1 << k)
            if sign_at(p, t) == 0:
                return t, t, True, nodes
            continue
        _, k, c, q = item
        nodes += 1
        v = _unit_count(q)
        if v == 0:
            continue
        lo = a + w * Fraction(c, 1 << k)
        hi = a + w * Fraction(c + 1, 1 << k)
        if v == 1:
            return lo, hi, False, nodes
        if k >= max_depth:
            raise SuspectedMultipleRoot(
                f"root isolation did not terminate near [{float(lo)}, {float(hi)}]"
            )
        left = _halve(q)
        right = _taylor_shift1(left)
        stack.append(("node", k + 1, 2 * c + 1, right))
        stack.append(("mid", k + 1, 2 * c + 1))
        stack.append(("node", k + 1, 2 * c, left))
    return None


def _dyadic_floor(x, bits: int) -> Fraction:
    return Fraction(int(mpmath.floor(x * (1 << bits))), 1 << bits)


def _newton_seed(p, lo: Fraction, hi: Fraction, prec: int):
    with mpmath.workprec(prec):
        dp = poly_derivative(p)
        coeffs = [mpmath.mpf(c) for c in reversed(p)]
        dcoeffs = [mpmath.mpf(c) for c in reversed(dp)]
        x = (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2
        for _ in range(200):
            fx = mpmath.polyval(coeffs, x)
            dfx = mpmath.polyval(dcoeffs, x)
            if dfx == 0:
                return None
            step = fx / dfx
            x -= step
            if abs(step) <= mpmath.ldexp(abs(x), -prec + 4):
                return x
        return None


def minimal_root(p, tol: Fraction, *, lower=HALF, upper=Fraction(1),
                 max_depth: int = 400, max_bisections: int = 10_000,
                 fast_prec: int | None = 128) -> RootEnclosure | None:
    """Certified enclosure of the smallest root of p in [lower, upper).

    Returns None when p has no root there (certified by Descartes counts).
    The enclosure satisfies ``hi - lo <= tol`` and either brackets a sign
    change of p or collapses onto an exact rational root.
    """
    p = poly_trim(p)
    tol = Fraction(tol)
    lower, upper = Fraction(lower), Fraction(upper)
    if p == [0]:
        raise CertificationError("zero polynomial")
    if sign_at(p, lower) == 0:
        return RootEnclosure(lower, lower, (lower, lower), 0)
    if len(p) == 1:
        return None
    found = _isolate_minimal(p, lower, upper, max_depth)
    if found is None:
        return None
    lo, hi, exact, nodes = found
    if exact:
        return RootEnclosure(lo, lo, (lo, lo), nodes)
    iso = (lo, hi)
    s_lo = sign_at(p, lo)

    if fast_prec and hi - lo > tol:
        bits = max(1, (1 / tol).__ceil__().bit_length() + 1)
        prec = max(fast_prec, bits + 32)
        x = _newton_seed(p, lo, hi, prec)
        if x is not None:
            with mpmath.workprec(prec):
                a = _dyadic_floor(x, bits)
            b = a + Fraction(1, 1 << bits)
            if lo <= a and b <= hi:
                sa, sb = sign_at(p, a), sign_at(p, b)
                if sa == 0:
                    return RootEnclosure(a, a, iso, nodes)
                if sb == 0 and sa == s_lo:
                    return RootEnclosure(b, b, iso, nodes)
                if sa == s_lo and sb == -s_lo:
                    return RootEnclosure(a, b, iso, nodes)

    steps = 0
    while hi - lo > tol:
        steps += 1
        if steps > max_bisections:
            raise CertificationError(f"tolerance {float(tol):.3g} not reached in {max_bisections} bisections")
        mid = (lo + hi) / 2
        s = sign_at(p, mid)
        if s == 0:
            return RootEnclosure(mid, mid, iso, nodes)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return RootEnclosure(lo, hi, iso, nodes)
