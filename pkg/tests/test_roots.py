from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kneadent._roots import (
    CertificationError,
    SuspectedMultipleRoot,
    descartes_count,
    eval_exact,
    minimal_root,
    poly_mul,
    sign_at,
)


def test_exact_rational_root_at_half():
    enc = minimal_root([1, -2], Fraction(1, 10**12))
    assert enc.exact and enc.lo == Fraction(1, 2)


def test_golden_root():
    enc = minimal_root([1, -1, -1], Fraction(1, 10**20))
    g = (mpmath.sqrt(5) - 1) / 2
    assert mpmath.mpf(enc.lo.numerator) / enc.lo.denominator <= g <= mpmath.mpf(enc.hi.numerator) / enc.hi.denominator
    assert enc.hi - enc.lo <= Fraction(1, 10**20)
    assert sign_at([1, -1, -1], enc.lo) == -sign_at([1, -1, -1], enc.hi)


def test_no_root():
    assert minimal_root([1, 1], Fraction(1, 10**9)) is None
    assert minimal_root([1], Fraction(1, 10**9)) is None


def test_minimal_of_several():
    # roots 3/5, 2/3 and 4/5 in (1/2, 1)
    p = poly_mul(poly_mul([-3, 5], [-2, 3]), [-4, 5])
    enc = minimal_root(p, Fraction(1, 10**15))
    assert enc.lo <= Fraction(3, 5) <= enc.hi


def test_double_root_flagged():
    p = poly_mul([-1, 1, 1], [-1, 1, 1])
    with pytest.raises(SuspectedMultipleRoot):
        minimal_root(p, Fraction(1, 10**12), max_depth=40)


def test_bisection_cap():
    with pytest.raises(CertificationError):
        minimal_root([1, -1, -1], Fraction(1, 10**30), max_bisections=5, fast_prec=None)


def test_descartes_counts():
    assert descartes_count([1, -1, -1], Fraction(1, 2), Fraction(1)) == 1
    assert descartes_count([1, 1], Fraction(1, 2), Fraction(1)) == 0


def test_eval_exact():
    assert eval_exact([1, -1, -1], Fraction(1, 2)) == Fraction(1, 4)


coeffs = st.lists(st.integers(-5, 5), min_size=2, max_size=12).filter(lambda c: c[-1] != 0 and c[0] == 1)


@settings(max_examples=80, deadline=None)
@given(coeffs)
def test_matches_float_oracle(c):
    """Compare with numpy roots where the float answer is unambiguous."""
    try:
        enc = minimal_root(c, Fraction(1, 10**12), max_depth=60)
    except SuspectedMultipleRoot:
        return
    roots = np.roots(c[::-1])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 and 0.5 - 1e-9 <= r.real < 1 - 1e-9)
    if enc is None:
        assert all(abs(r - 0.5) < 1e-6 or r > 1 - 1e-6 for r in real) or not real
        return
    if real:
        assert abs(float(enc.lo) - real[0]) < 1e-6
    if not enc.exact:
        assert sign_at(c, enc.lo) == -sign_at(c, enc.hi)
    # nothing to the left of the enclosure: sign at 1/2 equals sign just left of lo
    s_half = sign_at(c, Fraction(1, 2))
    if s_half != 0 and not enc.exact:
        assert s_half == sign_at(c, enc.lo)
