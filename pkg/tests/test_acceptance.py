"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import csv
import io
import math
import random
import sys
import time
from contextlib import redirect_stdout
from fractions import Fraction

import mpmath
import pytest

from kneadent import cli
from kneadent.angles import distance_bounds_check, from_fraction
from kneadent.holder import feigenbaum_ladder, ladder_checks, local_exponent, lower_bound_probe
from kneadent.kneading import entropy, extended_entropy, pd_identity_check
from kneadent.opendyn import cylinder_count, dimension
from kneadent.realset import is_real_angle, period_doubling, periodic_members, small_copy_tip

LOG2 = math.log(2)
F = from_fraction


def _mid(res):
    return (res.entropy_lo + res.entropy_hi) / 2


@pytest.fixture(scope="module")
def members12():
    return periodic_members(12)


def test_criterion_01_exact_anchors():
    """h(1/2) = log 2 within 1e-10; h(0) = h(1/3) = h(2/5) = 0 with no-root certificates; < 1 s"""
    t0 = time.perf_counter()
    top = entropy(F(1, 2))
    zeros = [entropy(F(*a)) for a in [(0, 1), (1, 3), (2, 5)]]
    elapsed = time.perf_counter() - t0
    assert top.certificate == "root"
    assert abs(top.entropy_lo - mpmath.log(2)) <= 1e-10
    assert abs(top.entropy_hi - mpmath.log(2)) <= 1e-10
    for z in zeros:
        assert z.certificate == "no_root"
        assert z.entropy_lo == 0 and z.entropy_hi == 0
    assert elapsed < 1.0


def test_criterion_02_golden_ratio():
    """h(3/7) = log((1+sqrt5)/2) within 1e-10, root oracle by the quadratic formula"""
    # 1 - t - t^2 = 0  =>  t = (-1 + sqrt(1 + 4)) / 2
    a, b, c = -1, -1, 1
    r = (-b - mpmath.sqrt(b * b - 4 * a * c)) / (2 * a)
    oracle = -mpmath.log(r)
    res = entropy(F(3, 7))
    assert abs(res.entropy_lo - oracle) <= 1e-10
    assert abs(res.entropy_hi - oracle) <= 1e-10


def test_criterion_03_period_doubling(members12):
    """pd identity exact and |h(pd) - h| <= 2e-12 for >= 20 periodic members, period <= 12"""
    corpus = members12[::9]
    assert len(corpus) >= 20
    for theta in corpus:
        assert pd_identity_check(theta), theta
        h1, h2 = entropy(theta), entropy(period_doubling(theta))
        assert abs(_mid(h1) - _mid(h2)) <= 2e-12, theta


def test_criterion_04_root_simplicity(members12):
    """derivative lower bound > 1e-6 at every certified root in the corpus"""
    corpus = list(members12)
    corpus += [small_copy_tip(t) for t in members12 if is_real_angle(t).primitive]
    corpus += [F(1, 2), F(25, 56), F(33, 80), F(5, 12)]
    roots = 0
    for theta in corpus:
        res = entropy(theta)
        if res.certificate == "root":
            roots += 1
            assert res.derivative_lb > 1e-6, theta
    assert roots > 100


def test_criterion_05_monotone_scan():
    """depth-12 dyadic scan of [0, 1/2]: h columns weakly increasing up to certification width, < 1 min"""
    buf = io.StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        code = cli.main(["scan", "--from", "0", "--to", "1/2", "--depth", "12", "--workers", "2"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(rows) == 2049
    prev_lo = -1.0
    for row in rows:
        lo, hi = float(row["h_lo"]), float(row["h_hi"])
        assert hi >= prev_lo, row
        prev_lo = max(prev_lo, lo)
    assert elapsed < 60


def _oracle_corpus():
    periodic = [m for m in periodic_members(10, min_period=2) if m.value > 0]
    step = max(1, len(periodic) // 24)
    chosen = periodic[::step][:24]
    prim = [m for m in periodic if is_real_angle(m).primitive]
    tips = [small_copy_tip(m) for m in prim[:: max(1, len(prim) // 5)]][:5]
    return chosen + tips + [F(1, 2)]


def test_criterion_06_oracle_cross_check():
    """|dimension - h/log 2| <= 1e-8 on a 30-angle corpus (periods <= 10); counting modes agree for n <= 16"""
    corpus = _oracle_corpus()
    assert len(corpus) == 30
    for theta in corpus:
        assert is_real_angle(theta).member
        d = dimension(theta, Fraction(1, 10**12))
        h = entropy(theta)
        eta = (d["dimension_lo"] + d["dimension_hi"]) / 2
        assert abs(eta - _mid(h) / mpmath.log(2)) <= 1e-8, theta
    for theta in [F(1, 3), F(2, 5), F(3, 7)]:
        for n in range(1, 17):
            assert cylinder_count(theta, n, "automaton") == cylinder_count(theta, n, "naive"), (theta, n)


def test_criterion_07_holder_law():
    """local exponent at 1/2 in [0.9, 1.1], at 25/56 in [0.64, 0.75], at 33/80 in [0.2, 0.3]; < 5 min"""
    t0 = time.perf_counter()
    top = local_exponent(F(1, 2), 8, 48, 8)
    # left of 25/56 is the small copy of 3/7, where entropy is constant; those
    # pairs are discarded and the fit uses the active side
    tip = local_exponent(F(25, 56), 8, 48, 8, side="both")
    feig = local_exponent(F(33, 80), 8, 48, 8)
    elapsed = time.perf_counter() - t0
    assert 0.9 <= top.exponent <= 1.1
    assert 0.64 <= tip.exponent <= 0.75
    assert 0.2 <= feig.exponent <= 0.3
    assert elapsed < 300


def test_criterion_08_lower_bound_probe():
    """c_hat > 0 and non-vanishing over m = 1..6 at 3/7, with |θ - θ_m| <= 2^-mP exact"""
    probe = lower_bound_probe(F(3, 7), 6)
    assert all(probe.distance_ok)
    for m, tm in enumerate(probe.approximants, start=1):
        gap = F(3, 7).value - tm.value
        assert 0 < gap <= Fraction(1, 2 ** (m * probe.block_length))
    assert probe.c_hat > 0
    assert probe.holds is True


def test_criterion_09_feigenbaum_ladder():
    """h(θ_n)·2^n = log 2 within 1e-9 (n <= 8); gap within factor 4 of c·2^(-2^n); modulus product in [0.2, 1.2] for 2 <= n <= 8"""
    ladder = feigenbaum_ladder(8)
    checks = ladder_checks(ladder, n_from=2, entropy_tol=1e-9, bracket=(0.2, 1.2), factor=4.0)
    print("ladder checks:", {k: checks[k] for k in ("entropy", "gap_bracket", "modulus")},
          "log2 spread of gap·2^(2^n):", round(checks["gap_log2_spread"], 2),
          "modulus products:", [round(lo, 4) for lo, _ in checks["modulus_products"]],
          file=sys.stderr)
    assert checks["entropy"]
    assert checks["gap_bracket"]
    assert checks["modulus"]


def test_criterion_10_gap_and_copy_constancy():
    """h_ext = 0 at 20 rationals in (1/3, 2/5); = h(3/7) within 1e-8 at 20 rationals in (3/7, 25/56)"""
    def interior(a, b, k):
        return [a + (b - a) * Fraction(i, k + 1) for i in range(1, k + 1)]

    for x in interior(Fraction(1, 3), Fraction(2, 5), 20):
        res = extended_entropy(from_fraction(x.numerator, x.denominator))
        assert res.entropy_lo == 0 and res.entropy_hi == 0, x
    ref = _mid(entropy(F(3, 7)))
    for x in interior(Fraction(3, 7), Fraction(25, 56), 20):
        res = extended_entropy(from_fraction(x.numerator, x.denominator))
        assert abs(_mid(res) - ref) <= 1e-8, x


def test_criterion_11_distance_bounds(members12):
    """c·2^-n <= |θ - θ'| <= 2^(1-n) exactly for 1000 random pairs of real angles"""
    rng = random.Random(20240601)
    pool = [m for m in members12 if m.value > 0]
    pool += [small_copy_tip(m) for m in members12 if is_real_angle(m).primitive]
    pool += [F(1, 2)]
    checked = 0
    while checked < 1000:
        a, b = rng.sample(pool, 2)
        if a.value == b.value:
            continue
        x, y = (a, b) if a.value > b.value else (b, a)
        lower, upper, holds = distance_bounds_check(x, y)
        assert holds, (x, y, lower, upper)
        checked += 1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
