import math
from fractions import Fraction

import pytest

from kneadent.angles import from_fraction
from kneadent.realset import RealSetError
from kneadent.holder import (
    PlateauError,
    feigenbaum_ladder,
    feigenbaum_star_bounds,
    ladder_checks,
    local_exponent,
    lower_bound_probe,
    thue_morse,
    upper_bound_probe,
)

F = from_fraction
LOG2 = math.log(2)


def test_thue_morse_blocks():
    assert thue_morse(0) == (0,)
    assert thue_morse(2) == (0, 1, 1, 0)
    assert thue_morse(3) == (0, 1, 1, 0, 1, 0, 0, 1)
    for n in range(6):
        s, t = thue_morse(n), thue_morse(n + 1)
        assert len(s) == 2 ** n
        assert t == s + tuple(1 - b for b in s)
    with pytest.raises(ValueError):
        thue_morse(21)


def test_star_prefix_bracket():
    lo, hi = feigenbaum_star_bounds(32)
    assert lo <= Fraction(412454, 10**6) + Fraction(1, 10**6) and hi >= Fraction(412454, 10**6)
    assert float(lo) == pytest.approx(0.412454, abs=1e-6)


@pytest.fixture(scope="module")
def ladder():
    return feigenbaum_ladder(8)


def test_ladder_first_rungs(ladder):
    assert ladder[0].theta.value == Fraction(1, 2)
    assert ladder[1].theta.value == Fraction(5, 12)
    assert ladder[2].theta.value == Fraction(33, 80)
    assert ladder[2].eta.value == Fraction(2, 5)


def test_ladder_entropy_law(ladder):
    for r in ladder:
        lo, hi = r.scaled_entropy
        assert abs(lo - LOG2) <= 1e-9 and abs(hi - LOG2) <= 1e-9


def test_ladder_decreasing_to_star(ladder):
    vals = [r.theta.value for r in ladder]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(r.gap_lo > 0 for r in ladder)


def test_ladder_gap_exponent(ladder):
    # θ_n and θ⋆ share exactly 3·2^n leading digits
    for r in ladder:
        assert r.agreement == 3 * 2 ** r.n + 1
    for r in ladder[2:]:
        k = 2 ** r.n
        log_gap = math.log2(r.gap_lo.numerator) - math.log2(r.gap_lo.denominator)
        # log2 |θ_n - θ⋆| = -3·2^n + O(1)
        assert abs(log_gap + 3 * k) < 4


def test_modulus_product_bounded(ladder):
    # h · log(1/gap) stays of order one, tending to 3 (log 2)^2
    prods = [r.modulus_product for r in ladder[2:]]
    for lo, hi in prods:
        assert 1.0 < lo <= hi < 2.0
    assert abs(float(prods[-1][0]) - 3 * LOG2 ** 2) < 0.01


def test_ladder_checks_report(ladder):
    out = ladder_checks(ladder)
    assert out["entropy"] is True
    assert len(out["modulus_products"]) == 7


def test_plateau_report():
    with pytest.raises(PlateauError):
        local_exponent(F(7, 20), 8, 20, 2)


def test_one_sided_at_left_endpoint():
    with pytest.raises(PlateauError):
        local_exponent(F(3, 7), 8, 30, 4, side="right")
    est = local_exponent(F(3, 7), 8, 30, 4, side="left")
    assert abs(est.exponent - est.predicted) < 0.1


def test_tip_left_side_is_plateau():
    with pytest.raises(PlateauError):
        local_exponent(F(25, 56), 8, 30, 4, side="left")


def test_estimate_outputs():
    est = local_exponent(F(25, 56), 8, 24, 4, side="right")
    assert est.sample_count == 4 and est.scale_window == (8, 24)
    assert est.residual >= 0
    for p in est.pairs:
        assert Fraction(1, 2 ** p.scale) <= abs(p.delta_theta) < Fraction(2, 2 ** p.scale)
    lines = est.csv().splitlines()
    assert lines[0] == "scale,delta_theta,delta_h,used_flag"
    assert len(lines) == len(est.pairs) + 1
    s = est.summary()
    assert set(s) >= {"theta", "exponent", "predicted", "residual", "window"}


def test_robust_to_sample_doubling():
    a = local_exponent(F(25, 56), 8, 40, 4, side="right")
    b = local_exponent(F(25, 56), 8, 40, 8, side="right")
    assert abs(a.exponent - b.exponent) < 0.05


def test_upper_probe():
    c, holds = upper_bound_probe(F(1, 2), [F(3, 7), F(25, 56), F(33, 80)])
    assert math.isfinite(c) and c > 0 and holds
    c0, holds0 = upper_bound_probe(F(3, 7), [F(25, 56), F(11, 25)])
    assert c0 == 0 and holds0


def test_upper_probe_refinement():
    pairs = [F(x.numerator, x.denominator) for x in
             (Fraction(1, 2) - Fraction(1, 2 ** j) for j in range(4, 20))]
    c, holds = upper_bound_probe(F(1, 2), pairs)
    assert holds


def test_lower_probe():
    p = lower_bound_probe(F(3, 7), 6)
    assert p.theta_prime == F(2, 5)
    assert p.block_length == 12
    assert all(p.distance_ok)
    assert p.c_hat > 0 and p.holds
    single = lower_bound_probe(F(3, 7), 1)
    assert single.holds is None and single.c_hat > 0


def test_lower_probe_needs_positive_entropy():
    with pytest.raises(RealSetError):
        lower_bound_probe(F(1, 3), 3)
