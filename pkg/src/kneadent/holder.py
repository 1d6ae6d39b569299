"""Local Hölder exponents of the entropy and the Feigenbaum ladder.

The local exponent at θ is estimated from certified entropy differences at
dyadic distances 2^-j, j in a scale window, by a least-squares fit in
log-log coordinates.  The probes check the two one-sided inequalities
behind the exponent law, and the ladder follows the period-doubling
cascade down to the Feigenbaum angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .angles import AngleError, BinaryAngle, agreement_depth, from_value
from .kneading import EntropyResult, entropy, extended_entropy
from .realset import RealSetError, approximant_below, approximant_sequence

__all__ = [
    "PlateauError",
    "HolderEstimate",
    "SamplePair",
    "FeigenbaumLadder",
    "local_exponent",
    "upper_bound_probe",
    "lower_bound_probe",
    "thue_morse",
    "feigenbaum_ladder",
    "ladder_checks",
    "THUE_MORSE_CAP",
]

HALF = Fraction(1, 2)
THUE_MORSE_CAP = 20
GOLDEN = (math.sqrt(5) - 1) / 2
LOG2 = mpmath.log(2)


class PlateauError(RealSetError):
    """Entropy is locally constant at every sampled scale."""


@dataclass(frozen=True)
class SamplePair:
    scale: int
    delta_theta: Fraction      # signed: θ' - θ
    delta_h_lo: mpmath.mpf
    delta_h_hi: mpmath.mpf
    used: bool

    @property
    def delta_h(self) -> float:
        return float((self.delta_h_lo + self.delta_h_hi) / 2)

    def csv_row(self) -> str:
        return f"{self.scale},{float(self.delta_theta)!r},{self.delta_h!r},{int(self.used)}"


@dataclass(frozen=True)
class HolderEstimate:
    theta: BinaryAngle
    exponent: float
    predicted: float
    scale_window: tuple[int, int]
    sample_count: int
    residual: float
    side: str
    pairs: tuple[SamplePair, ...] = field(repr=False, default=())

    @property
    def used_count(self) -> int:
        return sum(p.used for p in self.pairs)

    def summary(self) -> dict:
        return {
            "theta": self.theta.fraction_string(),
            "exponent": self.exponent,
            "predicted": self.predicted,
            "residual": self.residual,
            "window": list(self.scale_window),
            "samples": self.sample_count,
            "used": self.used_count,
            "side": self.side,
        }

    def csv(self) -> str:
        lines = ["scale,delta_theta,delta_h,used_flag"]
        lines += [p.csv_row() for p in self.pairs]
        return "\n".join(lines) + "\n"


def _offset(j: int, i: int) -> Fraction:
    # deterministic low-discrepancy offset in [2^-j, 2^(1-j)), dyadic
    u = (i * GOLDEN) % 1.0
    mant = round(2.0 ** u * (1 << 16))
    mant = min(max(mant, 1 << 16), (1 << 17) - 1)
    return Fraction(mant, 1 << (j + 16))


def _diff(a: EntropyResult, b: EntropyResult):
    return a.entropy_lo - b.entropy_hi, a.entropy_hi - b.entropy_lo


def local_exponent(theta: BinaryAngle, j_min: int = 8, j_max: int = 48,
                   samples_per_scale: int = 8, side: str = "both",
                   root_tol: Fraction | None = None) -> HolderEstimate:
    """Least-squares slope of log2|Δh| against log2|Δθ| near θ.

    Pairs whose certified entropy difference contains 0 are discarded;
    if every pair is discarded θ is reported as lying in a plateau.
    """
    if side not in ("left", "right", "both"):
        raise ValueError("side must be left, right or both")
    if not 2 <= j_min < j_max:
        raise ValueError("need 2 <= j_min < j_max")
    if samples_per_scale < 1:
        raise ValueError("samples_per_scale must be positive")
    x = theta.value
    if not 0 <= x <= HALF:
        raise AngleError("θ must lie in [0, 1/2]")
    tol = root_tol if root_tol is not None else Fraction(1, 1 << (j_max + 24))
    h0 = extended_entropy(theta, tol)
    signs = {"left": (-1,), "right": (1,), "both": (-1, 1)}[side]
    pairs = []
    for j in range(j_min, j_max + 1):
        for i in range(samples_per_scale):
            d = _offset(j, i)
            for s in signs:
                y = x + s * d
                if not 0 <= y <= HALF:
                    continue
                h1 = extended_entropy(from_value(y), tol)
                lo, hi = _diff(h1, h0)
                used = lo > 0 or hi < 0
                pairs.append(SamplePair(j, s * d, lo, hi, used))
    used = [p for p in pairs if p.used]
    predicted = float(h0.entropy_lo / LOG2)
    if len(used) < 2:
        raise PlateauError(
            f"entropy constant at all sampled scales near {theta.fraction_string()} "
            f"(side {side}): θ lies in a plateau"
        )
    X = np.array([math.log2(abs(p.delta_theta)) for p in used])
    Y = np.array([float(mpmath.log(abs((p.delta_h_lo + p.delta_h_hi) / 2), 2)) for p in used])
    A = np.vstack([X, np.ones_like(X)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, Y, rcond=None)
    residual = float(np.max(np.abs(Y - (slope * X + icpt))))
    return HolderEstimate(theta, float(slope), predicted, (j_min, j_max),
                          samples_per_scale, residual, side, tuple(pairs))


def upper_bound_probe(theta: BinaryAngle, pairs, tol=Fraction(1, 10**15)) -> tuple[float, bool]:
    """Empirical constant ``max |Δh| / |Δθ|^(h/log 2)`` over the given angles.

    ``holds`` requires the constant to be finite and not to grow by more
    than a factor 2 from the farther half of the pairs to the closer half.
    """
    h0 = entropy(theta, tol)
    alpha = h0.entropy_lo / LOG2
    vals = []
    for p in pairs:
        if p == theta:
            continue
        h1 = extended_entropy(p, tol)
        dh = max(abs(h0.entropy_hi - h1.entropy_lo), abs(h1.entropy_hi - h0.entropy_lo))
        if h1.entropy_lo == h0.entropy_lo and h1.entropy_hi == h0.entropy_hi:
            dh = mpmath.mpf(0)
        dist = abs(theta.value - p.value)
        vals.append((dist, dh / mpmath.mpf(float(dist)) ** alpha))
    if not vals:
        return 0.0, True
    c_hat = float(max(v for _, v in vals))
    vals.sort(key=lambda v: -v[0])
    half = len(vals) // 2
    if half == 0:
        return c_hat, math.isfinite(c_hat)
    far = max(v for _, v in vals[:half])
    near = max(v for _, v in vals[half:])
    stable = far == 0 or near <= 2 * far
    return c_hat, bool(math.isfinite(c_hat) and stable)


@dataclass(frozen=True)
class LowerProbe:
    c_hat: float
    holds: bool | None
    ratios: tuple[float, ...]
    approximants: tuple[BinaryAngle, ...]
    distance_ok: tuple[bool, ...]
    theta_prime: BinaryAngle
    block_length: int


def lower_bound_probe(theta: BinaryAngle, m_max: int = 6,
                      theta_prime: BinaryAngle | None = None) -> LowerProbe:
    """Ratios ``(r_m - r) / |θ - θ_m|^(h/log 2)`` along aligned approximants θ_m < θ.

    ``holds`` is True when every ratio is positive and the last one is at
    least a quarter of the first (no decay to 0); None when m_max = 1.
    """
    if m_max < 1:
        raise ValueError("m_max must be positive")
    if theta_prime is None:
        theta_prime = approximant_below(theta)
    p, q = len(theta.period), len(theta_prime.period)
    P = p * q
    tol = Fraction(1, 1 << (m_max * P + 24))
    h0 = entropy(theta, tol)
    if h0.certificate != "root":
        raise PlateauError(f"h({theta.fraction_string()}) = 0: no lower bound to probe")
    alpha = h0.entropy_lo / LOG2
    ratios, approx, dist_ok = [], [], []
    for m in range(1, m_max + 1):
        tm = approximant_sequence(theta, theta_prime, m, aligned=True)
        gap = theta.value - tm.value
        dist_ok.append(0 < gap <= Fraction(1, 1 << (m * P)))
        hm = entropy(tm, tol)
        if hm.certificate == "root":
            dr = hm.root_lo - h0.root_hi
        else:
            dr = 1 - h0.root_hi
        with mpmath.workprec(256):
            ratio = mpmath.mpf(dr.numerator) / dr.denominator / (
                mpmath.mpf(gap.numerator) / gap.denominator) ** alpha
        ratios.append(float(ratio))
        approx.append(tm)
    if all(r <= 0 for r in ratios):
        raise PlateauError("r_m = r for all m: θ lies in a plateau")
    c_hat = min(ratios)
    holds = None if m_max == 1 else bool(c_hat > 0 and ratios[-1] >= ratios[0] / 4)
    return LowerProbe(c_hat, holds, tuple(ratios), tuple(approx), tuple(dist_ok),
                      theta_prime, P)


def thue_morse(n: int, cap: int = THUE_MORSE_CAP) -> tuple[int, ...]:
    """Block S_n of length 2^n: S_0 = 0, S_(n+1) = S_n followed by its complement."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > cap:
        raise ValueError(f"n = {n} exceeds the cap {cap}")
    s = (0,)
    for _ in range(n):
        s = s + tuple(1 - b for b in s)
    return s


@dataclass(frozen=True)
class FeigenbaumLadder:
    n: int
    block: tuple[int, ...]
    eta: BinaryAngle
    theta: BinaryAngle
    gap_lo: Fraction
    gap_hi: Fraction
    agreement: int
    entropy: EntropyResult

    @property
    def scaled_entropy(self) -> tuple:
        k = 1 << self.n
        return self.entropy.entropy_lo * k, self.entropy.entropy_hi * k

    @property
    def modulus_product(self) -> tuple:
        """h(θ_n) · (-log |θ_n - θ⋆|) as an interval."""
        with mpmath.workprec(128):
            lg_lo = -mpmath.log(mpmath.mpf(self.gap_hi.numerator) / self.gap_hi.denominator)
            lg_hi = -mpmath.log(mpmath.mpf(self.gap_lo.numerator) / self.gap_lo.denominator)
        return self.entropy.entropy_lo * lg_lo, self.entropy.entropy_hi * lg_hi

    @property
    def gap_ratio(self) -> tuple[float, float]:
        """|θ_n - θ⋆| · 2^(2^n)."""
        k = 1 << (1 << self.n)
        return float(self.gap_lo * k), float(self.gap_hi * k)

    def record(self) -> dict:
        mp = self.modulus_product
        return {
            "n": self.n,
            "theta": self.theta.binary_string() if self.n < 4 else self.theta.fraction_string(),
            "h_lo": float(self.entropy.entropy_lo),
            "h_hi": float(self.entropy.entropy_hi),
            "h_times_2n_lo": float(self.scaled_entropy[0]),
            "h_times_2n_hi": float(self.scaled_entropy[1]),
            "gap_lo": float(self.gap_lo),
            "gap_hi": float(self.gap_hi),
            "agreement_digits": self.agreement,
            "modulus_product_lo": float(mp[0]),
            "modulus_product_hi": float(mp[1]),
        }


def feigenbaum_star_bounds(digits: int) -> tuple[Fraction, Fraction]:
    """Bracket of the Feigenbaum angle from its first ``digits`` Thue-Morse digits (a power of 2)."""
    n = max(0, digits - 1).bit_length()
    s = thue_morse(n, cap=max(THUE_MORSE_CAP, n))
    lo = Fraction(int("".join(map(str, s)), 2), 1 << len(s))
    return lo, lo + Fraction(1, 1 << len(s))


def feigenbaum_ladder(n_max: int, tol=Fraction(1, 10**12), cap: int = THUE_MORSE_CAP) -> list[FeigenbaumLadder]:
    """θ_n = .S_n(Š_n) for n = 0..n_max with certified entropies and gaps to θ⋆."""
    if n_max > cap:
        raise ValueError(f"n_max = {n_max} exceeds the cap {cap}")
    out = []
    for n in range(n_max + 1):
        S = thue_morse(n, cap)
        comp = tuple(1 - b for b in S)
        theta = BinaryAngle(S, comp)
        eta = BinaryAngle((), S)
        # θ_n and θ⋆ share 3·2^n digits; 2^(n+3) digits of θ⋆ pin the gap down
        star_lo, star_hi = feigenbaum_star_bounds(1 << (n + 3))
        gap_lo, gap_hi = theta.value - star_hi, theta.value - star_lo
        if gap_lo <= 0:
            raise AssertionError("θ_n must exceed the Feigenbaum angle")
        prefix = BinaryAngle(thue_morse(n + 3, max(cap, n + 3)), (0,))
        agree = agreement_depth(theta, prefix)
        out.append(FeigenbaumLadder(n, S, eta, theta, gap_lo, gap_hi, agree,
                                    entropy(theta, tol)))
    return out


def ladder_checks(ladder: list[FeigenbaumLadder], n_from: int = 2,
                  entropy_tol: float = 1e-9, bracket=(0.2, 1.2), factor: float = 4.0) -> dict:
    """Evaluate the ladder against the stated laws.

    * ``entropy``: |h(θ_n)·2^n - log 2| <= entropy_tol for every rung;
    * ``gap_bracket``: the ratios |θ_n - θ⋆| · 2^(2^n) for n >= n_from lie
      within a common factor ``factor`` of one constant c;
    * ``modulus``: the modulus product lies in ``bracket`` for n >= n_from.
    """
    ent = all(abs(r.scaled_entropy[0] - LOG2) <= entropy_tol and
              abs(r.scaled_entropy[1] - LOG2) <= entropy_tol for r in ladder)
    rungs = [r for r in ladder if r.n >= n_from]
    # log ratios avoid float underflow of gap·2^(2^n) at large n
    logs = []
    for r in rungs:
        k = 1 << r.n
        logs.append((math.log2(r.gap_lo.numerator) - math.log2(r.gap_lo.denominator) + k,
                     math.log2(r.gap_hi.numerator) - math.log2(r.gap_hi.denominator) + k))
    spread = (max(h for _, h in logs) - min(lo for lo, _ in logs)) if logs else 0.0
    gap_ok = spread <= 2 * math.log2(factor)
    mods = [r.modulus_product for r in rungs]
    mod_ok = all(bracket[0] <= lo and hi <= bracket[1] for lo, hi in mods)
    return {
        "entropy": bool(ent),
        "gap_bracket": bool(gap_ok),
        "gap_log2_spread": spread,
        "modulus": bool(mod_ok),
        "modulus_products": [(float(lo), float(hi)) for lo, hi in mods],
    }
