"""Open dynamics of the doubling map with the symmetric hole (θ, 1 - θ).

The survivor set K(θ) of points whose orbit never enters the hole is
encoded by a Markov partition built from the orbits of the hole endpoints.
Its Perron root λ gives the dimension log λ / log 2.  Nothing here touches
kneading series, so the result is an independent check on the entropy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
import sympy
from mpmath import iv

from ._fmt import down, up
from .angles import AngleError, BinaryAngle

__all__ = [
    "MarkovError",
    "CapExceeded",
    "SurvivorAutomaton",
    "build_automaton",
    "spectral_radius",
    "dimension",
    "cylinder_count",
    "matrix_dump",
    "dimension_record",
    "AUTOMATON_CAP",
    "NAIVE_CAP",
]

HALF = Fraction(1, 2)
AUTOMATON_CAP = 40
NAIVE_CAP = 24
EXACT_STATES = 64


class MarkovError(RuntimeError):
    """The partition failed the exact Markov check."""


class CapExceeded(ValueError):
    """A configured size cap was exceeded."""


def _point_orbit(x: Fraction) -> set[Fraction]:
    # exact orbit of a rational under x -> 2x mod 1 (kept in [0, 1))
    seen = set()
    x = x % 1
    while x not in seen:
        seen.add(x)
        x = (2 * x) % 1
    return seen


@dataclass(frozen=True)
class SurvivorAutomaton:
    theta: Fraction
    cells: tuple[tuple[Fraction, Fraction], ...]   # survivor cells, sorted
    matrix: tuple[tuple[int, ...], ...]
    hole_start: bool = False                      # hole cells kept as transient starts

    @property
    def states(self) -> int:
        return len(self.cells)

    def successors(self, i: int) -> list[int]:
        return [j for j, v in enumerate(self.matrix[i]) if v]


def _image(cell):
    # D on a closed cell inside [0, 1/2] or [1/2, 1], lifted to [0, 1]
    a, b = cell
    if b <= HALF:
        return 2 * a, 2 * b
    return 2 * a - 1, 2 * b - 1


def build_automaton(theta: BinaryAngle | Fraction, *, hole_start: bool = False) -> SurvivorAutomaton:
    """Markov partition of [0, 1] minus the hole and its 0/1 transition matrix.

    ``hole_start=True`` also keeps the cells inside the hole as states with
    no incoming edges (points may start in the hole but never return to it).
    """
    t = theta.value if isinstance(theta, BinaryAngle) else Fraction(theta)
    if not 0 < t <= HALF:
        raise AngleError("θ must lie in (0, 1/2]")
    pts = {Fraction(0), Fraction(1), t, 1 - t, HALF}
    pts |= _point_orbit(t) | _point_orbit(1 - t)
    ends = sorted(pts)
    all_cells = list(zip(ends[:-1], ends[1:]))
    in_hole = [t <= a and b <= 1 - t and t < 1 - t for a, b in all_cells]
    keep = [c for c, h in zip(all_cells, in_hole) if not h or hole_start]
    survivors = [c for c, h in zip(all_cells, in_hole) if not h]
    index = {c: i for i, c in enumerate(keep)}
    pos = {e: i for i, e in enumerate(ends)}
    rows = []
    for cell in keep:
        lo, hi = _image(cell)
        if lo not in pos or hi not in pos:
            raise MarkovError(f"image of {cell} has endpoints off the partition")
        row = [0] * len(keep)
        covered = all_cells[pos[lo]:pos[hi]]
        if not covered:
            raise MarkovError(f"degenerate image of {cell}")
        for c in covered:
            if c in survivors:
                row[index[c]] = 1
        rows.append(tuple(row))
    return SurvivorAutomaton(t, tuple(keep), tuple(rows), hole_start)


# -- spectral radius -----------------------------------------------------------

def _charpoly_radius(matrix, tol: Fraction):
    M = sympy.Matrix(matrix)
    x = sympy.Symbol("x")
    poly = sympy.Poly(M.charpoly(x).as_expr(), x)
    if poly.degree() == 0:
        return Fraction(0), Fraction(0)
    best = None
    for (a, b), _mult in poly.intervals(eps=sympy.Rational(tol.numerator, tol.denominator)):
        if best is None or a > best[0]:
            best = (a, b)
    if best is None:
        return Fraction(0), Fraction(0)
    lo, hi = (Fraction(int(v.p), int(v.q)) for v in best)
    return lo, hi


def _components(succ) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan)."""
    n = len(succ)
    index, low, on, stack, comps = {}, {}, set(), [], []
    counter = 0
    for root in range(n):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on.add(v)
            if i < len(succ[v]):
                work.append((v, i + 1))
                w = succ[v][i]
                if w not in index:
                    work.append((w, 0))
                elif w in on:
                    low[v] = min(low[v], index[w])
                continue
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def _cw_bounds(succ, v) -> tuple[Fraction, Fraction]:
    # Collatz-Wielandt: min and max of (Mv)_i / v_i bracket the Perron root
    ratios = [sum((v[j] for j in succ[i]), Fraction(0)) / v[i] for i in range(len(v))]
    return min(ratios), max(ratios)


def _perron_component(succ, tol: Fraction) -> tuple[Fraction, Fraction]:
    n = len(succ)
    A = np.zeros((n, n))
    for i, row in enumerate(succ):
        A[i, row] = 1.0
    w, V = np.linalg.eig(A)
    k = int(np.argmax(w.real))
    vec = np.abs(V[:, k].real)
    if vec.min() <= 0:
        vec = vec + 1e-300
    v = [Fraction(float(c)) for c in vec]
    lo, hi = _cw_bounds(succ, v)
    if hi - lo <= tol:
        return lo, hi
    # inverse iteration at high precision from the float estimate
    with mpmath.workprec(256):
        mu = mpmath.mpf(float(w.real[k])) * (1 + mpmath.mpf(2) ** -40)
        M = mpmath.matrix(n, n)
        for i, row in enumerate(succ):
            for j in row:
                M[i, j] = 1
        x = mpmath.matrix([mpmath.mpf(float(c)) for c in vec])
        for _ in range(8):
            x = mpmath.lu_solve(M - mu * mpmath.eye(n), x)
            x = x / mpmath.norm(x, mpmath.inf)
            v = [_mpf_fraction(abs(c)) for c in x]
            if min(v) <= 0:
                continue
            lo, hi = _cw_bounds(succ, v)
            if hi - lo <= tol:
                break
    return lo, hi


def _power_radius(matrix, tol: Fraction):
    """Perron root bounds for large matrices, one irreducible component at a time."""
    succ = [[j for j, v in enumerate(r) if v] for r in matrix]
    best = (Fraction(0), Fraction(0))
    for comp in _components(succ):
        if len(comp) == 1 and comp[0] not in succ[comp[0]]:
            continue
        pos = {v: i for i, v in enumerate(comp)}
        sub = [[pos[j] for j in succ[v] if j in pos] for v in comp]
        lo, hi = _perron_component(sub, tol)
        best = (max(best[0], lo), max(best[1], hi))
    return best


def _mpf_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man) * (Fraction(2) ** exp)


def spectral_radius(auto: SurvivorAutomaton, tol=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Certified enclosure of the Perron root λ of the transition matrix."""
    tol = Fraction(tol)
    if auto.states == 0:
        return Fraction(0), Fraction(0)
    if auto.states <= EXACT_STATES:
        return _charpoly_radius(auto.matrix, tol)
    return _power_radius(auto.matrix, tol)


def dimension(theta: BinaryAngle | Fraction, tol=Fraction(1, 10**12)) -> dict:
    """Enclosure of log λ / log 2 for the survivor set of the hole (θ, 1 - θ)."""
    auto = build_automaton(theta)
    lam_lo, lam_hi = spectral_radius(auto, Fraction(tol) / 4)
    # λ >= 1 whenever the survivor set is infinite; clamp the lower end there
    lo_f, hi_f = max(lam_lo, Fraction(1)), max(lam_hi, Fraction(1))
    old_prec = iv.prec
    iv.prec = 128
    try:
        x = iv.mpf(lo_f.numerator) / lo_f.denominator
        y = iv.mpf(hi_f.numerator) / hi_f.denominator
        d = iv.log(iv.mpf([x.a, y.b])) / iv.log(2)
        d_lo, d_hi = mpmath.mpf(d.a), mpmath.mpf(d.b)
    finally:
        iv.prec = old_prec
    return {
        "theta": f"{auto.theta.numerator}/{auto.theta.denominator}",
        "states": auto.states,
        "lambda_lo": lam_lo,
        "lambda_hi": lam_hi,
        "dimension_lo": max(d_lo, mpmath.mpf(0)),
        "dimension_hi": d_hi,
    }


# -- cylinder counting ---------------------------------------------------------

def _symbolic_states(theta: Fraction):
    """States for exact counting: open survivor cells and surviving partition points.

    Transitions are labelled by the binary digit read.  A point at 1/2 has
    both expansions (.0111... and .1000...), so it carries both labels.
    """
    auto = build_automaton(theta)
    t = auto.theta
    cells = list(auto.cells)
    ends = sorted({e for c in cells for e in c})
    points = [p for p in ends if not (t < p < 1 - t)]
    states = [("cell", c) for c in cells] + [("point", p) for p in points]
    index = {st: i for i, st in enumerate(states)}
    trans: list[dict[int, frozenset]] = []
    for kind, obj in states:
        out: dict[int, set] = {}
        if kind == "cell":
            a, b = obj
            d = 0 if b <= HALF else 1
            lo, hi = _image(obj)
            nxt = {index[("cell", c)] for c in cells if lo <= c[0] and c[1] <= hi}
            nxt |= {index[("point", p)] for p in points if lo < p < hi}
            out[d] = nxt
        else:
            p = obj
            for d in (0, 1):
                if (d == 0 and p <= HALF) or (d == 1 and p >= HALF):
                    q = 2 * p - d
                    if ("point", q) in index:
                        out.setdefault(d, set()).add(index[("point", q)])
                    elif q == 1 and p == HALF and d == 0:
                        out.setdefault(d, set())
        trans.append({d: frozenset(v) for d, v in out.items()})
    return states, trans


def _count_automaton(theta: Fraction, n: int) -> int:
    """Cylinders of depth n meeting {x : D^k x ∉ hole, 0 <= k < n}.

    Subset propagation: the frontier holds the possible positions of D^k x
    for survivors x in the cylinder read so far; words reaching identical
    frontiers are merged with multiplicities.
    """
    states, trans = _symbolic_states(theta)
    frontier: dict[frozenset, int] = {frozenset(range(len(states))): 1}
    for k in range(n):
        nxt: dict[frozenset, int] = {}
        last = k == n - 1
        for cur, mult in frontier.items():
            for d in (0, 1):
                readable = [i for i in cur if d in trans[i]]
                if not readable:
                    continue
                key = frozenset() if last else frozenset().union(*(trans[i][d] for i in readable))
                if last or key:
                    nxt[key] = nxt.get(key, 0) + mult
        frontier = nxt
    return sum(frontier.values())


def _count_naive(theta: Fraction, n: int) -> int:
    """Depth-first search over words with exact interval subtraction."""
    t = theta
    count = 0
    # frame: (depth k, numerator N of the word, survivor pieces inside the closed cylinder)
    stack = [(0, 0, [(Fraction(0), Fraction(1))])]
    while stack:
        k, N, pieces = stack.pop()
        if k == n:
            count += 1
            continue
        # drop x with D^k x in the hole ((N + t)/2^k, (N + 1 - t)/2^k)
        scale = Fraction(1, 1 << k)
        h_lo, h_hi = (N + t) * scale, (N + 1 - t) * scale
        kept = []
        for a, b in pieces:
            if h_lo < h_hi:
                if a <= h_lo:
                    kept.append((a, min(b, h_lo)))
                if b >= h_hi:
                    kept.append((max(a, h_hi), b))
            else:
                kept.append((a, b))
        mid = (2 * N + 1) * Fraction(1, 1 << (k + 1))
        for d in (1, 0):
            lo = mid if d else N * scale
            hi = (N + 1) * scale if d else mid
            sub = [(max(a, lo), min(b, hi)) for a, b in kept if max(a, lo) <= min(b, hi)]
            if sub:
                stack.append((k + 1, 2 * N + d, sub))
    return count


def cylinder_count(theta: BinaryAngle | Fraction, n: int, mode: str = "automaton",
                   cap: int | None = None) -> int:
    """Number of depth-n binary cylinders (closed) containing a survivor of n steps."""
    t = theta.value if isinstance(theta, BinaryAngle) else Fraction(theta)
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "automaton":
        limit = AUTOMATON_CAP if cap is None else cap
        if n > limit:
            raise CapExceeded(f"n = {n} exceeds the automaton cap {limit}")
        return _count_automaton(t, n)
    if mode == "naive":
        limit = NAIVE_CAP if cap is None else cap
        if n > limit:
            raise CapExceeded(f"n = {n} exceeds the naive cap {limit}")
        return _count_naive(t, n)
    raise ValueError(f"unknown mode {mode!r}")


def matrix_dump(auto: SurvivorAutomaton) -> str:
    """Plain-text adjacency list with exact cell endpoints."""
    lines = [f"# theta {auto.theta} states {auto.states}"]
    for i, (a, b) in enumerate(auto.cells):
        succ = " ".join(str(j) for j in auto.successors(i))
        lines.append(f"{i} [{a}, {b}] -> {succ}")
    return "\n".join(lines) + "\n"


def dimension_record(result: dict) -> dict:
    """JSON-ready form of a :func:`dimension` result with outward rounding."""
    return {
        "theta": result["theta"],
        "states": result["states"],
        "lambda_lo": down(result["lambda_lo"]),
        "lambda_hi": up(result["lambda_hi"]),
        "dimension_lo": down(result["dimension_lo"]),
        "dimension_hi": up(result["dimension_hi"]),
    }
