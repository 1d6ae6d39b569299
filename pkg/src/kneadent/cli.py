"""Command-line interface: ``kneadent <command> ...``.

Exit codes: 0 ok, 2 usage or parse error, 3 certification failure,
4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from ._fmt import down, up
from ._roots import CertificationError
from .angles import AngleError, from_fraction, parse_angle
from .holder import PlateauError, feigenbaum_ladder, ladder_checks, local_exponent
from .kneading import entropy, extended_entropy
from .opendyn import CapExceeded, build_automaton, dimension, dimension_record, matrix_dump
from .realset import SearchExhausted, is_real_angle, period_doubling, small_copy_tip

EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_CAP = 0, 2, 3, 4
MAX_GRID_DEPTH = 40


class UsageError(Exception):
    pass


def _emit(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, indent=2) + "\n")


def _tol(text) -> Fraction:
    t = Fraction(str(text))
    if t <= 0:
        raise UsageError("tol must be positive")
    return t


def cmd_entropy(args) -> int:
    theta = parse_angle(args.angle)
    tol = _tol(args.tol)
    res = extended_entropy(theta, tol) if args.extended else entropy(theta, tol)
    rec = res.to_record()
    if args.json:
        _emit(rec)
    else:
        print(f"angle {rec['angle']}  h in [{rec['entropy_lo']!r}, {rec['entropy_hi']!r}]  "
              f"certificate {rec['certificate']}")
    return EXIT_OK


# -- scan ---------------------------------------------------------------------

def _grid(lo: Fraction, hi: Fraction, depth: int) -> list[Fraction]:
    scale = 1 << depth
    k0 = (lo * scale).__ceil__()
    k1 = (hi * scale).__floor__()
    return [Fraction(k, scale) for k in range(k0, k1 + 1)]


def _scan_row(job):
    x, mode, tol = job
    row = {"theta_num": x.numerator, "theta_den": x.denominator}
    try:
        theta = from_fraction(x.numerator, x.denominator)
        if mode in ("entropy", "both"):
            r = extended_entropy(theta, tol)
            row["h_lo"], row["h_hi"] = down(r.entropy_lo), up(r.entropy_hi)
        if mode in ("dimension", "both"):
            if x == 0:
                row["dim_lo"], row["dim_hi"] = 0.0, 0.0
            else:
                d = dimension_record(dimension(theta, tol))
                row["dim_lo"], row["dim_hi"] = d["dimension_lo"], d["dimension_hi"]
    except (CertificationError, AngleError, CapExceeded) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _scan_config(args) -> dict:
    lo, hi = parse_angle(args.range_from).value, parse_angle(args.range_to).value
    if args.angles:
        xs = sorted({parse_angle(a).value for a in args.angles.split(",")})
    else:
        if not 0 <= lo < hi <= Fraction(1, 2):
            raise UsageError("range must satisfy 0 <= from < to <= 1/2")
        if not 0 <= args.depth <= MAX_GRID_DEPTH:
            raise UsageError(f"grid depth must lie in [0, {MAX_GRID_DEPTH}]")
        xs = _grid(lo, hi, args.depth)
    if any(x > Fraction(1, 2) for x in xs):
        raise UsageError("angles must lie in [0, 1/2]")
    if args.workers < 1:
        raise UsageError("workers must be positive")
    return {"angles": xs, "tol": _tol(args.tol), "mode": args.mode}


def cmd_scan(args) -> int:
    cfg = _scan_config(args)
    jobs = [(x, cfg["mode"], cfg["tol"]) for x in cfg["angles"]]
    if args.workers == 1:
        rows = list(map(_scan_row, jobs))
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_scan_row, jobs, chunksize=16))
    cols = ["theta_num", "theta_den"]
    if cfg["mode"] in ("entropy", "both"):
        cols += ["h_lo", "h_hi"]
    if cfg["mode"] in ("dimension", "both"):
        cols += ["dim_lo", "dim_hi"]
    out = sys.stdout
    failed = 0
    for row in rows:
        if "error" in row:
            failed += 1
            print(f"row {row['theta_num']}/{row['theta_den']}: {row['error']}", file=sys.stderr)
    if args.output == "json":
        _emit(rows)
    else:
        out.write(",".join(cols) + "\n")
        for row in rows:
            out.write(",".join(repr(row[c]) if c in row else "" for c in cols) + "\n")
    return EXIT_OK


# -- thin wrappers ------------------------------------------------------------

def cmd_holder(args) -> int:
    theta = parse_angle(args.angle)
    try:
        est = local_exponent(theta, args.jmin, args.jmax, args.samples, args.side)
    except PlateauError as exc:
        _emit({"theta": theta.fraction_string(), "plateau": True, "detail": str(exc)})
        return EXIT_OK
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(est.csv())
    _emit(est.summary())
    return EXIT_OK


def cmd_dimension(args) -> int:
    theta = parse_angle(args.angle)
    rec = dimension_record(dimension(theta, _tol(args.tol)))
    if args.dump:
        sys.stdout.write(matrix_dump(build_automaton(theta)))
    _emit(rec)
    return EXIT_OK


def cmd_feigenbaum(args) -> int:
    ladder = feigenbaum_ladder(args.nmax, _tol(args.tol))
    checks = ladder_checks(ladder)
    _emit({"ladder": [r.record() for r in ladder],
           "checks": {k: checks[k] for k in ("entropy", "gap_bracket", "modulus")}})
    return EXIT_OK


def cmd_member(args) -> int:
    theta = parse_angle(args.angle)
    rec = {"angle": theta.fraction_string(), "binary": theta.binary_string()}
    rec.update(is_real_angle(theta).to_record())
    _emit(rec)
    return EXIT_OK


def _angle_pair(name, fn):
    def run(args) -> int:
        theta = parse_angle(args.angle)
        res = fn(theta)
        _emit({"angle": theta.fraction_string(), name: res.fraction_string(),
               "binary": res.binary_string()})
        return EXIT_OK
    return run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kneadent", description="Certified entropy of real kneading angles.")
    p.add_argument("--config", help="JSON file with default option values (flags win)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("entropy", help="certified entropy of an angle")
    s.add_argument("angle")
    s.add_argument("--tol", default="1e-12")
    s.add_argument("--json", action="store_true")
    s.add_argument("--extended", action="store_true", help="extend by constancy on gaps")
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("scan", help="entropy/dimension over a dyadic grid")
    s.add_argument("--from", dest="range_from", default="0")
    s.add_argument("--to", dest="range_to", default="1/2")
    s.add_argument("--depth", type=int, default=8)
    s.add_argument("--angles", help="comma-separated explicit angle list")
    s.add_argument("--tol", default="1e-12")
    s.add_argument("--mode", choices=["entropy", "dimension", "both"], default="entropy")
    s.add_argument("--output", choices=["csv", "json"], default="csv")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("holder", help="local Hölder exponent estimate")
    s.add_argument("angle")
    s.add_argument("--jmin", type=int, default=8)
    s.add_argument("--jmax", type=int, default=48)
    s.add_argument("--samples", type=int, default=8)
    s.add_argument("--side", choices=["left", "right", "both"], default="both")
    s.add_argument("--csv", help="write per-pair rows to this file")
    s.set_defaults(func=cmd_holder)

    s = sub.add_parser("dimension", help="survivor-set dimension from the open-dynamics automaton")
    s.add_argument("angle")
    s.add_argument("--tol", default="1e-12")
    s.add_argument("--dump", action="store_true", help="print the adjacency list first")
    s.set_defaults(func=cmd_dimension)

    s = sub.add_parser("feigenbaum", help="period-doubling ladder toward the Feigenbaum angle")
    s.add_argument("--nmax", type=int, default=6)
    s.add_argument("--tol", default="1e-12")
    s.set_defaults(func=cmd_feigenbaum)

    s = sub.add_parser("member", help="membership in the set of real angles")
    s.add_argument("angle")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("pd", help="period doubling of a periodic real angle")
    s.add_argument("angle")
    s.set_defaults(func=_angle_pair("pd", period_doubling))

    s = sub.add_parser("tip", help="tip of the small copy rooted at a periodic real angle")
    s.add_argument("angle")
    s.set_defaults(func=_angle_pair("tip", small_copy_tip))
    return p


def _load_config(path: str) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.config:
            cfg = _load_config(args.config)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            known = {a.dest for a in sub._actions}
            sub.set_defaults(**{k: v for k, v in cfg.items() if k in known})
            args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, AngleError, ValueError, OSError) as exc:
        if isinstance(exc, (SearchExhausted, CapExceeded)) or "exceeds the cap" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CAP
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
