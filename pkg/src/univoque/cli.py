"""Command-line interface: ``univoque <command> [options]``.

Reals are passed as decimal strings and read exactly; the names ``phi``,
``q_G``, ``q_KL``, ``x_G`` and ``x_KL`` stand for the constants of the chosen
alphabet. Exit status is 0 on success, 2 on a usage error and 1 when a
computation fails (one line on stderr).
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bases import critical_constants, golden_ratio_base, invert_base
from .dimension import DEFAULT_N, DEFAULT_n, dim_Uq, dim_Ux, staircase_samples
from .expansions import alpha, greedy_expand, quasi_greedy_expand
from .isolated import isolate, iso_intervals
from .precision import PrecisionExhausted, PrecisionReal
from .slices import classify, dense_family, enumerate_Ux, golden_tail_family
from .verify import SUITES, run_suite
from .words import parse_sequence

SCHEMA_VERSION = "1"


class UsageError(Exception):
    pass


def _real(text: str, args) -> PrecisionReal:
    name = text.strip()
    consts = {"phi": "q_G", "golden": "q_G", "q_g": "q_G", "q_kl": "q_KL",
              "x_g": "x_G", "x_kl": "x_KL"}
    key = consts.get(name.lower())
    if key is not None:
        c = critical_constants(args.M, args.tol, args.precision_bits)
        return getattr(c, key)
    try:
        return PrecisionReal.from_decimal(name, args.precision_bits)
    except (ValueError, ArithmeticError):
        raise UsageError(f"cannot read {text!r} as a decimal number") from None


def _linspace(lo: str, hi: str, steps: int) -> list[Fraction]:
    a, b = Fraction(lo), Fraction(hi)
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if steps == 1:
        return [a]
    return [a + (b - a) * i / (steps - 1) for i in range(steps)]


def _decimal(f: Fraction) -> str:
    return format(float(f), ".12g") if f.denominator != 1 else str(f.numerator)


def _write_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _fmt(args, default: str) -> str:
    return args.format or default


# -- commands --------------------------------------------------------------

def cmd_constants(args) -> str:
    c = critical_constants(args.M, args.tol, args.precision_bits)
    d = c.as_dict(args.digits)
    fmt = _fmt(args, "text")
    if fmt == "json":
        return _json({"schema_version": SCHEMA_VERSION, **d})
    names = ("q_G", "q_KL", "x_G", "x_KL")
    if fmt == "csv":
        rows = []
        for k in names:
            mid, rad = d[k].split(" +/- ")
            rows.append((k, mid, rad))
        return _write_csv(("name", "value", "radius"), rows)
    lines = [f"M = {c.M}"] + [f"{k} = {d[k]}" for k in names]
    lines.append(f"q_KL source: {c.source}")
    return "\n".join(lines) + "\n"


def cmd_expand(args) -> str:
    x, q = _real(args.x, args), _real(args.q, args)
    f = greedy_expand if args.kind == "greedy" else quasi_greedy_expand
    r = f(x, q, args.n, args.M, args.precision_bits)
    if _fmt(args, "text") == "json":
        return _json({"schema_version": SCHEMA_VERSION, "digits": str(r.digits),
                      "kind": args.kind, "terminated": r.terminated})
    return f"{r.digits}\n"


def cmd_alpha(args) -> str:
    r = alpha(_real(args.q, args), args.n, args.M, args.precision_bits)
    if _fmt(args, "text") == "json":
        return _json({"schema_version": SCHEMA_VERSION, "alpha": str(r.digits)})
    return f"{r.digits}\n"


def cmd_invert(args) -> str:
    try:
        d = parse_sequence(args.seq, args.M)
    except ValueError as e:
        raise UsageError(str(e)) from None
    q = invert_base(d, _real(args.x, args), args.tol, args.precision_bits)
    if _fmt(args, "text") == "json":
        return _json({"schema_version": SCHEMA_VERSION, "sequence": str(d),
                      "x": args.x, "q": q.to_string(args.digits)})
    return f"{q.to_string(args.digits)}\n"


def _dimension(args, f, value: str) -> str:
    est = f(_real(value, args), args.N, args.n, args.M, precision_bits=args.precision_bits,
            method=args.method)
    fmt = _fmt(args, "csv")
    if fmt == "json":
        return _json({"schema_version": SCHEMA_VERSION, "abscissa": value,
                      "lower": est.lower, "upper": est.upper, "N": est.N, "n": est.n})
    return _write_csv(("abscissa", "lower", "upper"), [(value, est.lower, est.upper)])


def cmd_dim_uq(args) -> str:
    return _dimension(args, dim_Uq, args.q)


def cmd_dim_ux(args) -> str:
    return _dimension(args, dim_Ux, args.x)


def cmd_staircase(args) -> str:
    grid = _linspace(args.start, args.stop, args.steps)
    kind = args.kind
    if kind == "psi" and not all(1 < t <= args.M + 1 for t in grid):
        raise UsageError(f"psi needs bases in (1, {args.M + 1}]")
    if kind == "phi" and not all(t > 0 for t in grid):
        raise UsageError("phi needs x > 0")
    rows = staircase_samples(kind, args.M, grid, args.N, args.n, args.jobs, args.method)
    fmt = _fmt(args, "csv")
    if fmt == "json":
        return _json({"schema_version": SCHEMA_VERSION, "kind": kind,
                      "rows": [{"abscissa": a, "lower": lo, "upper": hi} for a, lo, hi in rows]})
    return _write_csv(("abscissa", "lower", "upper"),
                      [(_decimal(t), lo, hi) for t, (_, lo, hi) in zip(grid, rows)])


def cmd_classify(args) -> str:
    r = classify(_real(args.x, args), args.M, args.precision_bits)
    if _fmt(args, "text") == "json":
        return _json({"schema_version": SCHEMA_VERSION, "x": args.x, "regime": r.regime.value,
                      "witnesses": [w.as_dict(args.digits) for w in r.witnesses]})
    return f"{r.regime.value}\n"


def cmd_members(args) -> str:
    x = args.x
    if args.family == "golden":
        ws = golden_tail_family(_real(x, args), args.M, args.k, args.tol, args.precision_bits)
    else:
        ws = dense_family(x, args.M, args.j, args.k, args.seed, args.tol, args.precision_bits)
    return _json({"schema_version": SCHEMA_VERSION, "family": args.family, "x": x,
                  "witnesses": [w.as_dict(args.digits) for w in ws]})


def cmd_scan_ux(args) -> str:
    q_range = None
    if args.q_from is not None or args.q_to is not None:
        q_range = (Fraction(args.q_from or 1), Fraction(args.q_to or args.M + 1))
    rows = enumerate_Ux(args.x, args.M, args.steps, args.depth, q_range, args.jobs,
                        args.precision_bits)
    return _write_csv(("q_lo", "q_hi", "verdict"),
                      [(format(float(r.lo), ".12g"), format(float(r.hi), ".12g"), r.verdict.value)
                       for r in rows])


def cmd_isolated(args) -> str:
    cert = isolate(_real(args.x, args), args.n_max, args.k_max, args.tol, args.M,
                   args.precision_bits)
    if cert is None:
        return _json({"schema_version": SCHEMA_VERSION, "x": args.x, "status": "NOT_FOUND"})
    return _json({**cert.as_dict(args.digits), "status": "FOUND",
                  "verified": cert.verify()})


def cmd_iso_cover(args) -> str:
    if args.M != 1:
        raise ValueError("the isolated-point cover is available for M = 1 only")
    rows = iso_intervals(args.n_max, args.k_max, args.tol, True, args.jobs, args.precision_bits)
    return _write_csv(("lo", "hi", "n", "k", "family"),
                      [(r.lo.to_string(args.digits).split(" ")[0],
                        r.hi.to_string(args.digits).split(" ")[0], r.n, r.k, r.family)
                       for r in rows])


def cmd_verify_paper(args) -> str:
    out = []
    for r in run_suite(args.suite, fail_fast=True):
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.identifier} ({r.seconds:.2f}s)"
        if not r.passed:
            line += f": {r.detail}"
            if args.out is None:
                sys.stdout.write("\n".join(out + [line]) + "\n")
            raise RuntimeError(f"invariant {r.identifier} violated: {r.detail}")
        out.append(line)
        if args.out is None:
            sys.stdout.write(line + "\n")
            sys.stdout.flush()
    return "" if args.out is None else "\n".join(out) + "\n"


# -- parser ----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--M", type=int, default=1, help="largest digit (default 1)")
    g.add_argument("--precision-bits", type=int, default=128, dest="precision_bits")
    g.add_argument("--tol", default="1e-12", help="root bracket width (decimal)")
    g.add_argument("--out", default=None, help="write output to this file")
    g.add_argument("--format", choices=("text", "csv", "json"), default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=None, help="worker processes (default: all)")
    g.add_argument("--digits", type=int, default=20, help="significant digits printed")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="univoque",
                                     description="Unique expansions in non-integer bases.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    add("constants", cmd_constants, "q_G, q_KL, x_G and x_KL")

    p = add("expand", cmd_expand, "greedy or quasi-greedy digits of x in base q")
    p.add_argument("--x", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--kind", choices=("greedy", "quasi"), default="greedy")

    p = add("alpha", cmd_alpha, "quasi-greedy expansion of 1")
    p.add_argument("--q", required=True)
    p.add_argument("--n", type=int, default=32)

    p = add("invert", cmd_invert, "solve pi_q(seq) = x for q")
    p.add_argument("--seq", required=True, help="sequence as pre(period)")
    p.add_argument("--x", default="1")

    for name, fn, arg in (("dim-uq", cmd_dim_uq, "--q"), ("dim-ux", cmd_dim_ux, "--x")):
        p = add(name, fn, f"dimension bracket at one {'base' if arg == '--q' else 'x'}")
        p.add_argument(arg, required=True)
        p.add_argument("--N", type=int, default=DEFAULT_N)
        p.add_argument("--n", type=int, default=DEFAULT_n)
        p.add_argument("--method", choices=("spectral", "difference"), default="spectral")

    p = add("staircase", cmd_staircase, "dimension brackets on a grid")
    p.add_argument("--kind", choices=("psi", "phi"), default="psi")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="stop", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--N", type=int, default=DEFAULT_N)
    p.add_argument("--n", type=int, default=DEFAULT_n)
    p.add_argument("--method", choices=("spectral", "difference"), default="spectral")

    p = add("classify", cmd_classify, "regime of U(x)")
    p.add_argument("--x", required=True)

    p = add("members", cmd_members, "verified members of U(x)")
    p.add_argument("--x", required=True)
    p.add_argument("--family", choices=("golden", "dense"), required=True)
    p.add_argument("--k", type=int, default=8, help="k_max (golden) or sample size (dense)")
    p.add_argument("--j", type=int, default=2, help="index j of the dense construction")

    p = add("scan-ux", cmd_scan_ux, "depth-bounded scan of U(x)")
    p.add_argument("--x", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--q-from", dest="q_from", default=None)
    p.add_argument("--q-to", dest="q_to", default=None)

    p = add("isolated", cmd_isolated, "certificate for an isolated base of U(x), M = 1")
    p.add_argument("--x", required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=6)
    p.add_argument("--k-max", dest="k_max", type=int, default=8)

    p = add("iso-cover", cmd_iso_cover, "intervals of x with isolated bases, M = 1")
    p.add_argument("--n-max", dest="n_max", type=int, default=4)
    p.add_argument("--k-max", dest="k_max", type=int, default=6)

    p = add("verify-paper", cmd_verify_paper, "run the property suites")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    return parser


def _check_config(args) -> None:
    if args.M < 1:
        raise UsageError("--M must be at least 1")
    if args.precision_bits < 64:
        raise UsageError("--precision-bits must be at least 64")
    try:
        tol = Fraction(args.tol)
    except ValueError:
        raise UsageError(f"--tol {args.tol!r} is not a decimal number") from None
    if tol <= 0:
        raise UsageError("--tol must be positive")
    args.tol = tol
    if args.jobs is not None and args.jobs < 1:
        raise UsageError("--jobs must be at least 1")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _check_config(args)
        text = args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"univoque: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, PrecisionExhausted, RuntimeError, KeyError) as e:
        msg = str(e).splitlines()[0] if str(e) else type(e).__name__
        print(f"univoque: error: {msg}", file=sys.stderr)
        return 1
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
