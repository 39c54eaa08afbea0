"""Command line front end: certify, verify, bench, filter.

Exit codes: 0 success, 1 input or spec error, 2 not positive (certify) or
rejected (verify), 3 precision exhausted, 4 projection broke PSD after
retries, 5 infeasible, 6 solver failure, 7 an emitted certificate failed its
own exact check (nothing is written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import certify as C
from . import fir
from .bench import default_grid, run_bench, write_csv
from .errors import (
    Infeasible,
    IterationCap,
    NotPositive,
    ParseError,
    PrecisionExhausted,
    ProjectionBrokePsd,
    SolverStalled,
    SpecError,
)
from .trigpoly import load_trigpoly

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_POSITIVE = 2
EXIT_REJECTED = 2
EXIT_PRECISION = 3
EXIT_PROJECTION = 4
EXIT_INFEASIBLE = 5
EXIT_SOLVER = 6
EXIT_SELF_CHECK = 7

ALG_NAMES = {"roots": "csos1", "sdp": "csos2", "project": "csos3"}

log = logging.getLogger("trigsos")


def _read_poly(path: str):
    text = Path(path).read_text()
    return load_trigpoly(text)


def _err(msg: str) -> None:
    print(f"trigsos: {msg}", file=sys.stderr)


def write_verified(f, cert, out: Optional[str]) -> int:
    """Serialize cert only if verify() accepts it; the single writer path."""
    verdict = C.verify(f, cert)
    if not verdict:
        _err(f"internal error: certificate failed verification ({verdict.reason}); nothing written")
        return EXIT_SELF_CHECK
    text = json.dumps(C.certificate_to_json(cert), indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        f = _read_poly(args.input)
    except ParseError as exc:
        _err(f"{args.input}:{exc}")
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        _err(f"{args.input}: {exc}")
        return EXIT_INPUT
    name = ALG_NAMES[args.alg]
    diag = C.Diagnostics()
    try:
        if name == "csos1":
            cert = C.csos1(f, delta=args.delta or 1, root_bits=args.root_bits,
                           max_bits=args.max_bits, seed=args.seed, diag=diag)
        else:
            start = C.PrecisionState(args.delta or 1, Fraction(args.radius or 1), args.delta_c or 1, args.delta_hat or 1)
            cert = C.ALGORITHMS[name](f, start=start, max_bits=args.max_bits, diag=diag)
    except NotPositive as exc:
        _err(f"not positive: {exc}")
        return EXIT_NOT_POSITIVE
    except (PrecisionExhausted, IterationCap) as exc:
        _err(f"precision exhausted: {exc}")
        return EXIT_PRECISION
    except Infeasible as exc:
        _err(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except SolverStalled as exc:
        _err(f"solver failure: {exc}")
        return EXIT_SOLVER
    log.info("%s: t_epsilon=%.3f t_u=%.3f t_total=%.3f", name, diag.t_epsilon, diag.t_u, diag.t_total)
    return write_verified(f, cert, args.out)


def cmd_verify(args) -> int:
    try:
        f = _read_poly(args.poly)
        cert = C.certificate_from_json(json.loads(Path(args.cert).read_text()))
    except ParseError as exc:
        _err(f"{args.poly}:{exc}")
        return EXIT_INPUT
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _err(f"cannot read input: {exc}")
        return EXIT_INPUT
    verdict = C.verify(f, cert)
    print(verdict)
    return EXIT_OK if verdict else EXIT_REJECTED


def cmd_bench(args) -> int:
    if args.family != "gauss":
        _err(f"unknown family {args.family!r}")
        return EXIT_INPUT
    try:
        ds = [int(x) for x in args.grid.split(",")] if args.grid else default_grid(args.dmax)
        algs = [a.strip() for a in args.algs.split(",") if a.strip()]
        progress = sys.stderr if args.verbose else None
        records = run_bench(ds, algs, seed=args.seed, max_bits=args.max_bits, progress=progress)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    return EXIT_OK


def cmd_filter(args) -> int:
    try:
        spec = fir.FilterSpec(args.d, Fraction(args.wp), Fraction(args.ws), Fraction(args.gp),
                              Fraction(args.gs), args.bits)
    except (SpecError, ValueError, ZeroDivisionError) as exc:
        _err(f"invalid filter spec: {exc}")
        return EXIT_INPUT
    try:
        cert, data = fir.design_filter(spec, max_retries=args.retries)
    except ProjectionBrokePsd as exc:
        _err(str(exc))
        return EXIT_PROJECTION
    except Infeasible as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    except SolverStalled as exc:
        _err(str(exc))
        return EXIT_SOLVER
    checks = fir.check_filter_certificate(data, cert)
    if not all(ok for _, ok in checks):
        _err("filter certificate failed its exact checks; nothing written")
        sys.stderr.write(fir.filter_report(cert, checks))
        return EXIT_SELF_CHECK
    report = fir.filter_report(cert, checks)
    text = json.dumps(fir.filter_certificate_to_json(cert), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        Path(args.out).with_suffix(".txt").write_text(report)
    sys.stdout.write(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trigsos", description="Exact SOHS certificates for trigonometric polynomials.")
    p.add_argument("--seed", type=int, default=0, help="seed for root-finder starting points")
    p.add_argument("--max-bits", type=int, default=C.DEFAULT_MAX_BITS, help="cap on any precision parameter")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify positivity of a polynomial file")
    c.add_argument("input", help="polynomial as text (e.g. '5 + (1+i)*z^-1 + (1-i)*z') or JSON")
    c.add_argument("--alg", choices=sorted(ALG_NAMES), default="roots")
    c.add_argument("--out", help="certificate JSON path (default: stdout)")
    c.add_argument("--delta", type=int, help="starting precision delta")
    c.add_argument("--root-bits", type=int, help="fractional bits kept per root (roots only; default delta)")
    c.add_argument("--delta-c", type=int, help="starting Cholesky precision (sdp only)")
    c.add_argument("--delta-hat", type=int, help="starting rounding precision (project only)")
    c.add_argument("--radius", help="starting Frobenius radius R (rational)")
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="exactly check a certificate against a polynomial")
    v.add_argument("poly")
    v.add_argument("cert")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time all algorithms on the benchmark family")
    b.add_argument("--family", default="gauss")
    b.add_argument("--dmax", type=int, default=50)
    b.add_argument("--grid", help="comma-separated degrees (overrides the default grid)")
    b.add_argument("--algs", default="csos1,csos2,csos3")
    b.add_argument("--csv", help="output path (default: stdout)")
    b.set_defaults(func=cmd_bench)

    fl = sub.add_parser("filter", help="design a certified linear-phase FIR filter")
    fl.add_argument("--d", type=int, required=True, help="filter order")
    fl.add_argument("--wp", required=True, help="passband edge as a multiple of pi, e.g. 1/5")
    fl.add_argument("--ws", required=True, help="stopband edge as a multiple of pi, e.g. 1/4")
    fl.add_argument("--gp", required=True, help="passband ripple bound")
    fl.add_argument("--gs", required=True, help="stopband ripple bound")
    fl.add_argument("--bits", type=int, default=128, help="precision of the rationalized trigonometric data")
    fl.add_argument("--retries", type=int, default=4)
    fl.add_argument("--out", help="certificate JSON path; the report goes next to it as .txt")
    fl.set_defaults(func=cmd_filter)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
