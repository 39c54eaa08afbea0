"""Certify f = 5 + (1+i) z^-1 + (1-i) z with all three algorithms and print the certificates."""

import argparse

from trigsos import Diagnostics, csos1, csos2, csos3, parse_trigpoly, verify
from trigsos.certify import dumps


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="5 + (1+i)*z^-1 + (1-i)*z")
    ap.add_argument("--root-bits", type=int, default=2, help="fractional bits kept per root in csos1")
    args = ap.parse_args()
    f = parse_trigpoly(args.poly)
    print(f"f = {f}\n")
    runs = [
        ("csos1", lambda d: csos1(f, delta=16, root_bits=args.root_bits, diag=d)),
        ("csos2", lambda d: csos2(f, diag=d)),
        ("csos3", lambda d: csos3(f, diag=d)),
    ]
    for name, run in runs:
        diag = Diagnostics()
        cert = run(diag)
        print(f"== {name}: {verify(f, cert)} in {diag.t_total:.3f}s")
        print(dumps(cert))
        print()


if __name__ == "__main__":
    main()
