"""Time csos1/csos2/csos3 on f_d = 10d + sum ((1-i) z^-k + (1+i) z^k) and write a CSV."""

import argparse
import sys

from trigsos.bench import default_grid, run_bench, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dmax", type=int, default=50)
    ap.add_argument("--algs", default="csos1,csos2,csos3")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="output path (default: stdout)")
    args = ap.parse_args()
    records = run_bench(default_grid(args.dmax), args.algs.split(","), seed=args.seed, progress=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)


if __name__ == "__main__":
    main()
