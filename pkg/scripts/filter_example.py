"""Design the certified order-25 lowpass filter (passband pi/5, stopband pi/4) and print the report."""

import argparse
import json
from fractions import Fraction

from trigsos.fir import FilterSpec, check_filter_certificate, design_filter, filter_certificate_to_json, filter_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=25)
    ap.add_argument("--wp", default="1/5")
    ap.add_argument("--ws", default="1/4")
    ap.add_argument("--gp", default="1/10")
    ap.add_argument("--gs", default="158/10000")
    ap.add_argument("--out", help="certificate JSON path")
    args = ap.parse_args()
    spec = FilterSpec(args.d, Fraction(args.wp), Fraction(args.ws), Fraction(args.gp), Fraction(args.gs))
    cert, data = design_filter(spec)
    print(filter_report(cert, check_filter_certificate(data, cert)))
    print(f"numerical solver energy: {cert.meta['numeric_energy']:.9e}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(filter_certificate_to_json(cert), fh, indent=1)


if __name__ == "__main__":
    main()
