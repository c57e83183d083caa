"""Tabulate Weyl-sum moments over an M ladder and fit the growth exponent per p."""

import argparse
import csv
import math
import sys
from fractions import Fraction

from decoupling import weyl
from decoupling.fitting import ScalingSeries, fit_exponent, log_growth_fit


def predicted(p) -> float:
    # ||f||_p ~ M^{1/2} for p <= 6 and M^{1 - 3/p} above
    return 0.5 if p <= 6 else 1 - 3 / float(p)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", default="8,16,32,64,128", help="comma-separated ladder")
    ap.add_argument("-p", default="2,3,4,6,8,10,inf", help="comma-separated exponents")
    ap.add_argument("--csv", help="write raw samples to this CSV file")
    args = ap.parse_args(argv)
    Ms = [int(x) for x in args.M.split(",")]
    ps = [weyl.as_exponent(x) for x in args.p.split(",")]
    samples = []
    print(f"{'p':>6} {'slope':>8} {'predicted':>9} {'resid':>8}")
    for p in ps:
        row = [weyl.moment_2d(M, p) for M in Ms]
        samples.extend(row)
        fit = fit_exponent(ScalingSeries(Ms, [s.value for s in row]))
        pred = 1.0 if p == math.inf else predicted(p)
        label = "inf" if p == math.inf else str(Fraction(p))
        print(f"{label:>6} {fit.slope:8.4f} {pred:9.4f} {fit.max_residual:8.2e}")
    table = weyl.sixth_moment_log_check(Ms)
    a, b = log_growth_fit([m for m, _ in table], [v for _, v in table])
    print("sixth moment / M^3:", ", ".join(f"{m}:{v:.3f}" for m, v in table), f"(log slope {b:.3f})")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(weyl.moments_to_csv_text(samples))
        print(f"wrote {len(samples)} rows to {args.csv}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
