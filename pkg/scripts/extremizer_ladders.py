"""Fit ratio slopes for each extremizer family against the predicted lower bounds."""

import argparse
import time

from decoupling import exponents as ex
from decoupling import harness
from decoupling.fitting import ScalingSeries, fit_exponent

# (kind, d, signs, p, q, ladder)
QUICK = [
    ("constant", 2, "+", "inf", "inf", (8, 16, 32, 64)),
    ("expsum", 2, "+", "4", "2", (8, 16, 32, 64)),
    ("expsum", 2, "+", "10", "2", (8, 16, 32, 64)),
    ("expsum", 3, "++", "4", "4", (4, 8, 16)),
    ("hyperplane", 3, "+-", "4", "4", (8, 16, 32, 64)),
    ("hyperplane", 3, "+-", "6", "2", (8, 16, 32, 64)),
]
SLOW = [
    ("constant", 2, "+", "2", "2", (8, 16, 32, 64)),
    ("constant", 2, "+", "6", "2", (8, 16, 32, 64)),
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slow", action="store_true", help="include finite-p constant runs (about two minutes)")
    args = ap.parse_args(argv)
    cases = QUICK + (SLOW if args.slow else [])
    print(f"{'kind':<10} {'d':>1} {'signs':<5} {'p':>4} {'q':>4} {'slope':>8} {'lower':>6} "
          f"{'sharp':>6} {'secs':>6}")
    for kind, d, signs, p, q, Ms in cases:
        spec = ex.ParaboloidSpec.from_signs(d, signs)
        t0 = time.perf_counter()
        samples = harness.ratio_ladder(kind, spec, p, q, Ms)
        fit = fit_exponent(ScalingSeries([s.N for s in samples], [s.ratio for s in samples]))
        lower = harness.predicted_lower_bound(kind, spec, p, q)
        sharp = harness.predicted_sharp(spec, p, q)
        print(f"{kind:<10} {d:>1} {signs:<5} {p:>4} {q:>4} {fit.slope:8.4f} {float(lower):6.3f} "
              f"{float(sharp):6.3f} {time.perf_counter() - t0:6.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
