"""Check the sharp-exponent identities on a rational grid for every canonical signature."""

import argparse
import json
import time

from decoupling import exponents as ex


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="2,3,4,5", help="comma-separated dimensions")
    ap.add_argument("--bound", type=int, default=12, help="denominator bound for 1/p and 1/q")
    ap.add_argument("--json", action="store_true", help="print full reports as JSON")
    args = ap.parse_args(argv)
    dims = [int(x) for x in args.dims.split(",")]
    t0 = time.perf_counter()
    reports = ex.verify_all(dims, args.bound)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        print(f"{'d':>2} {'signs':<8} {'dv':>2} {'points':>7} {'boundary':>8} {'violations':>10}")
        for r in reports:
            print(f"{r.spec.d:>2} {r.spec.signs:<8} {r.spec.dv:>2} {r.n_points:>7} "
                  f"{r.n_boundary:>8} {len(r.violations):>10}")
        print(f"total points {sum(r.n_points for r in reports)}, "
              f"{time.perf_counter() - t0:.1f} s")
    return 0 if all(r.ok for r in reports) else 1


if __name__ == "__main__":
    raise SystemExit(main())
