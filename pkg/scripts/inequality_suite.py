"""Randomised inequality checks and their sensitivity to the trial count.

    python scripts/inequality_suite.py --trials 1000 2000 4000
"""

import argparse
from pathlib import Path

from fracext import report
from fracext.lab import inequality_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--trials", type=int, nargs="+", default=[1000, 2000])
    ap.add_argument("--out", default="results/inequalities")
    args = ap.parse_args()
    ok = True
    for n in args.trials:
        reports = inequality_suite(args.seed, n)
        report.write_inequality_csv(Path(args.out) / f"trials{n}.csv", reports)
        for r in reports:
            print(f"{'FAIL' if r.violated else 'PASS'} {r.name:<10} trials={n:<6} max_ratio={r.max_ratio:.4f}")
            ok &= not r.violated
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
