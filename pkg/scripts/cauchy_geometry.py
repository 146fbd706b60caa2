"""Successive differences of truncated solutions on geometric cutoffs.

    python scripts/cauchy_geometry.py --y0 1 --n-max 6
"""

import argparse
from pathlib import Path

from fracext import report
from fracext.core import FracParams
from fracext.lab import cauchy_study
from fracext.synthesis import gaussian_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--y0", type=float, nargs="+", default=[1.0, 1e3, 1e5])
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--out", default="results/cauchy")
    args = ap.parse_args()
    p = FracParams.create(args.beta, args.s, 3)
    ok = True
    for Y0 in args.y0:
        study = cauchy_study(p, gaussian_profile(3), Y0, args.n_max)
        report.write_cauchy_csv(Path(args.out) / f"cauchy_Y0_{Y0:g}.csv", study)
        ratios = " ".join("-" if r is None else f"{r:.3f}" for r in study.ratios)
        print(f"{'PASS' if study.passed else 'FAIL'} Y0={Y0:g} max D={max(study.differences):.3g} ratios {ratios}")
        ok &= study.passed
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
