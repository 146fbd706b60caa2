"""Truncation-error decay for the three reference cases, with CSV and SVG output.

    python scripts/truncation_rates.py --out results/truncation
"""

import argparse
from pathlib import Path

from fracext import report
from fracext.core import FracParams
from fracext.lab import truncation_study
from fracext.synthesis import gaussian_profile

CASES = [(0.5, 1.0), (0.25, 1.0), (0.75, 1.0), (0.75, 0.0)]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="results/truncation")
    args = ap.parse_args()
    ok = True
    for beta, s in CASES:
        p = FracParams.create(beta, s, 3)
        study = truncation_study(p, gaussian_profile(3))
        stem = f"beta{beta:g}_s{s:g}"
        out = Path(args.out) / stem
        report.write_report(study.records, [study.fit], [], out)
        print(f"{'PASS' if study.passed else 'FAIL'} {stem}: slope {study.fit.slope:.3f}, mu {p.mu.mu:g}")
        ok &= study.passed
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
