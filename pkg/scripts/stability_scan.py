"""Solution norm against min(1, 1/s) ||f|| over beta, s and Y.

The ratio grows like s^(1/2) once s > 1; the scan prints the per-s maximum
so the trend is visible next to the certified constant.

    python scripts/stability_scan.py --ss 0.01 0.1 1 10 100
"""

import argparse
from pathlib import Path

from fracext import report
from fracext.lab import stability_scan
from fracext.synthesis import gaussian_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.25, 0.5, 0.75])
    ap.add_argument("--ss", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    ap.add_argument("--ys", type=float, nargs="+", default=[1.0, 4.0, 16.0])
    ap.add_argument("--out", default="results/stability")
    args = ap.parse_args()
    scan = stability_scan(gaussian_profile(3), args.betas, args.ss, args.ys)
    report.write_stability_csv(Path(args.out) / "stability.csv", scan)
    for s in args.ss:
        worst = max(r.ratio for r in scan.rows if r.s == s)
        print(f"s={s:g} max ratio {worst:.4f} ratio/sqrt(max(s,1/s)) {worst / max(s, 1 / s) ** 0.5:.4f}")
    print(f"{'PASS' if scan.passed else 'FAIL'} max ratio {scan.max_ratio:.4f} <= {scan.constant:.4f}")
    return 0 if scan.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
