"""Growth of weighted y-derivatives of the full-space extension.

    python scripts/regularity_probe.py --ell-max 10
"""

import argparse
from pathlib import Path

from fracext import report
from fracext.core import FracParams
from fracext.lab import regularity_probe
from fracext.synthesis import gaussian_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 0.9])
    ap.add_argument("--ell-max", type=int, default=8)
    ap.add_argument("--out", default="results/regularity")
    args = ap.parse_args()
    ok = True
    for beta in args.betas:
        probe = regularity_probe(FracParams.create(beta, 1.0, 3), gaussian_profile(3), args.ell_max)
        report.write_regularity_csv(Path(args.out) / f"beta{beta:g}.csv", probe)
        g = " ".join(f"{x:.3f}" for x in probe.growths)
        print(f"{'PASS' if probe.passed else 'FAIL'} beta={beta:g} eps={probe.eps:.4g} growths {g}")
        ok &= probe.passed
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
