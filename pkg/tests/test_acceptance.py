"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import math
import time
import warnings

import numpy as np
import pytest

from fracext.bessel import bessel_ik, dtn_symbol
from fracext.core import FracParams
from fracext.lab import (
    cauchy_study,
    default_eps,
    inequality_suite,
    regularity_probe,
    stability_scan,
    truncation_study,
    xreg_constant,
    xreg_scan,
)
from fracext.modes import MeshControls, mode_dtn
from fracext.quadrature import gauss_jacobi_rule
from fracext.synthesis import (
    AliasingWarning,
    bump_physical,
    bump_profile,
    gaussian_profile,
    grid_synthesize,
    radial_functional,
)


@pytest.fixture
def verdict(capsys):
    def say(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return say


def test_01_dtn_symbol_recovery(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for beta in (0.25, 0.5, 0.75):
        p = FracParams.create(beta, 1.0)
        for lam in (0.5, 1.0, 2.0):
            got = mode_dtn(lam, math.inf, p)
            oracle = dtn_symbol(lam, math.inf, p)
            assert oracle == pytest.approx(lam ** (2 * beta), rel=1e-12)
            worst = max(worst, abs(got - oracle) / oracle)
    elapsed = time.perf_counter() - t0
    verdict(1, worst < 1e-4 and elapsed < 60, f"max rel gap {worst:.2e}, {elapsed:.2f} s")


def test_02_half_order_tanh(verdict):
    p = FracParams.create(0.5, 1.0)
    coarse, fine = MeshControls(), MeshControls(degree_slope=1.0)
    worst = worst_coarse = 0.0
    for lam in (0.5, 1.0, 2.0):
        for Y in (1.0, 2.0, 4.0):
            exact = lam * math.tanh(lam * Y)
            worst_coarse = max(worst_coarse, abs(mode_dtn(lam, Y, p, coarse) - exact))
            worst = max(worst, abs(mode_dtn(lam, Y, p, fine) - exact))
    verdict(2, worst < 1e-8, f"max |gap| {worst:.2e} after p-refinement ({worst_coarse:.2e} before)")


@pytest.mark.parametrize(
    "beta,s,mu",
    [(0.5, 1.0, 1.0), (0.25, 1.0, 1.5), (0.75, 1.0, 1.5), (0.75, 0.0, 0.5)],
    ids=["alpha0", "alpha+0.5", "alpha-0.5", "s0"],
)
def test_03_truncation_rate(verdict, beta, s, mu):
    p = FracParams.create(beta, s, 3)
    assert p.mu.mu == mu
    t0 = time.perf_counter()
    study = truncation_study(p, gaussian_profile(3))
    elapsed = time.perf_counter() - t0
    ok = study.passed and elapsed < 300
    verdict(3, ok, f"beta={beta} s={s} slope {study.fit.slope:.3f} vs -mu={-mu}, {elapsed:.1f} s")


def test_04_cauchy_geometry(verdict):
    study = cauchy_study(FracParams.create(0.5, 1.0, 3), gaussian_profile(3), 1.0, 6)
    ratios = study.ratios[:6]
    ok = len(ratios) == 6 and all(r is not None and r <= study.bound for r in ratios)
    shown = ", ".join("-" if r is None else f"{r:.3f}" for r in ratios)
    verdict(4, ok, f"ratios [{shown}] <= {study.bound:.4f}")


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_05_regularity_probe(verdict, beta):
    p = FracParams.create(beta, 1.0, 3)
    probe = regularity_probe(p, gaussian_profile(3), 8, default_eps(p), K_cap=10.0)
    g = probe.growths[1:8]
    ok = len(g) == 7 and max(g) <= 10.0 and not probe.blowup and probe.passed
    verdict(5, ok, f"beta={beta} growths l=1..7 max {max(g):.3f}, blowup={probe.blowup}")


def test_06_inequality_suites(verdict):
    base = {r.name: r for r in inequality_suite(42, 1000)}
    double = {r.name: r for r in inequality_suite(42, 2000)}
    parts, ok = [], True
    for name, r in base.items():
        d = double[name]
        change = abs(d.max_ratio - r.max_ratio) / r.max_ratio
        ok &= not r.violated and not d.violated and change < 0.10
        parts.append(f"{name} {r.max_ratio:.3f}->{d.max_ratio:.3f}")
    verdict(6, ok, "; ".join(parts))


def test_07_stability_bound(verdict):
    scan = stability_scan(gaussian_profile(3), (0.25, 0.5, 0.75), (0.1, 1.0, 10.0), (1.0, 4.0, 16.0))
    verdict(7, scan.passed, f"max ratio {scan.max_ratio:.4f} <= constant {scan.constant:.4f}")


def test_08_quadrature_and_bessel(verdict):
    worst_q = 0.0
    for alpha in (-0.9, -0.5, 0.0, 0.5, 0.9):
        for n in range(1, 13):
            r = gauss_jacobi_rule(n, alpha)
            for k in range(2 * n):
                exact = 1.0 / (alpha + k + 1)
                worst_q = max(worst_q, abs(r.integrate(r.nodes**k) - exact) / exact)
    worst_w = 0.0
    for nu in np.arange(1, 10) / 10:
        for x in np.logspace(-1, math.log10(50), 60):
            b = bessel_ik(float(nu), float(x))
            worst_w = max(worst_w, abs(x * b.wronskian + 1.0))
    verdict(8, worst_q <= 1e-12 and worst_w <= 1e-10, f"moment rel err {worst_q:.1e}, Wronskian {worst_w:.1e}")


def test_09_cross_path(verdict):
    R, k, n = 2.0, 4, 128
    box = 16 * R
    x = np.arange(n) * box / n - box / 2
    X, Y = np.meshgrid(x, x, indexing="ij")
    datum = bump_physical(np.stack([X, Y], -1), k, R)
    parts, ok = [], True
    for beta in (0.25, 0.5, 0.75):
        p = FracParams.create(beta, 1.0, 2)
        with warnings.catch_warnings():
            warnings.simplefilter("error", AliasingWarning)
            g = grid_synthesize(datum, box, p)
        r = radial_functional(bump_profile(2, k, R), p, math.inf)
        gap = max(abs(g.norms.energy_sq / r.energy_sq - 1), abs(g.norms.trace_sq / r.trace_sq - 1))
        ok &= gap < 0.01
        parts.append(f"beta={beta} {gap:.1e}")
    verdict(9, ok, "relative gaps " + ", ".join(parts))


def test_10_xreg(verdict):
    parts, ok = [], True
    for beta in (0.25, 0.5, 0.75):
        p = FracParams.create(beta, 1.0, 3)
        ratios = [res.ratio for res in xreg_scan(gaussian_profile(3), p, (0, 1, 2))]
        C = xreg_constant(p)
        ok &= all(0 < q <= C for q in ratios)
        parts.append(f"beta={beta} max {max(ratios):.3f} <= {C:.3f}")
    verdict(10, ok, "; ".join(parts))
