"""Full-space norms assembled from per-mode quantities.

For constant coefficients the Fourier transform in ``x`` decouples the
extension problem into independent mode problems in ``y``; squared norms of
the extension are then integrals over ``xi`` of the per-mode squared norms.
With unitary Fourier conventions

    ||U||^2 = omega_d int_0^inf |fhat(lam)|^2 m(lam) lam^(d-1) dlam,

where ``omega_d`` is the area of the unit sphere and ``m`` the unit-datum
mode functional.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.integrate
import scipy.special

from . import bessel
from .core import FracParams, IntegrabilityError

SPHERE_AREA = {2: 2.0 * math.pi, 3: 4.0 * math.pi}

LAMBDA_MIN = 1e-6
QUAD_RTOL = 1e-10


class AliasingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RadialProfile:
    """Radial Fourier datum ``lam -> fhat(lam)``.

    ``lam_max`` marks where the discarded tail of ``|fhat|^2 lam^(d-1)``
    (times any polynomially bounded mode factor) is negligible; ``tail_bound``
    optionally bounds ``|fhat(lam)|`` beyond it by ``C lam^-p``, given as
    ``(C, p)``.
    """

    evaluator: Callable[[float], float]
    dim: int
    decay: str
    lam_max: float
    support_radius: float | None = None
    smoothness: str = "analytic"
    tail_bound: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.dim not in SPHERE_AREA:
            raise ValueError("dim must be 2 or 3")
        if not self.lam_max > 0:
            raise ValueError("lam_max must be positive")

    def __call__(self, lam: float) -> float:
        return float(self.evaluator(lam))

    def scaled(self, c: float) -> "RadialProfile":
        f = self.evaluator
        return RadialProfile(
            lambda lam: c * f(lam),
            self.dim,
            self.decay,
            self.lam_max,
            self.support_radius,
            self.smoothness,
            None if self.tail_bound is None else (abs(c) * self.tail_bound[0], self.tail_bound[1]),
        )

    def l2_norm_sq(self) -> float:
        """``||f||^2_{L^2(R^d)}`` by Plancherel."""
        return radial_integral(self, lambda lam: 1.0, growth=0.0)

    def hm_norm_sq(self, m: int) -> float:
        """``int (1 + |xi|^2)^m |fhat|^2 dxi``."""
        return radial_integral(self, lambda lam: (1.0 + lam * lam) ** m, growth=2.0 * m)


def gaussian_profile(dim: int = 3, width: float = 1.0, amplitude: float = 1.0) -> RadialProfile:
    """``fhat = amplitude exp(-(width lam)^2)``, i.e.
    ``f(x) = amplitude (2 width^2)^(-d/2) exp(-|x|^2 / (4 width^2))``."""
    if width <= 0:
        raise ValueError("width must be positive")
    return RadialProfile(
        lambda lam: amplitude * math.exp(-((width * lam) ** 2)),
        dim,
        "gaussian",
        # |fhat|^2 = exp(-2 width^2 lam^2) < 1e-35 beyond this point
        math.sqrt(40.0) / width,
        None,
        "analytic",
    )


def bump_fourier(lam, dim: int, k: int = 4, radius: float = 1.0):
    """Fourier transform of ``(1 - |x/R|^2)_+^k`` (unitary convention).

    ``fhat(lam) = R^d lam'^-nu 2^k k! J_{nu+k+1}(lam') / lam'^(k+1)`` with
    ``lam' = R lam`` and ``nu = d/2 - 1``.
    """
    nu = 0.5 * dim - 1.0
    x = radius * np.asarray(lam, dtype=float)
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    val = 2.0**k * math.factorial(k) * scipy.special.jv(nu + k + 1, xs) / xs ** (nu + k + 1)
    # series J_n(x)/x^n = 2^-n / Gamma(n+1) (1 - x^2 / (4 (n+1)) + ...)
    n = nu + k + 1
    series = 2.0**k * math.factorial(k) * 2.0**-n / math.gamma(n + 1) * (1.0 - x * x / (4.0 * (n + 1)))
    out = radius**dim * np.where(small, series, val)
    return out if np.ndim(lam) else float(out)


def bump_physical(x: np.ndarray, k: int = 4, radius: float = 1.0) -> np.ndarray:
    """``(1 - |x/R|^2)_+^k`` at points ``x`` of shape ``(..., d)``."""
    r2 = np.sum(np.asarray(x) ** 2, axis=-1) / radius**2
    return np.where(r2 < 1.0, (1.0 - np.minimum(r2, 1.0)) ** k, 0.0)


def bump_profile(dim: int = 3, k: int = 4, radius: float = 1.0) -> RadialProfile:
    """Compactly supported radial bump ``(1 - |x/R|^2)_+^k``."""
    if k < 1:
        raise ValueError("k >= 1 needed for a finite tail")
    nu = 0.5 * dim - 1.0
    p = nu + k + 1.5
    # |J_n(x)| <= sqrt(2 / (pi x)) for n >= 1/2 and x > 0
    const = radius**dim * 2.0**k * math.factorial(k) * math.sqrt(2.0 / math.pi) * radius**-p
    return RadialProfile(
        lambda lam: bump_fourier(lam, dim, k, radius),
        dim,
        "compact",
        400.0 / radius,
        radius,
        f"C^{k - 1}",
        (const, p),
    )


def zero_profile(dim: int = 3) -> RadialProfile:
    return RadialProfile(lambda lam: 0.0, dim, "zero", 1.0, 0.0, "analytic")


@dataclass(frozen=True)
class FieldNorms:
    """Fourier-diagonal parts of the extension norm.

    ``energy_sq = int int y^alpha |grad U|^2`` and ``trace_sq = ||tr_0 U||^2``.
    """

    energy_sq: float
    trace_sq: float
    s: float

    def __post_init__(self) -> None:
        if self.energy_sq < 0 or self.trace_sq < 0:
            raise ValueError("norms are nonnegative")

    @property
    def combined(self) -> float:
        if self.s == 0:
            # the trace need not be square integrable when s = 0
            return self.energy_sq
        return self.energy_sq + self.s * self.trace_sq


def _panels(lo: float, hi: float, marks: list[float]) -> list[float]:
    """Unit-width panels in ``log lam`` plus the supplied marks."""
    pts = set(np.arange(math.ceil(lo), math.floor(hi) + 1, 1.0).tolist())
    pts.update(m for m in marks if lo < m < hi)
    pts.update((lo, hi))
    return sorted(pts)


def radial_integral(
    f: RadialProfile,
    mode_factor: Callable[[float], float],
    growth: float = 0.0,
    marks: tuple[float, ...] = (),
    lam_min: float = LAMBDA_MIN,
    rtol: float = QUAD_RTOL,
) -> float:
    """``omega_d int_0^inf |fhat|^2 m(lam) lam^(d-1) dlam``.

    Adaptive Gauss-Kronrod panels in ``t = log lam`` on ``(lam_min, lam_max)``;
    the piece below ``lam_min`` is integrated from a power law fitted at
    ``lam_min`` and ``2 lam_min``; above ``lam_max`` the tail is bounded from
    ``f.tail_bound`` assuming ``m(lam) <= m(lam_max) (lam/lam_max)^growth``.
    ``marks`` are lam values where ``m`` changes scale (e.g. ``1/Y``).
    """
    d = f.dim

    def g(t: float) -> float:
        lam = math.exp(t)
        fh = f(lam)
        if fh == 0.0:
            return 0.0
        return fh * fh * mode_factor(lam) * lam**d

    lo, hi = math.log(lam_min), math.log(f.lam_max)
    if hi <= lo:
        raise ValueError("lam_max must exceed lam_min")
    pts = _panels(lo, hi, [math.log(m) for m in marks if m > 0])
    # a coarse pass sets the absolute tolerance so negligible panels stay cheap
    t, w = np.polynomial.legendre.leggauss(24)
    rough = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        rough += 0.5 * (b - a) * sum(wi * abs(g(a + 0.5 * (b - a) * (ti + 1.0))) for ti, wi in zip(t, w))
    atol = rtol * rough / len(pts)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = scipy.integrate.quad(g, a, b, epsabs=atol, epsrel=rtol, limit=400)
        total += val
    # below lam_min: g(t) ~ C exp((p+1) t)
    g0, g1 = g(lo), g(lo + math.log(2.0))
    if g0 != 0.0:
        if g1 <= 0.0 or g0 < 0.0:
            raise IntegrabilityError("integrand changes sign near lam = 0")
        rate = math.log(g1 / g0) / math.log(2.0)
        if rate <= 0.05:
            raise IntegrabilityError(
                f"lam-integrand behaves like lam^{rate - 1:.3g} at 0; not integrable"
            )
        total += g0 / rate
    if f.tail_bound is not None:
        C, p = f.tail_bound
        expo = 2.0 * p - d - growth
        if expo <= 0:
            raise IntegrabilityError("datum decays too slowly for this functional")
        lm = f.lam_max
        total += C * C * mode_factor(lm) * lm ** (d - 2.0 * p) / expo
    return SPHERE_AREA[d] * total


def _check_dims(f: RadialProfile, params: FracParams) -> None:
    if f.dim != params.dim:
        raise ValueError(f"datum lives in dimension {f.dim}, parameters in {params.dim}")


def _mode_functional(kind: str, params: FracParams, Y: float, Y2: float | None):
    """Unit-datum per-mode ``(energy, trace^2)`` for the requested functional."""
    s = params.s
    if kind == "solution-norms":
        def m(lam: float) -> tuple[float, float]:
            return bessel.solution_norms(lam, Y, params)
        return m
    if kind == "truncation-error":
        def m(lam: float) -> tuple[float, float]:
            return bessel.truncation_error(lam, Y, params)
        return m
    if kind == "cauchy-difference":
        if Y2 is None or not Y2 > Y:
            raise ValueError("cauchy-difference needs Y2 > Y")

        def m(lam: float) -> tuple[float, float]:
            return bessel.pair_difference(lam, Y, Y2, params)
        return m
    raise ValueError(f"unknown functional kind {kind!r}")


def radial_functional(
    f: RadialProfile,
    params: FracParams,
    Y: float,
    kind: str = "solution-norms",
    Y2: float | None = None,
    rtol: float = QUAD_RTOL,
) -> FieldNorms:
    """Energy and trace parts of one of three extension functionals.

    ``solution-norms``: the truncated solution ``U^Y`` on ``(0, Y)``;
    ``truncation-error``: ``U^Y - U`` on ``(0, Y)``;
    ``cauchy-difference``: ``U^Y - U^Y2`` on ``(0, Y)`` with ``Y < Y2``.
    """
    _check_dims(f, params)
    if not Y > 0:
        raise ValueError("Y must be positive")
    if kind == "truncation-error" and math.isinf(Y):
        return FieldNorms(0.0, 0.0, params.s)
    if params.s == 0 and params.dim == 2:
        raise IntegrabilityError("d = 2 needs s > 0")
    m = _mode_functional(kind, params, Y, Y2)
    marks = () if math.isinf(Y) else (0.1 / Y, 1.0 / Y, 10.0 / Y)
    # the power-law fit below lam_min needs lam Y << 1 for every cutoff involved
    finite = [c for c in (Y, Y2) if c is not None and math.isfinite(c)]
    lam_min = min([LAMBDA_MIN] + [1e-4 / c for c in finite])
    cache: dict[float, tuple[float, float]] = {}

    def pair(lam: float) -> tuple[float, float]:
        if lam not in cache:
            cache[lam] = m(lam)
        return cache[lam]

    energy = radial_integral(f, lambda lam: pair(lam)[0], marks=marks, lam_min=lam_min, rtol=rtol)
    try:
        trace = radial_integral(f, lambda lam: pair(lam)[1], marks=marks, lam_min=lam_min, rtol=rtol)
    except IntegrabilityError:
        if params.s > 0:
            raise
        trace = math.inf
    return FieldNorms(max(energy, 0.0), max(trace, 0.0), params.s)


def fullspace_trace_symbol(f: RadialProfile | float, params: FracParams, lam: float) -> float:
    """``uhat(lam) = fhat(lam) / (s + lam^(2 beta))``."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    denom = params.s + lam ** (2.0 * params.beta)
    if denom == 0:
        raise ZeroDivisionError("s = 0 and lam = 0")
    fh = f(lam) if callable(f) else float(f)
    return fh / denom


@dataclass(frozen=True)
class XRegResult:
    """``sum_{|z|=m} ||grad d_x^z U||^2`` realised as ``int lam^(2m) energy``
    next to ``||f||^2_{H^m}``."""

    m: int
    norm_sq: float
    data_norm_sq: float

    @property
    def ratio(self) -> float:
        return self.norm_sq / self.data_norm_sq if self.data_norm_sq > 0 else 0.0


def xreg_norm_sq(f: RadialProfile, params: FracParams, m: int, Y: float = math.inf) -> XRegResult:
    """Tangential regularity functional of order ``m``.

    The sum over multi-indices of ``|xi^z|^2`` with multinomial weights is
    ``|xi|^(2m)``, so the functional is the energy integral weighted by
    ``lam^(2m)``.
    """
    _check_dims(f, params)
    if m < 0:
        raise ValueError("m must be nonnegative")
    marks = () if math.isinf(Y) else (1.0 / Y,)
    val = radial_integral(
        f,
        lambda lam: lam ** (2 * m) * bessel.solution_norms(lam, Y, params)[0],
        growth=2.0 * m,
        marks=marks,
    )
    return XRegResult(m, max(val, 0.0), f.hm_norm_sq(m))


# ---------------------------------------------------------------------------
# grid path


@dataclass(frozen=True)
class GridSynthesis:
    norms: FieldNorms
    trace_field: np.ndarray = field(repr=False)
    data_norm_sq: float = 0.0
    shell_fraction: float = 0.0


def grid_frequencies(n: int, box: float, dim: int) -> tuple[np.ndarray, float]:
    """``|xi|`` on the FFT grid and the frequency spacing."""
    k = 2.0 * math.pi * np.fft.fftfreq(n, d=box / n)
    grids = np.meshgrid(*([k] * dim), indexing="ij")
    return np.sqrt(sum(g * g for g in grids)), 2.0 * math.pi / box


def _outer_shell(n: int, dim: int) -> np.ndarray:
    """Modes whose largest index component is within ``n/8`` of Nyquist."""
    idx = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    grids = np.meshgrid(*([idx] * dim), indexing="ij")
    return np.maximum.reduce(grids) >= 3 * n // 8


def grid_synthesize(
    samples: np.ndarray,
    box: float,
    params: FracParams,
    Y: float = math.inf,
    mode_solver: Callable[[float], tuple[float, float, float]] | None = None,
    shell_tol: float = 1e-6,
) -> GridSynthesis:
    """Extension norms for ``f`` sampled on a periodic box ``[-box/2, box/2)^d``.

    The DFT approximates ``fhat`` at ``xi_k = 2 pi k / box``; each distinct
    ``|xi_k|`` is solved once.  ``mode_solver(lam)`` returns
    ``(symbol, energy, trace^2)`` for unit datum and defaults to the closed
    forms; pass a finite-element solve to exercise the discrete path.
    """
    f = np.asarray(samples, dtype=float)
    dim = f.ndim
    if dim != params.dim:
        raise ValueError("sample array rank must equal params.dim")
    n = f.shape[0]
    if any(m != n for m in f.shape):
        raise ValueError("grid must be square")
    h = box / n
    F = np.fft.fftn(f)
    fhat2 = np.abs(F * (h**dim / (2.0 * math.pi) ** (dim / 2))) ** 2
    lam, dxi = grid_frequencies(n, box, dim)
    total = float(fhat2.sum())
    shell = float(fhat2[_outer_shell(n, dim)].sum()) / total if total > 0 else 0.0
    if shell > shell_tol:
        warnings.warn(
            f"{shell:.2e} of the datum's spectral energy lies in the outer shell; refine the grid",
            AliasingWarning,
            stacklevel=2,
        )

    if mode_solver is None:
        def mode_solver(l: float) -> tuple[float, float, float]:
            if l == 0.0:
                if params.s == 0:
                    raise ZeroDivisionError("zero mode with s = 0")
                return 0.0, 0.0, 1.0 / params.s**2
            a = bessel.dtn_symbol(l, Y, params)
            e, t = bessel.solution_norms(l, Y, params)
            return a, e, t

    uniq, inv = np.unique(np.round(lam, 12), return_inverse=True)
    table = np.array([mode_solver(float(l)) for l in uniq])
    sym = table[inv, 0].reshape(lam.shape)
    energy_m = table[inv, 1].reshape(lam.shape)
    trace_m = table[inv, 2].reshape(lam.shape)
    weight = dxi**dim
    energy = float(np.sum(fhat2 * energy_m) * weight)
    trace = float(np.sum(fhat2 * trace_m) * weight)
    field_vals = np.real(np.fft.ifftn(F / (params.s + sym)))
    return GridSynthesis(FieldNorms(energy, trace, params.s), field_vals, total * weight, shell)
