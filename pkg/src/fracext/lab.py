"""Experiment harness: truncation rates, Cauchy geometry, y-regularity,
stability scans and randomized checks of the supporting inequalities.

Every verdict is a function of stored numbers only, so it can be
re-evaluated from the written tables.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
import scipy.integrate

from . import bessel
from .core import DecayRate, FracParams
from .quadrature import (
    PiecewiseFunction,
    _leggauss,
    gauss_jacobi_rule,
    mesh_from_breakpoints,
    reflect_extend,
    weighted_norm_sq,
)
from .synthesis import FieldNorms, RadialProfile, radial_functional, radial_integral, xreg_norm_sq

RATE_TOL = 0.15
DEFAULT_YS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
K_CAP = 10.0
CAUCHY_SLACK = 0.1
CAUCHY_FLOOR = 1e-8
CAUCHY_FACTOR = 1.5


# ---------------------------------------------------------------------------
# records and fits


@dataclass(frozen=True)
class ExperimentRecord:
    Y: float
    error_sq: float
    norms: FieldNorms
    wall_time: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        if self.error_sq < 0:
            raise ValueError("error_sq must be nonnegative")


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through ``(log Y, log value)``."""

    slope: float
    intercept: float
    residual: float
    mu_expected: DecayRate | None = None
    tol: float = RATE_TOL

    @property
    def passed(self) -> bool:
        if self.mu_expected is None:
            return True
        return -self.slope >= self.mu_expected.mu - self.tol


def rate_fit(
    points: Sequence[tuple[float, float]], mu_expected: DecayRate | None = None, tol: float = RATE_TOL
) -> RateFit:
    if len(points) < 2:
        raise ValueError("need at least two points")
    Y = np.array([p[0] for p in points], dtype=float)
    v = np.array([p[1] for p in points], dtype=float)
    if np.any(Y <= 0) or np.any(v <= 0):
        raise ValueError("rate fit needs positive Y and positive values")
    x = np.log(Y)
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all Y equal")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
    res = np.log(v) - (slope * x + intercept)
    return RateFit(float(slope), float(intercept), float(np.sqrt(np.mean(res**2))), mu_expected, tol)


@dataclass(frozen=True)
class TruncationStudy:
    params: FracParams
    records: tuple[ExperimentRecord, ...]
    fit: RateFit

    @property
    def passed(self) -> bool:
        return self.fit.passed

    def __iter__(self) -> Iterator:
        return iter((self.records, self.fit))


def truncation_study(
    params: FracParams, f: RadialProfile, Ys: Sequence[float] = DEFAULT_YS, tol: float = RATE_TOL
) -> TruncationStudy:
    """``||U^Y - U||^2`` on ``(0, Y)`` for each cutoff and the fitted decay rate.

    Passes when the fitted exponent is at least ``mu - tol``.
    """
    if len(Ys) < 4:
        raise ValueError("a rate study needs at least four cutoffs")
    records = []
    for Y in sorted(float(y) for y in Ys):
        t0 = time.perf_counter()
        norms = radial_functional(f, params, Y, "truncation-error")
        records.append(ExperimentRecord(Y, norms.combined, norms, time.perf_counter() - t0))
    fit = rate_fit([(r.Y, r.error_sq) for r in records], params.mu, tol)
    return TruncationStudy(params, tuple(records), fit)


# ---------------------------------------------------------------------------
# Cauchy geometry


@dataclass(frozen=True)
class CauchyStudy:
    params: FracParams
    cutoffs: tuple[float, ...]
    differences: tuple[float, ...]
    floor: float = CAUCHY_FLOOR
    slack: float = CAUCHY_SLACK

    @property
    def bound(self) -> float:
        return (1.0 / CAUCHY_FACTOR) ** (self.params.mu.mu / 2.0) + self.slack

    @property
    def ratios(self) -> tuple[float | None, ...]:
        """``D_{n+1}/D_n``; ``None`` once ``D_n`` is below the floor."""
        D = self.differences
        return tuple(D[n + 1] / D[n] if D[n] > self.floor else None for n in range(len(D) - 1))

    @property
    def passed(self) -> bool:
        return all(r is None or r <= self.bound for r in self.ratios)


def cauchy_study(
    params: FracParams, f: RadialProfile, Y0: float = 1.0, n_max: int = 6, floor: float = CAUCHY_FLOOR
) -> CauchyStudy:
    """``D_n = ||U^{Y_{n+1}} - U^{Y_n}||`` on ``(0, Y_n)`` with ``Y_n = 1.5^n Y0``.

    The norm is the energy seminorm plus ``s`` times the squared trace.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    Ys = tuple(Y0 * CAUCHY_FACTOR**n for n in range(n_max + 2))
    D = tuple(
        math.sqrt(radial_functional(f, params, Ys[n], "cauchy-difference", Y2=Ys[n + 1]).combined)
        for n in range(n_max + 1)
    )
    return CauchyStudy(params, Ys, D, floor)


# ---------------------------------------------------------------------------
# y-regularity


def default_eps(params: FracParams) -> float:
    return min(1.0 + params.alpha, 1.0 - params.alpha) / 4.0


def shape_integrals(beta: float, eps: float, ell_max: int, x_min: float = 1e-8, x_max: float = 80.0) -> np.ndarray:
    r"""``J_l = int_0^inf x^(alpha + 2l - 2eps) (g^(l)(x)^2 + g^(l+1)(x)^2) dx``
    for ``g(x) = x^beta K_beta(x)`` and ``l = 0..ell_max``.

    Near 0 the integrand in ``t = log x`` is at most of order
    ``x^(2 beta - 2 eps)`` for every ``l`` (the ``x^(2 beta)`` part of ``g``
    dominates); the piece below ``x_min`` is integrated with that exponent.
    At ``beta = 1/2`` that part vanishes and the values at ``x_min`` are
    rounding noise far below the total.
    """
    if not 0 < eps < beta:
        raise ValueError("need 0 < eps < beta for integrability at 0")
    params = FracParams.create(beta, 1.0, 3)
    prof = bessel.mode_profile(1.0, math.inf, params)
    alpha = params.alpha
    ells = np.arange(ell_max + 1)

    def integrand(t: float) -> np.ndarray:
        x = math.exp(t)
        der = bessel.profile_derivative_table(prof, ell_max + 1, x) / prof.c_K
        return x ** (alpha + 2 * ells - 2 * eps + 1.0) * (der[:-1] ** 2 + der[1:] ** 2)

    lo, hi = math.log(x_min), math.log(x_max)
    pts = np.arange(lo, hi, 1.0).tolist() + [hi]
    total = np.zeros(ell_max + 1)
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = scipy.integrate.quad_vec(integrand, a, b, epsabs=0.0, epsrel=1e-11)
        total += val
    return total + np.abs(integrand(lo)) / (2.0 * beta - 2.0 * eps)


@dataclass(frozen=True)
class RegularityRow:
    ell: int
    r: float
    growth: float | None


@dataclass(frozen=True)
class RegularityProbe:
    params: FracParams
    eps: float
    rows: tuple[RegularityRow, ...]
    K_cap: float = K_CAP

    @property
    def growths(self) -> list[float]:
        return [row.growth for row in self.rows if row.growth is not None]

    @property
    def degenerate(self) -> bool:
        return all(row.r == 0 for row in self.rows)

    @property
    def max_growth(self) -> float:
        return max(self.growths) if self.growths else 0.0

    @property
    def blowup(self) -> bool:
        """Accelerating growth: increments all positive and non-decreasing."""
        g = np.array(self.growths)
        if g.size < 3:
            return False
        inc = np.diff(g)
        return bool(np.all(inc > 0) and np.all(np.diff(inc) >= 0))

    @property
    def passed(self) -> bool:
        if self.degenerate:
            return True
        return self.max_growth <= self.K_cap and not self.blowup


def regularity_probe(
    params: FracParams,
    f: RadialProfile | None,
    ell_max: int = 8,
    eps: float | None = None,
    K_cap: float = K_CAP,
    lam: float | None = None,
) -> RegularityProbe:
    r"""``r_l = ||y^(l - eps) grad d_y^l U||_{L^2(y^alpha)}`` for ``l = 0..ell_max``.

    On the half line the unit-datum mode solution is ``c_K(lam) g(lam y)``
    with ``g(x) = x^beta K_beta(x)``, so after ``x = lam y``

        r_l^2 = omega_d int |fhat|^2 c_K(lam)^2 lam^(2 beta + 2 eps) lam^(d-1) dlam * J_l.

    Pass ``lam`` instead of ``f`` for a single mode with unit datum.
    Growth ratios ``g_l = r_{l+1} / ((l+1) r_l)`` pass when bounded by
    ``K_cap`` without an accelerating trend.
    """
    if eps is None:
        eps = default_eps(params)
    beta = params.beta
    if not (0 < eps < 1) or abs(params.alpha) + eps >= 1:
        raise ValueError("eps must satisfy alpha +- eps in (-1, 1)")
    if not (0 <= ell_max <= bessel.MAX_DERIVATIVE - 1):
        raise ValueError(f"ell_max must lie in [0, {bessel.MAX_DERIVATIVE - 1}]")
    g0 = bessel._k_limit(beta)

    def weight(l: float) -> float:
        return l ** (2 * beta + 2 * eps) / ((params.s + l ** (2 * beta)) * g0) ** 2

    if lam is not None:
        phi = weight(lam)
    else:
        if f is None:
            raise ValueError("give a datum or a single mode")
        phi = radial_integral(f, weight, growth=2 * eps)
    J = shape_integrals(beta, eps, ell_max)
    r = np.sqrt(max(phi, 0.0) * J)
    rows = []
    for ell in range(ell_max + 1):
        growth = None
        if ell < ell_max and r[ell] > 0:
            growth = float(r[ell + 1] / ((ell + 1) * r[ell]))
        rows.append(RegularityRow(ell, float(r[ell]), growth))
    return RegularityProbe(params, eps, tuple(rows), K_cap)


# ---------------------------------------------------------------------------
# stability and tangential regularity


def stability_constant(params: FracParams) -> float:
    """Certified bound on ``||U^Y|| / (min(1, 1/s) ||f||)`` for any datum and cutoff.

    Per mode the energy is ``d_b a / (s+a)^2 <= d_b / (4s)`` and the squared
    trace ``1/(s+a)^2 <= 1/s^2``, whence the combined norm squared is at most
    ``(1 + d_b/4) / s``.
    """
    s = params.s
    if s <= 0:
        raise ValueError("the L2 stability bound needs s > 0")
    return math.sqrt(max(s, 1.0 / s) * (1.0 + params.d_beta / 4.0))


@dataclass(frozen=True)
class StabilityRow:
    beta: float
    s: float
    Y: float
    ratio: float
    bound: float


@dataclass(frozen=True)
class StabilityScan:
    rows: tuple[StabilityRow, ...]

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.rows)

    @property
    def constant(self) -> float:
        """Single certified constant covering the whole grid."""
        return max(r.bound for r in self.rows)

    @property
    def passed(self) -> bool:
        return all(math.isfinite(r.ratio) and r.ratio <= self.constant for r in self.rows)


def stability_scan(
    f: RadialProfile,
    betas: Sequence[float] = (0.25, 0.5, 0.75),
    ss: Sequence[float] = (0.1, 1.0, 10.0),
    Ys: Sequence[float] = (1.0, 4.0, 16.0),
) -> StabilityScan:
    norm_f = math.sqrt(f.l2_norm_sq())
    rows = []
    for beta in betas:
        for s in ss:
            params = FracParams.create(beta, s, f.dim)
            for Y in Ys:
                val = math.sqrt(radial_functional(f, params, Y).combined)
                rows.append(
                    StabilityRow(beta, s, Y, val / (min(1.0, 1.0 / s) * norm_f), stability_constant(params))
                )
    return StabilityScan(tuple(rows))


def xreg_constant(params: FracParams) -> float:
    """``sup_lam lam^(2m) energy(lam) / (1 + lam^2)^m <= d_b / (4 s)``."""
    if params.s <= 0:
        raise ValueError("needs s > 0")
    return params.d_beta / (4.0 * params.s)


def xreg_scan(f: RadialProfile, params: FracParams, ms: Sequence[int] = (0, 1, 2)):
    return [xreg_norm_sq(f, params, m) for m in ms]


# ---------------------------------------------------------------------------
# randomized inequality suite


@dataclass(frozen=True)
class InequalityReport:
    """Ratios are normalised by the certified constant: a value above 1 is a violation."""

    name: str
    trials: int
    max_ratio: float
    violated: bool


@dataclass(frozen=True)
class Poly1D:
    """Piecewise polynomial on ``(0, 1)``; ``pieces[j]`` acts on ``(edges[j], edges[j+1])``."""

    edges: np.ndarray
    pieces: tuple[np.polynomial.Polynomial, ...]

    def derivative(self) -> "Poly1D":
        return Poly1D(self.edges, tuple(p.deriv() for p in self.pieces))

    def __call__(self, y: float) -> float:
        j = int(np.clip(np.searchsorted(self.edges, y, side="right") - 1, 0, len(self.pieces) - 1))
        return float(self.pieces[j](y))


def random_poly(
    rng: np.random.Generator, zero_left: bool, zero_right: bool, continuous: bool = True, max_el: int = 3, max_deg: int = 4
) -> Poly1D:
    """Seeded random piecewise polynomial on ``(0, 1)`` with optional zero end values."""
    n = int(rng.integers(1, max_el + 1))
    edges = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, n - 1)), [1.0]])
    verts = rng.uniform(-1.0, 1.0, n + 1)
    if zero_left:
        verts[0] = 0.0
    if zero_right:
        verts[-1] = 0.0
    pieces = []
    for j in range(n):
        a, b = edges[j], edges[j + 1]
        deg = int(rng.integers(1, max_deg + 1))
        left = verts[j] if continuous else rng.uniform(-1, 1)
        right = verts[j + 1] if continuous else rng.uniform(-1, 1)
        if j == 0 and zero_left:
            left = 0.0
        if j == n - 1 and zero_right:
            right = 0.0
        # bubbles (y-a)(b-y) y^k keep the end values
        lin = np.polynomial.Polynomial([left * b - right * a, right - left]) / (b - a)
        bub = np.polynomial.Polynomial([-a * b, a + b, -1.0])
        extra = np.polynomial.Polynomial(rng.uniform(-1, 1, max(deg - 1, 1)) * (2.0 / (b - a)) ** 2)
        pieces.append(lin + (bub * extra if deg >= 2 else 0.0 * bub))
    return Poly1D(edges, tuple(pieces))


def _moment(P: np.polynomial.Polynomial, lo: float, hi: float, e: float) -> float:
    """``int_lo^hi y^e P(y) dy``; exact for the polynomial degree."""
    deg = P.degree()
    if lo == 0.0:
        k = math.trunc(e) if abs(e) >= 1.0 else 0  # e - k in (-1, 1)
        e_red = e - k
        Q = P * np.polynomial.Polynomial([0.0, 1.0]) ** k if k > 0 else P
        if k < 0:
            # y^k P with P vanishing to order -k at 0
            coef = P.coef
            if np.any(np.abs(coef[: -k]) > 1e-14 * max(1.0, np.abs(coef).max())):
                raise ValueError("integrand not integrable at 0")
            Q = np.polynomial.Polynomial(coef[-k:])
        rule = gauss_jacobi_rule(max(Q.degree() // 2 + 1, 1), e_red)
        u = np.asarray(rule.nodes)
        return float(hi ** (e_red + 1.0) * np.dot(rule.weights, Q(hi * u)))
    t, w = _leggauss(deg // 2 + 1 + 4)
    y = lo + 0.5 * (hi - lo) * (t + 1.0)
    return float(0.5 * (hi - lo) * np.dot(w, y**e * P(y)))


def _weighted_sq(p: Poly1D, e: float) -> float:
    return sum(_moment(q * q, a, b, e) for q, a, b in zip(p.pieces, p.edges[:-1], p.edges[1:]))


def _ratio(lhs: float, rhs: float) -> float:
    # the zero function gives 0/0, reported as 0
    if rhs <= 0:
        if lhs > 0:
            return math.inf
        return 0.0
    return lhs / rhs


def trace_ratio(h: Poly1D, lam: float, params: FracParams) -> float:
    """``d_b lam^(2 beta) h(0)^2 / int y^alpha (h'^2 + lam^2 h^2)``; at most 1.

    The bound is sharp: the half-line mode solution attains it.
    """
    rhs = _weighted_sq(h.derivative(), params.alpha) + lam**2 * _weighted_sq(h, params.alpha)
    return _ratio(params.d_beta * lam ** (2 * params.beta) * h(0.0) ** 2, rhs)


def trace_trial(rng: np.random.Generator) -> float:
    params = FracParams.create(float(rng.uniform(0.05, 0.95)), 1.0, 3)
    lam = float(10.0 ** rng.uniform(-2, 2))
    return trace_ratio(random_poly(rng, zero_left=False, zero_right=True), lam, params)


def hardy_ratio(g: Poly1D, a: float) -> float:
    """Weighted Hardy inequality normalised by its sharp constant ``4/(a+1)^2``.

    For ``a < -1`` the primitive ``int_0^y g`` is used, for ``a > -1`` the
    tail ``int_y^inf g``; each form holds on the half line with that
    constant.  ``g`` is supported in ``(0, 1)``.
    """
    if a == -1.0:
        raise ValueError("no Hardy inequality at a = -1")
    rhs = _weighted_sq(g, a + 2.0)
    prims = [q.integ(lbnd=lo) for q, lo in zip(g.pieces, g.edges[:-1])]
    masses = [float(P(hi)) for P, hi in zip(prims, g.edges[1:])]
    lhs = 0.0
    if a < -1:
        acc = 0.0
        for P, m, lo, hi in zip(prims, masses, g.edges[:-1], g.edges[1:]):
            G = P + acc
            lhs += _moment(G * G, lo, hi, a)
            acc += m
        lhs += acc**2 / (-a - 1.0)  # constant primitive on (1, inf)
    else:
        after = np.cumsum(masses[::-1])[::-1].tolist() + [0.0]
        for j, (P, lo, hi) in enumerate(zip(prims, g.edges[:-1], g.edges[1:])):
            G = after[j + 1] + masses[j] - P  # int_y^1 g
            lhs += _moment(G * G, lo, hi, a)
    return _ratio(lhs * (a + 1.0) ** 2 / 4.0, rhs)


def hardy_trial(rng: np.random.Generator) -> float:
    if rng.uniform() < 0.5:
        a = float(rng.uniform(-2.9, -1.1))
    else:
        a = float(rng.uniform(-0.9, 1.9))
    return hardy_ratio(random_poly(rng, zero_left=False, zero_right=False, continuous=False), a)


def _poly_nodes(p: Poly1D, extra: int = 4, exponent: float = 0.0):
    """Nodes and weights on ``(0, 1)`` for ``y^exponent`` times polynomials of
    degree ``2 deg + 2 extra - 1`` per piece."""
    ys, ws = [], []
    for q, a, b in zip(p.pieces, p.edges[:-1], p.edges[1:]):
        n = q.degree() + 1 + extra
        if a == 0.0 and exponent != 0.0:
            rule = gauss_jacobi_rule(n, exponent)
            ys.append(b * np.asarray(rule.nodes))
            ws.append(b ** (exponent + 1.0) * np.asarray(rule.weights))
        else:
            t, w = _leggauss(n)
            y = a + 0.5 * (b - a) * (t + 1.0)
            ys.append(y)
            ws.append(0.5 * (b - a) * w * y**exponent)
    return np.concatenate(ys), np.concatenate(ws)


def _eval_pieces(p: Poly1D, y: np.ndarray) -> np.ndarray:
    j = np.clip(np.searchsorted(p.edges, y, side="right") - 1, 0, len(p.pieces) - 1)
    out = np.empty_like(y)
    for k, q in enumerate(p.pieces):
        mask = j == k
        out[mask] = q(y[mask])
    return out


def _outer(arrs: Sequence[np.ndarray]) -> np.ndarray:
    out = arrs[0]
    for a in arrs[1:]:
        out = np.multiply.outer(out, a)
    return out


def poincare_ratio(gs: Sequence[Poly1D], h: Poly1D, alpha: float, mu: float) -> float:
    r"""Weighted Poincare inequality for ``U = g_1(x_1)..g_d(x_d) h(y)``
    supported in the unit box, normalised by ``1/(d pi^2)``.

    With ``rho = (1 + |x|^2 + y^2)^(1/2) >= 1`` the factor ``rho^(mu-2)`` is
    at most 1 and ``rho^mu`` at least 1 for ``mu in [0, 2]``; Friedrichs on
    ``(0,1)^d`` gives the constant.  The ``|3-d|`` trace term only enlarges
    the right side.  ``rho`` is not separable, so a tensor Gauss rule over
    the support box is used.
    """
    if not 0 <= mu <= 2:
        raise ValueError("mu must lie in [0, 2]")
    dim = len(gs)
    xs, wx, gv, gd = [], [], [], []
    for g in gs:
        x, w = _poly_nodes(g, extra=6)
        xs.append(x)
        wx.append(w)
        gv.append(_eval_pieces(g, x))
        gd.append(_eval_pieces(g.derivative(), x))
    y, wy = _poly_nodes(h, extra=6, exponent=alpha)
    hv, hd = _eval_pieces(h, y), _eval_pieces(h.derivative(), y)
    W = _outer(wx)
    G2 = _outer([v * v for v in gv])
    grad2 = sum(_outer([gd[i] ** 2 if i == j else gv[i] ** 2 for i in range(dim)]) for j in range(dim))
    R2 = sum(_outer([xs[i] ** 2 if i == j else np.ones_like(xs[i]) for i in range(dim)]) for j in range(dim))
    rho2 = 1.0 + R2[..., None] + y * y
    lhs = np.sum((W * G2)[..., None] * wy * rho2 ** ((mu - 2.0) / 2.0) * hv * hv)
    rhs = np.sum(W[..., None] * wy * rho2 ** (mu / 2.0) * (grad2[..., None] * hv * hv + G2[..., None] * hd * hd))
    rhs += abs(3 - dim) * np.sum(W * G2) * h(0.0) ** 2
    return _ratio(dim * math.pi**2 * float(lhs), float(rhs))


def poincare_trial(rng: np.random.Generator, dim: int = 3) -> float:
    alpha = 1.0 - 2.0 * float(rng.uniform(0.05, 0.95))
    mu = 0.0 if rng.uniform() < 0.5 else 0.1
    gs = [random_poly(rng, zero_left=True, zero_right=True) for _ in range(dim)]
    h = random_poly(rng, zero_left=False, zero_right=True)
    return poincare_ratio(gs, h, alpha, mu)


def stability_ratio(lam: float, Y: float, params: FracParams) -> float:
    """Single-mode data are extremal for ``||U^Y|| / (min(1, 1/s) ||f||)``."""
    energy, trace = bessel.solution_norms(lam, Y, params)
    s = params.s
    return math.sqrt(energy + s * trace) / min(1.0, 1.0 / s) / stability_constant(params)


def stability_trial(rng: np.random.Generator) -> float:
    params = FracParams.create(float(rng.uniform(0.05, 0.95)), float(10.0 ** rng.uniform(-1, 1)), 3)
    Y = float(16.0 ** rng.uniform(0, 1))
    lam = float(10.0 ** rng.uniform(-3, 3))
    return stability_ratio(lam, Y, params)


def reflection_bound(e: float) -> float:
    """``(2Y - z)/z`` lies in ``[1, 3]`` on the mirrored half, so the weight
    grows at most by ``max(1, 3^e)``."""
    return 1.0 + max(1.0, 3.0**e)


def reflection_ratio(f: PiecewiseFunction, Y: float, e: float) -> float:
    """``int_0^{3Y/2} y^e |W'|^2 / int_0^Y y^e |f'|^2`` for the reflected extension."""
    W = reflect_extend(f, Y)
    return _ratio(weighted_norm_sq(W, e, derivative=True), weighted_norm_sq(f, e, derivative=True))


def random_piecewise(rng: np.random.Generator, Y: float, max_el: int = 4, max_deg: int = 4) -> PiecewiseFunction:
    n = int(rng.integers(1, max_el + 1))
    bp = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, n - 1)), [1.0]]) * Y
    degs = rng.integers(1, max_deg + 1, n)
    mesh = mesh_from_breakpoints(bp, degs)
    verts = rng.uniform(-1.0, 1.0, n + 1)
    coeffs = tuple(
        np.concatenate([[verts[j], verts[j + 1]], rng.uniform(-1.0, 1.0, int(degs[j]) - 1)]) for j in range(n)
    )
    return PiecewiseFunction(mesh, coeffs)


def reflection_trial(rng: np.random.Generator) -> float:
    alpha = 1.0 - 2.0 * float(rng.uniform(0.05, 0.95))
    e = alpha + (0.0 if rng.uniform() < 0.5 else 1.0 + abs(alpha))
    Y = float(rng.choice([1.0, 4.0, 16.0]))
    return reflection_ratio(random_piecewise(rng, Y), Y, e) / reflection_bound(e)


TRIALS: dict[str, Callable[[np.random.Generator], float]] = {
    "trace": trace_trial,
    "poincare": poincare_trial,
    "hardy": hardy_trial,
    "stability": stability_trial,
    "reflection": reflection_trial,
}


def run_trials(name: str, seed: int, trials: int) -> np.ndarray:
    """Normalised ratios of one inequality; trial ``i`` has its own stream, so
    a longer run extends a shorter one."""
    func = TRIALS[name]
    index = list(TRIALS).index(name)
    children = np.random.SeedSequence([seed, index]).spawn(trials)
    return np.array([func(np.random.default_rng(c)) for c in children])


def inequality_suite(seed: int = 42, trials: int = 1000, names: Sequence[str] | None = None) -> list[InequalityReport]:
    if trials < 100:
        raise ValueError("the suite needs at least 100 trials per inequality")
    reports = []
    for name in names or list(TRIALS):
        ratios = run_trials(name, seed, trials)
        finite = bool(np.all(np.isfinite(ratios)))
        mx = float(np.max(ratios)) if finite else math.inf
        reports.append(InequalityReport(name, trials, mx, (not finite) or mx > 1.0 + 1e-9))
    return reports
