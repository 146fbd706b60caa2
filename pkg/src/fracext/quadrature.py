"""Gauss-Jacobi rules for ``y**alpha``, graded meshes on ``(0, Y)`` and
piecewise polynomials in a hierarchic (integrated Legendre) basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .core import IntegrabilityError

#: extra Gauss-Legendre points on elements where ``y**alpha`` is smooth
DEGREE_PADDING = 4


# ---------------------------------------------------------------------------
# quadrature rules


@dataclass(frozen=True)
class QuadratureRule:
    """Rule for ``int_0^1 y**weight_exponent * p(y) dy``."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_exponent: float

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def _jacobi_recurrence(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Monic recurrence coefficients for the weight ``(1-t)**a (1+t)**b``.

    Returns the diagonal ``a_k`` (k < n) and the squared off-diagonal ``b_k``
    (1 <= k < n).
    """
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    den = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (b * b - a * a) / den
    diag[0] = (b - a) / (ab + 2)

    kk = np.arange(1, n, dtype=float)
    off = np.empty(n - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        off[:] = (
            4 * kk * (kk + a) * (kk + b) * (kk + ab)
            / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1))
        )
    if n > 1:
        # k = 1 has a removable 0/0 when a + b = -1
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
    return diag, off


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(n: int, alpha: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    a, b = 0.0, alpha
    diag, off = _jacobi_recurrence(n, a, b)
    jac = np.diag(diag) + np.diag(np.sqrt(off), 1) + np.diag(np.sqrt(off), -1)
    t, vec = np.linalg.eigh(jac)
    mu0 = 2.0 ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)
    w = mu0 * vec[0, :] ** 2
    # one Newton polish step on the eigenvalues through the three-term recurrence
    t = _polish_nodes(t, diag, off)
    nodes = 0.5 * (1.0 + t)
    weights = w / 2.0 ** (alpha + 1.0)
    return tuple(nodes.tolist()), tuple(weights.tolist())


def _polish_nodes(t: np.ndarray, diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    n = len(diag)
    for _ in range(2):
        p_prev = np.zeros_like(t)
        p = np.ones_like(t)
        dp_prev = np.zeros_like(t)
        dp = np.zeros_like(t)
        for k in range(n):
            bk = off[k - 1] if k > 0 else 0.0
            p_next = (t - diag[k]) * p - bk * p_prev
            dp_next = p + (t - diag[k]) * dp - bk * dp_prev
            p_prev, p = p, p_next
            dp_prev, dp = dp, dp_next
        step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        t = t - step
    return t


def gauss_jacobi_rule(n: int, alpha: float) -> QuadratureRule:
    """``n``-point Gauss rule for the weight ``y**alpha`` on ``(0, 1)``.

    Nodes come from the eigenvalues of the Jacobi matrix (Golub-Welsch),
    exact for polynomials of degree ``2n - 1``.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not (-1.0 < alpha < 1.0):
        raise ValueError(f"weight exponent must lie in (-1, 1), got {alpha!r}")
    nodes, weights = _gauss_jacobi_cached(int(n), float(alpha))
    x = np.array(nodes)
    w = np.array(weights)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, float(alpha))


@lru_cache(maxsize=128)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


# ---------------------------------------------------------------------------
# hierarchic basis on the reference element (-1, 1)


def legendre_table(n: int, t: np.ndarray) -> np.ndarray:
    """Rows ``P_0(t), ..., P_n(t)``."""
    t = np.asarray(t, dtype=float)
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = t
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out


def hierarchic_basis(p: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and t-derivatives of ``[N0, N1, phi_2, ..., phi_p]``.

    ``N0, N1`` are the vertex hats, ``phi_k = (P_k - P_{k-2}) / sqrt(2(2k-1))``
    the integrated Legendre bubbles.
    """
    t = np.asarray(t, dtype=float)
    leg = legendre_table(max(p, 1), t)
    val = np.empty((p + 1,) + t.shape)
    der = np.empty_like(val)
    val[0] = 0.5 * (1.0 - t)
    val[1] = 0.5 * (1.0 + t)
    der[0] = -0.5
    der[1] = 0.5
    for k in range(2, p + 1):
        c = math.sqrt(2.0 * (2 * k - 1))
        val[k] = (leg[k] - leg[k - 2]) / c
        der[k] = math.sqrt((2 * k - 1) / 2.0) * leg[k - 1]
    return val, der


# ---------------------------------------------------------------------------
# meshes


@dataclass(frozen=True)
class Mesh:
    """Partition of ``(0, breakpoints[-1])`` with one degree per element."""

    breakpoints: tuple[float, ...]
    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        bp = self.breakpoints
        if len(bp) != len(self.degrees) + 1:
            raise ValueError("need exactly one degree per element")
        if bp[0] != 0.0:
            raise ValueError("innermost element must touch y = 0")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(p < 1 for p in self.degrees):
            raise ValueError("degrees must be positive")

    @property
    def n_elements(self) -> int:
        return len(self.degrees)

    @property
    def length(self) -> float:
        return self.breakpoints[-1]

    def element(self, j: int) -> tuple[float, float]:
        return self.breakpoints[j], self.breakpoints[j + 1]

    def locate(self, y: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.breakpoints), y, side="right") - 1
        return np.clip(idx, 0, self.n_elements - 1)

    def enriched(self, extra: int = 1) -> "Mesh":
        return Mesh(self.breakpoints, tuple(p + extra for p in self.degrees))


@dataclass(frozen=True)
class GeometricMesh(Mesh):
    """Mesh of ``(0, Y)`` graded toward 0 with ratio ``sigma``."""

    cutoff: float = 1.0
    sigma: float = 0.5
    layers: int = 1


def geometric_mesh(Y: float, sigma: float = 0.5, L: int = 10, degree_slope: float = 1.0) -> GeometricMesh:
    """Breakpoints ``0, Y sigma^(L-1), ..., Y sigma, Y``.

    Element ``j`` (``j = 1`` touches 0) carries degree
    ``max(1, round(degree_slope * j))``.
    """
    if not (Y > 0 and math.isfinite(Y)):
        raise ValueError(f"cutoff must be positive and finite, got {Y!r}")
    if not (0.0 < sigma < 1.0):
        raise ValueError(f"sigma must lie in (0, 1), got {sigma!r}")
    if L < 1:
        raise ValueError(f"need at least one layer, got {L}")
    if degree_slope < 0:
        raise ValueError("degree_slope must be nonnegative")
    bp = [0.0] + [Y * sigma ** (L - 1 - k) for k in range(L)]
    bp[-1] = float(Y)
    degrees = tuple(max(1, int(round(degree_slope * j))) for j in range(1, L + 1))
    return GeometricMesh(tuple(bp), degrees, cutoff=float(Y), sigma=float(sigma), layers=int(L))


# ---------------------------------------------------------------------------
# piecewise polynomials


@dataclass(frozen=True)
class PiecewiseFunction:
    """Elementwise polynomial in the hierarchic basis.

    ``coefficients[j]`` holds ``[left vertex, right vertex, bubbles...]`` of
    element ``j``.
    """

    mesh: Mesh
    coefficients: tuple[np.ndarray, ...]
    continuous: bool = True

    def __post_init__(self) -> None:
        if len(self.coefficients) != self.mesh.n_elements:
            raise ValueError("one coefficient vector per element required")
        for c, p in zip(self.coefficients, self.mesh.degrees):
            if len(c) != p + 1:
                raise ValueError("coefficient length must be degree + 1")
        if self.continuous:
            for j in range(self.mesh.n_elements - 1):
                left = self.coefficients[j][1]
                right = self.coefficients[j + 1][0]
                if abs(left - right) > 1e-12 * max(1.0, abs(left)):
                    raise ValueError(f"traces disagree at breakpoint {j + 1}")

    @classmethod
    def from_callable(
        cls, mesh: Mesh, func: Callable[[np.ndarray], np.ndarray], continuous: bool = True
    ) -> "PiecewiseFunction":
        """Interpolate ``func`` at interior Gauss points of every element.

        Exact (up to rounding) when ``func`` is a polynomial of the element
        degree on each element.
        """
        coeffs = []
        for j, p in enumerate(mesh.degrees):
            a, b = mesh.element(j)
            t, _ = _leggauss(p + 1)
            vals, _ = hierarchic_basis(p, t)
            rhs = np.asarray(func(a + 0.5 * (b - a) * (1.0 + t)), dtype=float)
            coeffs.append(np.linalg.solve(vals.T, rhs))
        if continuous:
            # remove interpolation round-off at shared vertices
            for j in range(len(coeffs) - 1):
                v = 0.5 * (coeffs[j][1] + coeffs[j + 1][0])
                coeffs[j][1] = v
                coeffs[j + 1][0] = v
        return cls(mesh, tuple(coeffs), continuous)

    @classmethod
    def from_global(cls, mesh: Mesh, vector: np.ndarray) -> "PiecewiseFunction":
        """Split a global vector ordered [vertices..., bubbles per element...]."""
        n_el = mesh.n_elements
        offset = n_el + 1
        coeffs = []
        for j, p in enumerate(mesh.degrees):
            c = np.empty(p + 1)
            c[0] = vector[j]
            c[1] = vector[j + 1]
            c[2:] = vector[offset : offset + p - 1]
            offset += p - 1
            coeffs.append(c)
        return cls(mesh, tuple(coeffs), True)

    def _eval(self, y, order: int) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty_like(y)
        idx = self.mesh.locate(y)
        for j in np.unique(idx):
            mask = idx == j
            a, b = self.mesh.element(j)
            h = b - a
            t = 2.0 * (y[mask] - a) / h - 1.0
            vals, ders = hierarchic_basis(self.mesh.degrees[j], t)
            if order == 0:
                out[mask] = self.coefficients[j] @ vals
            else:
                out[mask] = (2.0 / h) * (self.coefficients[j] @ ders)
        return out

    def __call__(self, y):
        out = self._eval(y, 0)
        return out if np.ndim(y) else float(out[0])

    def derivative(self, y):
        out = self._eval(y, 1)
        return out if np.ndim(y) else float(out[0])

    def __mul__(self, c: float) -> "PiecewiseFunction":
        return PiecewiseFunction(self.mesh, tuple(c * x for x in self.coefficients), self.continuous)

    __rmul__ = __mul__


def _inner_rule_integral(F: Callable[[np.ndarray], np.ndarray], h: float, exponent: float, degree: int) -> float:
    """``int_0^h y**exponent F(y) dy`` for polynomial ``F`` of ``degree``."""
    k = 0
    r = exponent
    if r >= 1.0:
        k = int(math.floor(r))
        r -= k
    n = (degree + k) // 2 + 1
    rule = gauss_jacobi_rule(n, r)
    u = np.asarray(rule.nodes)
    y = h * u
    return h ** (1.0 + exponent) * float(np.dot(rule.weights, u**k * F(y)))


def weighted_norm_sq(f: PiecewiseFunction, exponent: float, derivative: bool = False) -> float:
    """``int y**exponent |f|^2 dy`` (or of ``|f'|^2`` with ``derivative=True``).

    The element touching 0 uses the Gauss-Jacobi rule for the singular
    weight; the others use Gauss-Legendre with the weight folded into the
    integrand.
    """
    ev = f.derivative if derivative else f
    total = 0.0
    for j, p in enumerate(f.mesh.degrees):
        a, b = f.mesh.element(j)
        deg = 2 * (p - 1) if derivative else 2 * p
        if a == 0.0:
            if exponent <= -1.0:
                at0 = ev(np.array([0.0]))[0]
                scale = max(1.0, float(np.max(np.abs(f.coefficients[j]))))
                if abs(at0) > 1e-13 * scale:
                    raise IntegrabilityError(
                        f"y**{exponent} |f|^2 is not integrable at 0 unless f(0) = 0"
                    )
                if exponent + 2.0 <= -1.0:
                    raise IntegrabilityError(f"exponent {exponent} too singular")
                # f = y g with g polynomial of degree one lower
                total += _inner_rule_integral(lambda y: (ev(y) / y) ** 2, b, exponent + 2.0, max(deg - 2, 0))
            else:
                total += _inner_rule_integral(lambda y: ev(y) ** 2, b, exponent, deg)
        else:
            t, w = _leggauss(p + 1 + DEGREE_PADDING)
            y = a + 0.5 * (b - a) * (1.0 + t)
            total += 0.5 * (b - a) * float(np.dot(w, y**exponent * ev(y) ** 2))
    return total


def reflect_extend(f: PiecewiseFunction, Y: float) -> PiecewiseFunction:
    """Extend ``f`` from ``(0, Y)`` to ``(0, 3Y/2)`` by ``W(y) = f(2Y - y)``."""
    if not math.isclose(f.mesh.length, Y, rel_tol=1e-14):
        raise ValueError("f must be defined on (0, Y)")
    bp = list(f.mesh.breakpoints)
    degs = list(f.mesh.degrees)
    half = 0.5 * Y
    mirrored = [2 * Y - x for x in reversed(bp) if half < x < Y]
    new_bp = bp + mirrored + [1.5 * Y]
    new_degs = list(degs)
    for lo, hi in zip(new_bp[len(bp) - 1 :], new_bp[len(bp) :]):
        src = f.mesh.locate(np.array([2 * Y - 0.5 * (lo + hi)]))[0]
        new_degs.append(degs[src])
    mesh = Mesh(tuple(new_bp), tuple(new_degs))

    def extended(y: np.ndarray) -> np.ndarray:
        return f(np.where(y <= Y, y, 2 * Y - y))

    return PiecewiseFunction.from_callable(mesh, extended, continuous=f.continuous)


def mesh_from_breakpoints(breakpoints: Sequence[float], degrees: Sequence[int]) -> Mesh:
    return Mesh(tuple(float(b) for b in breakpoints), tuple(int(p) for p in degrees))
