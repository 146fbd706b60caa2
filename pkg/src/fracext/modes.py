"""hp-FEM for the one-dimensional mode problem

    find w:  int_0^Y y^a (w' v' + lam^2 w v) dy + s d_b w(0) v(0) = d_b fhat v(0)

on a geometric mesh of ``(0, Y)``.  The Neumann condition at ``Y`` is
natural; ``Y = inf`` is replaced by a finite proxy cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import bessel
from .core import FracParams, SingularSystemError
from .quadrature import (
    DEGREE_PADDING,
    GeometricMesh,
    Mesh,
    PiecewiseFunction,
    _leggauss,
    gauss_jacobi_rule,
    geometric_mesh,
    hierarchic_basis,
)


@dataclass(frozen=True)
class MeshControls:
    """Geometric mesh recipe.

    With ``layers=None`` the innermost element is shrunk until the energy
    carried by the ``y^(2 beta)`` singular part on it, roughly
    ``h^(2 beta)``, drops below ``inner_tol``.
    """

    sigma: float = 0.15
    layers: int | None = None
    degree_slope: float = 0.5
    inner_tol: float = 1e-14
    min_layers: int = 30
    max_layers: int = 80

    def layer_count(self, beta: float) -> int:
        if self.layers is not None:
            return self.layers
        exponent = 2.0 * min(beta, 0.5)
        L = int(math.ceil(math.log(self.inner_tol) / (exponent * math.log(self.sigma))))
        return min(max(L, self.min_layers), self.max_layers)

    def build(self, Y: float, beta: float = 0.5) -> GeometricMesh:
        return geometric_mesh(Y, self.sigma, self.layer_count(beta), self.degree_slope)


def proxy_cutoff(lam: float) -> float:
    """Finite stand-in for ``Y = inf``; the mode tail decays like ``exp(-lam y)``,
    so ``lam Y = 40`` leaves a relative truncation error near ``exp(-80)``."""
    return 40.0 / lam if lam > 0 else math.inf


@dataclass(frozen=True)
class ModeProblem:
    lam: float
    params: FracParams
    cutoff: float
    fhat: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if math.isinf(self.cutoff) and self.lam == 0 and self.params.s == 0:
            raise ValueError("lam = 0, s = 0 has no finite-energy mode solution")


@dataclass(frozen=True)
class ModeSystem:
    stiffness: np.ndarray
    mass: np.ndarray
    matrix: np.ndarray
    load: np.ndarray
    mesh: Mesh


@dataclass(frozen=True)
class ModeSolution:
    problem: ModeProblem
    mesh: Mesh
    coefficients: PiecewiseFunction
    trace0: float
    energy_sq: float
    residual: float = field(default=0.0)
    # solver unknowns in the assembly basis (None for the analytic constant mode)
    dofs: np.ndarray | None = field(default=None, repr=False, compare=False)


def _element_matrices(a: float, b: float, p: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``int y^a u' v' dy`` and ``int y^a u v dy`` on ``(a, b)``.

    Local basis ``[N0, 1, phi_2, ..., phi_p]``: the left hat, the constant
    and the integrated Legendre bubbles.
    """
    h = b - a
    if a == 0.0:
        rule = gauss_jacobi_rule(p + 1, alpha)
        u = np.asarray(rule.nodes)
        t = 2.0 * u - 1.0
        # int_{-1}^{1} y^a F dt = 2 h^a int_0^1 u^a F(2u-1) du
        wq = 2.0 * h**alpha * np.asarray(rule.weights)
    else:
        t, w = _leggauss(p + 1 + DEGREE_PADDING)
        y = a + 0.5 * h * (1.0 + t)
        wq = w * y**alpha
    vals, ders = hierarchic_basis(p, t)
    vals[1] = 1.0
    ders[1] = 0.0
    stiff = (2.0 / h) * (ders * wq) @ ders.T
    mass = (0.5 * h) * (vals * wq) @ vals.T
    return stiff, mass


def _bubble_offsets(mesh: Mesh) -> list[np.ndarray]:
    offset = mesh.n_elements + 1
    out = []
    for p in mesh.degrees:
        out.append(np.arange(offset, offset + p - 1))
        offset += p - 1
    return out


def assemble_mode_system(mesh: Mesh, prob: ModeProblem) -> ModeSystem:
    """Stiffness, mass, Robin term and load for one mode.

    Vertex unknowns use the cumulative basis ``psi_i`` (one on ``(0, y_i)``,
    linear decay on element ``i``, zero beyond; ``psi_L = 1``).  Their
    gradients have disjoint supports and all of them have unit trace, so the
    tiny elements near 0 cannot swamp the Robin and mass terms.  Bubbles
    follow the vertex block element by element.
    """
    params = prob.params
    if not math.isinf(prob.cutoff) and not math.isclose(mesh.length, prob.cutoff, rel_tol=1e-12):
        raise ValueError("mesh must cover (0, Y)")
    if prob.lam == 0 and params.s == 0:
        raise SingularSystemError("lam = s = 0 leaves the constants in the kernel")
    n_el = mesh.n_elements
    n = n_el + 1 + sum(p - 1 for p in mesh.degrees)
    S = np.zeros((n, n))
    M = np.zeros((n, n))
    bubbles = _bubble_offsets(mesh)
    for j, p in enumerate(mesh.degrees):
        a, b = mesh.element(j)
        ks, km = _element_matrices(a, b, p, params.alpha)
        const = np.arange(j + 1, n_el + 1)
        groups = [np.array([j]), const, bubbles[j]]
        local = [np.array([0]), np.array([1]), np.arange(2, p + 1)]
        # the local constant is shared by every psi_i with i > j
        for gi, li in zip(groups, local):
            for gk, lk in zip(groups, local):
                if gi.size and gk.size and li.size and lk.size:
                    S[np.ix_(gi, gk)] += _broadcast(ks, li, lk, gi, gk)
                    M[np.ix_(gi, gk)] += _broadcast(km, li, lk, gi, gk)
    K = S + prob.lam**2 * M
    K[: n_el + 1, : n_el + 1] += params.s * params.d_beta
    F = np.zeros(n)
    F[: n_el + 1] = params.d_beta * prob.fhat
    return ModeSystem(S, M, K, F, mesh)


def _broadcast(mat: np.ndarray, li: np.ndarray, lk: np.ndarray, gi: np.ndarray, gk: np.ndarray) -> np.ndarray:
    block = mat[np.ix_(li, lk)]
    rows = gi.size if li.size == 1 else block.shape[0]
    cols = gk.size if lk.size == 1 else block.shape[1]
    return np.broadcast_to(block, (rows, cols))


def _to_hierarchic(mesh: Mesh, c: np.ndarray) -> np.ndarray:
    """Cumulative vertex coefficients to nodal values, bubbles unchanged."""
    n_v = mesh.n_elements + 1
    out = c.copy()
    out[:n_v] = np.cumsum(c[:n_v][::-1])[::-1]
    return out


def default_mesh(prob: ModeProblem, controls: MeshControls | None = None) -> GeometricMesh:
    controls = controls or MeshControls()
    Y = proxy_cutoff(prob.lam) if math.isinf(prob.cutoff) else prob.cutoff
    if math.isinf(Y):
        # lam = 0 on the half line: solved analytically, the mesh only carries the constant
        Y = 1.0
    return controls.build(Y, prob.params.beta)


def solve_mode(prob: ModeProblem, mesh: Mesh | None = None) -> ModeSolution:
    """Galerkin solution by a Cholesky solve."""
    if mesh is None:
        mesh = default_mesh(prob)
    if math.isinf(prob.cutoff) and prob.lam == 0:
        # constants carry no energy: w = fhat / s exactly
        value = prob.fhat / prob.params.s
        coeffs = PiecewiseFunction.from_callable(mesh, lambda y: np.full_like(y, value))
        return ModeSolution(prob, mesh, coeffs, value, 0.0, 0.0)
    system = assemble_mode_system(mesh, prob)
    # element sizes span many decades: equilibrate before factorising
    diag = np.diag(system.matrix)
    if np.any(diag <= 0):
        raise SingularSystemError("nonpositive diagonal; assembly is broken")
    d = 1.0 / np.sqrt(diag)
    try:
        factor = scipy.linalg.cho_factor(d[:, None] * system.matrix * d[None, :], lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("mode matrix is not SPD; assembly is broken") from exc
    c = d * scipy.linalg.cho_solve(factor, d * system.load)
    resid = np.linalg.norm(system.matrix @ c - system.load)
    scale = np.linalg.norm(system.load)
    energy = float(c @ system.stiffness @ c + prob.lam**2 * (c @ system.mass @ c))
    nodal = _to_hierarchic(mesh, c)
    return ModeSolution(
        prob,
        mesh,
        PiecewiseFunction.from_global(mesh, nodal),
        float(nodal[0]),
        energy,
        float(resid / scale) if scale else 0.0,
        c,
    )


def mode_dtn(lam: float, Y: float, params: FracParams, controls: MeshControls | None = None) -> float:
    """Symbol recovered from a unit-datum solve: ``1/w(0) - s``."""
    if lam == 0 and params.s == 0:
        raise ValueError("need lam > 0 or s > 0")
    prob = ModeProblem(lam, params, Y, 1.0)
    sol = solve_mode(prob, default_mesh(prob, controls))
    if sol.trace0 == 0:
        raise ZeroDivisionError("vanishing trace")
    return 1.0 / sol.trace0 - params.s


def mode_energy_error(
    lam: float,
    Y: float,
    params: FracParams,
    controls: MeshControls | None = None,
    mesh: Mesh | None = None,
) -> float:
    """``A^Y(w_h - w_inf, w_h - w_inf)`` for the discrete truncated solution.

    The full-space reference is the exact Bessel profile.  With Galerkin
    orthogonality and one integration by parts against the smooth ``w_inf``
    the error reduces to values at ``0`` and ``Y``:

        d_b (w_inf(0) - w_h(0)) - Y^a w_inf'(Y) (2 w_h(Y) - w_inf(Y)).
    """
    if math.isinf(Y):
        return 0.0
    if lam == 0:
        if params.s == 0:
            raise ValueError("need lam > 0 or s > 0")
        return 0.0
    prob = ModeProblem(lam, params, Y, 1.0)
    sol = solve_mode(prob, mesh if mesh is not None else default_mesh(prob, controls))
    ref = bessel.mode_profile(lam, math.inf, params)
    if lam * Y > bessel.X_OVERFLOW:
        return max(params.d_beta * (ref.trace - sol.trace0), 0.0)
    w_inf, dw_inf = bessel._profile_at(ref, Y)
    wh_Y = sol.coefficients(Y)
    val = params.d_beta * (ref.trace - sol.trace0) - Y**params.alpha * dw_inf * (2.0 * wh_Y - w_inf)
    return max(float(val), 0.0)


def galerkin_residuals(sol: ModeSolution) -> np.ndarray:
    """``(K c - F) / |F|`` against every discrete test function."""
    if sol.dofs is None:
        return np.zeros(0)
    system = assemble_mode_system(sol.mesh, sol.problem)
    scale = np.linalg.norm(system.load)
    return (system.matrix @ sol.dofs - system.load) / (scale if scale else 1.0)
