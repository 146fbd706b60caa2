r"""Closed-form mode solutions through modified Bessel functions.

For constant coefficients a Fourier mode :math:`\lambda = |\xi|` of the
extension solves :math:`(y^\alpha w')' = \lambda^2 y^\alpha w`, whose
solutions are spanned by :math:`(\lambda y)^\beta K_\beta(\lambda y)` and
:math:`(\lambda y)^\beta I_\beta(\lambda y)`.  This module evaluates
:math:`I_\nu, K_\nu` for real order (Temme series below ``XMIN``, Steed's
continued fraction above it, :math:`I_\nu` from its continued fraction and
the Wronskian) and builds the exact full-space and Neumann-truncated
profiles from them.  Everything is computed with exponentially scaled
functions so the profiles never overflow; :func:`bessel_ik` itself keeps the
unscaled interface and refuses arguments above :data:`X_OVERFLOW`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import FracParams

X_OVERFLOW = 600.0
XMIN = 2.0
MAX_DERIVATIVE = 12

_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 100000
_EULER = 0.57721566490153286061
# zeta(3), zeta(5), ..., zeta(13)
_ZETA_ODD = (
    1.2020569031595942854,
    1.0369277551433699263,
    1.0083492773819228268,
    1.0020083928260822144,
    1.0004941886041194646,
    1.0001227133475784891,
)


def _zeta_odd(k: int) -> float:
    j = (k - 3) // 2
    if j < len(_ZETA_ODD):
        return _ZETA_ODD[j]
    return 1.0 + 2.0**-k + 3.0**-k + 4.0**-k + 5.0**-k


def _temme_gammas(x: float) -> tuple[float, float, float, float]:
    """``gam1, gam2, 1/Gamma(1+x), 1/Gamma(1-x)`` for ``|x| <= 1/2``.

    With ``A, B`` the even and odd parts of ``log Gamma(1+x)`` the four
    quantities are ``exp(-A) * (sinh(B)/x, cosh(B), exp(-B), exp(B))``; the odd
    part is summed from its Taylor series near 0 to avoid cancellation.
    """
    if x == 0.0:
        return -_EULER, 1.0, 1.0, 1.0
    px = math.pi * x
    e_minus_a = math.sqrt(math.sin(px) / px)
    if abs(x) < 0.2:
        b = -_EULER * x
        x2 = x * x
        term = x
        for k in range(3, 40, 2):
            term *= x2
            inc = _zeta_odd(k) * term / k
            b -= inc
            if abs(inc) < 1e-18 * abs(b):
                break
    else:
        b = 0.5 * (math.lgamma(1.0 + x) - math.lgamma(1.0 - x))
    gam1 = e_minus_a * math.sinh(b) / x
    gam2 = e_minus_a * math.cosh(b)
    return gam1, gam2, e_minus_a * math.exp(-b), e_minus_a * math.exp(b)


def ik_scaled(nu: float, x: float) -> tuple[float, float, float, float]:
    r"""Scaled modified Bessel functions of order ``nu >= 0``.

    Returns :math:`e^{-x} I_\nu, e^{x} K_\nu, e^{-x} I_\nu', e^{x} K_\nu'`.
    """
    if nu < 0:
        raise ValueError(f"order must be nonnegative, got {nu!r}")
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"argument must be positive and finite, got {x!r}")
    nl = int(nu + 0.5)
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi

    # CF1: I'_nu / I_nu (modified Lentz)
    h = max(nu * xi, _FPMIN)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(_MAXIT):
        b += xi2
        d = 1.0 / (b + d)
        c = b + 1.0 / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:  # pragma: no cover - x < 1e5 converges long before
        raise ArithmeticError("CF1 failed to converge")

    # downward recurrence to |mu| <= 1/2, unnormalised
    ril = _FPMIN
    ripl = h * ril
    ril1, rip1 = ril, ripl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        ritemp = fact * ril + ripl
        fact -= xi
        ripl = fact * ritemp + ril
        ril = ritemp
        if abs(ril) > 1e250:
            ril *= 1e-250
            ripl *= 1e-250
            ril1 *= 1e-250
            rip1 *= 1e-250
    f = ripl / ril

    if x < XMIN:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(xmu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * _EPS:
                break
        scale = math.exp(x)
        rkmu = total * scale
        rk1 = total1 * xi2 * scale
    else:
        # Steed's CF2 (Thompson-Barnett), already carries exp(-x)
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = delh = d
        q1, q2 = 0.0, 1.0
        a1 = 0.25 - xmu2
        q = c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, _MAXIT):
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1, q2 = q2, qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) < _EPS:
                break
        h = a1 * h
        rkmu = math.sqrt(math.pi / (2.0 * x)) / s
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi

    rkmup = xmu * xi * rkmu - rk1
    rimu = xi / (f * rkmu - rkmup)
    ri = rimu * ril1 / ril
    rip = rimu * rip1 / ril
    for i in range(1, nl + 1):
        rktemp = (xmu + i) * xi2 * rk1 + rkmu
        rkmu, rk1 = rk1, rktemp
    rk = rkmu
    rkp = nu * xi * rkmu - rk1
    return ri, rk, rip, rkp


@dataclass(frozen=True)
class BesselPair:
    """``I_nu(x), K_nu(x)`` and their x-derivatives."""

    nu: float
    x: float
    I: float
    K: float
    dI: float
    dK: float

    @property
    def wronskian(self) -> float:
        """``I K' - I' K``; equals ``-1/x`` exactly."""
        return self.I * self.dK - self.dI * self.K


def bessel_ik(nu: float, x: float) -> BesselPair:
    """Unscaled ``I_nu, K_nu`` for ``0 < nu < 1`` and ``0 < x <= 600``."""
    if not (0.0 < nu < 1.0):
        raise ValueError(f"order must lie in (0, 1), got {nu!r}")
    if x > X_OVERFLOW:
        raise OverflowError(f"x = {x} exceeds the overflow guard {X_OVERFLOW}")
    si, sk, sip, skp = ik_scaled(nu, x)
    up, down = math.exp(x), math.exp(-x)
    return BesselPair(nu, x, si * up, sk * down, sip * up, skp * down)


# ---------------------------------------------------------------------------
# mode profiles


def _neumann_ratio(beta: float, X: float) -> tuple[float, float, float]:
    """Scaled pieces at the cutoff ``X = lambda Y``.

    Returns ``(q, r_s, one_minus_q)`` where ``q = I_{1-b}(X)/I_{b-1}(X)``,
    ``r = K_{1-b}(X)/I_{b-1}(X) = r_s exp(-2X)`` and ``1 - q = kappa r``.
    """
    si, sk, _, _ = ik_scaled(1.0 - beta, X)
    kappa = 2.0 * math.sin(math.pi * beta) / math.pi
    e2 = math.exp(-2.0 * X)
    i_neg = si + kappa * sk * e2  # scaled I_{beta-1}
    q = si / i_neg
    r_s = sk / i_neg
    return q, r_s, kappa * r_s * e2


def dtn_symbol(lam: float, Y: float, params: FracParams) -> float:
    r"""Normalised Dirichlet-to-Neumann symbol of one mode.

    ``lam**(2 beta)`` for ``Y = inf``; for a finite cutoff with a Neumann
    condition at ``Y`` it is ``lam**(2 beta) I_{1-beta}(lam Y) / I_{beta-1}(lam Y)``.
    Above ``lam Y = 600`` the full-space value is returned; the neglected
    correction is below ``lam**(2 beta) exp(-2 lam Y)``.
    """
    if lam <= 0:
        raise ValueError("dtn_symbol needs lam > 0")
    full = lam ** (2.0 * params.beta)
    if math.isinf(Y) or lam * Y > X_OVERFLOW:
        return full
    if Y <= 0:
        raise ValueError("cutoff must be positive")
    q, _, _ = _neumann_ratio(params.beta, lam * Y)
    return full * q


def trace_gap(lam: float, Y: float, params: FracParams) -> float:
    """``dtn(lam, inf) - dtn(lam, Y)`` without cancellation."""
    if math.isinf(Y) or lam * Y > X_OVERFLOW:
        return 0.0
    _, _, one_minus_q = _neumann_ratio(params.beta, lam * Y)
    return lam ** (2.0 * params.beta) * one_minus_q


def _k_limit(beta: float) -> float:
    """``lim_{x->0} x**beta K_beta(x) = 2**(beta-1) Gamma(beta)``."""
    return 2.0 ** (beta - 1.0) * math.gamma(beta)


@dataclass(frozen=True)
class ModeProfile:
    r"""Exact mode solution ``w = c_K (lam y)^b K_b(lam y) + c_I (lam y)^b I_b(lam y)``.

    ``c_I`` is stored through ``r_scaled = c_I / c_K * exp(2 lam Y)`` so that
    large cutoffs never overflow.
    """

    lam: float
    params: FracParams
    cutoff: float
    fhat: float
    c_K: float
    r_scaled: float
    symbol: float

    @property
    def c_I(self) -> float:
        if math.isinf(self.cutoff):
            return 0.0
        return self.c_K * self.r_scaled * math.exp(-2.0 * self.lam * self.cutoff)

    @property
    def trace(self) -> float:
        return self.fhat / (self.params.s + self.symbol)


def mode_profile(lam: float, Y: float, params: FracParams, fhat: float = 1.0) -> ModeProfile:
    """Exact solution of the mode problem with datum ``fhat``."""
    if lam <= 0:
        raise ValueError("the Bessel representation needs lam > 0")
    beta = params.beta
    if math.isinf(Y) or lam * Y > X_OVERFLOW:
        symbol = lam ** (2.0 * beta)
        r_s = 0.0
        Y_eff = math.inf
    else:
        q, r_s, _ = _neumann_ratio(beta, lam * Y)
        symbol = lam ** (2.0 * beta) * q
        Y_eff = Y
    trace = fhat / (params.s + symbol)
    return ModeProfile(lam, params, Y_eff, fhat, trace / _k_limit(beta), r_s, symbol)


@lru_cache(maxsize=64)
def _derivative_terms(ell: int, kind: str) -> tuple[tuple[int, int, float], ...]:
    """Expansion of ``d^ell/dx^ell [x^b Z_b(x)]`` as ``sum c x^(b-j) Z_(b-k)``.

    Uses ``d/dx[x^p K_q] = (p-q) x^(p-1) K_q - x^p K_(q-1)`` and the same with
    ``+`` for ``I``.  Since ``p - q = k - j`` the coefficients are integers.
    """
    sign = -1.0 if kind == "K" else 1.0
    terms: dict[tuple[int, int], float] = {(0, 0): 1.0}
    for _ in range(ell):
        nxt: dict[tuple[int, int], float] = {}
        for (j, k), c in terms.items():
            if k != j:
                nxt[(j + 1, k)] = nxt.get((j + 1, k), 0.0) + c * (k - j)
            nxt[(j, k + 1)] = nxt.get((j, k + 1), 0.0) + sign * c
        terms = {key: c for key, c in nxt.items() if c != 0.0}
    return tuple((j, k, c) for (j, k), c in sorted(terms.items()))


def _order_tables(beta: float, x: float, kmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Scaled ``K_{beta-k}(x)`` and ``I_{beta-k}(x)`` for ``k = 0..kmax``."""
    kappa = 2.0 * math.sin(math.pi * beta) / math.pi
    e2 = math.exp(-2.0 * x)
    Ks = np.empty(kmax + 1)
    Is = np.empty(kmax + 1)
    si, sk, _, _ = ik_scaled(beta, x)
    Ks[0], Is[0] = sk, si
    for k in range(1, kmax + 1):
        si, sk, _, _ = ik_scaled(k - beta, x)
        Ks[k] = sk
        # I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu with nu = k - beta
        Is[k] = si + (-1) ** (k + 1) * kappa * sk * e2
    return Ks, Is


SERIES_X = 8.0
_SERIES_TERMS = 60


@lru_cache(maxsize=64)
def _series_coefficients(beta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Ascending series ``x^b K_b = F (sum a_m x^(2m) - sum c_m x^(2m + 2b))``
    with ``F = pi / (2 sin(pi b))`` and ``x^b I_b = sum c_m x^(2m + 2b)``.

    Returns ``(even powers, a, shifted powers, c)``.
    """
    m = np.arange(_SERIES_TERMS)
    log_fact = np.array([math.lgamma(k + 1) for k in m])
    c = np.exp(-(beta + 2.0 * m) * math.log(2.0) - log_fact - np.array([math.lgamma(k + 1 + beta) for k in m]))
    a = np.exp((beta - 2.0 * m) * math.log(2.0) - log_fact - np.array([math.lgamma(k + 1 - beta) for k in m]))
    return 2.0 * m, a, 2.0 * m + 2.0 * beta, c


def _series_terms(powers: np.ndarray, coef: np.ndarray, ell: int, x: float) -> np.ndarray:
    """Terms of ``d^ell/dx^ell sum coef x^powers``; integer powers below
    ``ell`` drop out exactly."""
    falling = np.ones_like(powers)
    for i in range(ell):
        falling = falling * (powers - i)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(falling != 0.0, coef * falling * x ** (powers - ell), 0.0)


def _series_branch(profile: ModeProfile, ell: int, x: float) -> tuple[float, float]:
    """Value and sum of absolute terms of the unit-``c_K`` derivative in ``x``."""
    beta = profile.params.beta
    even, a, odd, c = _series_coefficients(beta)
    factor = math.pi / (2.0 * math.sin(math.pi * beta))
    ratio = profile.c_I / profile.c_K if profile.c_K != 0.0 else 0.0
    ta = _series_terms(even, a, ell, x)
    tc = _series_terms(odd, c, ell, x)
    value = factor * float(ta.sum()) + (ratio - factor) * float(tc.sum())
    mag = factor * float(np.abs(ta).sum()) + abs(ratio - factor) * float(np.abs(tc).sum())
    return value, mag


def _profile_derivatives(profile: ModeProfile, ells: list[int], y: float) -> list[float]:
    """Derivatives in ``y`` of the exact profile.

    Two representations are available: the Bessel recurrence expansion and,
    for ``x = lam y < SERIES_X``, the termwise differentiated ascending
    series.  Both are cancellation-prone in different regimes (the
    recurrence at small ``x`` and high order, the series at large ``x``), so
    each derivative takes the one whose computed condition number
    ``sum |terms| / |sum|`` is smaller.
    """
    beta = profile.params.beta
    lam = profile.lam
    x = lam * y
    kmax = max(ells)
    Ks, Is = _order_tables(beta, x, kmax)
    finite = not math.isinf(profile.cutoff)
    exp_k = math.exp(-x)
    exp_i = math.exp(x - 2.0 * lam * profile.cutoff) if finite else 0.0
    out = []
    for ell in ells:
        tk = [c * x ** (beta - j) * Ks[k] * exp_k for j, k, c in _derivative_terms(ell, "K")]
        val, mag = math.fsum(tk), math.fsum(abs(v) for v in tk)
        if finite and profile.r_scaled != 0.0:
            ti = [profile.r_scaled * c * x ** (beta - j) * Is[k] * exp_i for j, k, c in _derivative_terms(ell, "I")]
            val += math.fsum(ti)
            mag += math.fsum(abs(v) for v in ti)
        if x < SERIES_X and mag > 0:
            s_val, s_mag = _series_branch(profile, ell, x)
            # compare mag/|val| across branches without dividing by zero
            if s_mag * abs(val) < mag * abs(s_val):
                val = s_val
        out.append(profile.c_K * lam**ell * val)
    return out


def mode_profile_eval(profile: ModeProfile, y) -> float | np.ndarray:
    """Value of the exact mode solution at ``y > 0`` (``y = 0`` gives the trace)."""
    return mode_profile_derivative(profile, 0, y)


def mode_profile_derivative(profile: ModeProfile, ell: int, y) -> float | np.ndarray:
    """``ell``-th y-derivative of the exact mode solution."""
    if not (0 <= ell <= MAX_DERIVATIVE):
        raise ValueError(f"derivative order must lie in [0, {MAX_DERIVATIVE}], got {ell}")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys < 0) or np.any(ys > profile.cutoff * (1 + 1e-14)):
        raise ValueError("y must lie in (0, Y]")
    out = np.empty_like(ys)
    for i, yi in enumerate(ys):
        if yi == 0.0:
            if ell != 0:
                raise ValueError("derivatives are singular at y = 0")
            out[i] = profile.trace
        else:
            out[i] = _profile_derivatives(profile, [ell], float(yi))[0]
    return out if np.ndim(y) else float(out[0])


def profile_derivative_table(profile: ModeProfile, ell_max: int, y: float) -> np.ndarray:
    """All derivatives ``0..ell_max`` at one point, sharing the Bessel evaluations."""
    if not (0 <= ell_max <= MAX_DERIVATIVE):
        raise ValueError(f"derivative order must lie in [0, {MAX_DERIVATIVE}]")
    return np.array(_profile_derivatives(profile, list(range(ell_max + 1)), y))


# ---------------------------------------------------------------------------
# closed-form per-mode functionals (unit datum)


def solution_norms(lam: float, Y: float, params: FracParams) -> tuple[float, float]:
    """``(energy, trace**2)`` of the unit-datum mode solution on ``(0, Y)``.

    Testing the weak form with the solution itself gives
    ``energy + s d_b w(0)^2 = d_b w(0)`` with ``w(0) = 1/(s + symbol)``.
    """
    s = params.s
    if lam == 0.0:
        if s == 0:
            raise ZeroDivisionError("mode lam = 0 has no solution for s = 0")
        return 0.0, 1.0 / s**2
    a = dtn_symbol(lam, Y, params)
    w0 = 1.0 / (s + a)
    return params.d_beta * a * w0 * w0, w0 * w0


def _profile_at(profile: ModeProfile, y: float) -> tuple[float, float]:
    vals = _profile_derivatives(profile, [0, 1], y)
    return vals[0], vals[1]


def pair_difference(lam: float, Y_small: float, Y_big: float, params: FracParams) -> tuple[float, float]:
    r"""``(energy, trace**2)`` of ``w_{Y_small} - w_{Y_big}`` on ``(0, Y_small)``.

    ``w_{Y_big}`` solves the mode equation on ``(0, Y_small)`` with the same
    Robin condition but a nonzero flux at ``Y_small``; hence the difference
    ``e`` satisfies ``A(e, e) = -Y^alpha w_big'(Y) e(Y)`` with ``Y = Y_small``.
    ``Y_big`` may be infinite.
    """
    if not (0 < Y_small < Y_big):
        raise ValueError("need 0 < Y_small < Y_big")
    s, beta = params.s, params.beta
    if lam == 0.0:
        return 0.0, 0.0
    X = lam * Y_small
    if X > X_OVERFLOW:
        return 0.0, 0.0
    full = lam ** (2.0 * beta)
    q_a, r_a, gap_a = _neumann_ratio(beta, X)
    a_a = full * q_a
    if math.isinf(Y_big) or lam * Y_big > X_OVERFLOW:
        a_b, r_b, Yb_eff = full, 0.0, math.inf
        sym_gap = full * gap_a
        exp_b = 0.0
    else:
        q_b, r_b, gap_b = _neumann_ratio(beta, lam * Y_big)
        a_b = full * q_b
        sym_gap = full * ((gap_a - gap_b) if q_a > 0.5 else (q_b - q_a))
        Yb_eff = Y_big
        exp_b = math.exp(-2.0 * lam * Y_big)
    g0 = _k_limit(beta)
    cK_a = 1.0 / ((s + a_a) * g0)
    cK_b = 1.0 / ((s + a_b) * g0)
    dcK = sym_gap / ((s + a_a) * (s + a_b) * g0)
    e0 = sym_gap / ((s + a_a) * (s + a_b))

    Ks, Is = _order_tables(beta, X, 1)
    xb = X**beta
    phiK = xb * Ks[0] * math.exp(-X)
    # c_I phi_I, each with its own exponential factor
    ci_a = cK_a * r_a * xb * Is[0] * math.exp(-X)
    ci_b = cK_b * r_b * xb * Is[0] * (math.exp(X) * exp_b if exp_b else 0.0)
    eY = dcK * phiK + (ci_a - ci_b)

    profile_b = ModeProfile(lam, params, Yb_eff, 1.0, cK_b, r_b, a_b)
    _, dwb = _profile_at(profile_b, Y_small)
    total = -(Y_small**params.alpha) * dwb * eY
    energy = total - s * params.d_beta * e0 * e0
    return float(max(energy, 0.0)), float(e0 * e0)


def truncation_error(lam: float, Y: float, params: FracParams) -> tuple[float, float]:
    """``(energy, trace**2)`` of ``w_Y - w_inf`` on ``(0, Y)``; zero for ``Y = inf``."""
    if math.isinf(Y):
        return 0.0, 0.0
    return pair_difference(lam, Y, math.inf, params)
