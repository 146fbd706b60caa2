import math

import mpmath

import numpy as np
import pytest
import scipy.integrate
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from fracext.bessel import (
    MAX_DERIVATIVE,
    X_OVERFLOW,
    bessel_ik,
    dtn_symbol,
    mode_profile,
    mode_profile_derivative,
    mode_profile_eval,
    pair_difference,
    profile_derivative_table,
    solution_norms,
    trace_gap,
    truncation_error,
)
from fracext.core import FracParams

NUS = np.round(np.arange(0.1, 0.91, 0.1), 2)
XS = np.logspace(-1, math.log10(50), 25)


def P(beta, s=1.0, dim=3):
    return FracParams.create(beta, s, dim)


def test_half_order_closed_forms():
    b = bessel_ik(0.5, 1.0)
    assert b.K == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-14)
    assert b.I == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-14)


@pytest.mark.parametrize("nu", NUS)
def test_wronskian_grid(nu):
    for x in XS:
        b = bessel_ik(nu, x)
        assert b.I > 0 and b.K > 0
        assert abs(x * b.wronskian + 1.0) <= 1e-10


@pytest.mark.parametrize("nu", NUS)
def test_against_scipy(nu):
    xs = np.concatenate([np.logspace(-3, 2.7, 40), [1.999, 2.0, 2.001, 7.99, 8.0, 8.01]])
    for x in xs:
        b = bessel_ik(nu, x)
        assert b.I == pytest.approx(scipy.special.iv(nu, x), rel=1e-12)
        assert b.K == pytest.approx(scipy.special.kv(nu, x), rel=1e-12)
        assert b.dI == pytest.approx(scipy.special.ivp(nu, x), rel=1e-11)
        assert b.dK == pytest.approx(scipy.special.kvp(nu, x), rel=1e-11)


def test_overflow_guard_and_order_domain():
    with pytest.raises(OverflowError):
        bessel_ik(0.3, X_OVERFLOW + 1)
    with pytest.raises(ValueError):
        bessel_ik(1.3, 1.0)


@given(st.floats(0.05, 0.95), st.floats(1e-3, 500.0))
def test_wronskian_property(nu, x):
    b = bessel_ik(nu, x)
    assert abs(x * b.wronskian + 1.0) <= 1e-10


def test_dtn_examples():
    assert dtn_symbol(3.0, math.inf, P(0.25)) == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert dtn_symbol(1.0, 1.0, P(0.5)) == pytest.approx(math.tanh(1.0), rel=1e-13)


@pytest.mark.parametrize("beta", NUS)
def test_dtn_full_space_limit_identity(beta):
    for lam in XS:
        assert abs(dtn_symbol(lam, math.inf, P(beta)) / lam ** (2 * beta) - 1) < 1e-10


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_half_order_truncated_symbol_is_tanh(lam, Y):
    assert dtn_symbol(lam, Y, P(0.5)) == pytest.approx(lam * math.tanh(lam * Y), rel=1e-12)


@given(st.floats(0.05, 0.95), st.floats(0.1, 10.0))
def test_truncated_symbol_increases_to_full(beta, lam):
    p = P(beta)
    vals = [dtn_symbol(lam, Y, p) for Y in (0.25, 0.5, 1.0, 2.0, 4.0)]
    full = lam ** (2 * beta)
    assert all(v < full * (1 + 1e-14) for v in vals)
    assert all(b >= a * (1 - 1e-13) for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_truncated_gap_decays_like_exp_minus_two_lambda_y(beta):
    p = P(beta)
    X = np.linspace(1.0, 10.0, 10)
    gap = np.array([trace_gap(1.0, x, p) for x in X])
    direct = np.array([1.0 - dtn_symbol(1.0, x, p) for x in X])
    np.testing.assert_allclose(gap[:4], direct[:4], rtol=1e-8)
    slope = np.polyfit(X, np.log(gap), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)
    C = gap * np.exp(2 * X)
    assert C.max() / C.min() < 3.0


def test_profile_half_order_examples():
    prof = mode_profile(1.0, math.inf, P(0.5, 1.0))
    ys = np.array([0.1, 0.5, 1.0, 3.0])
    np.testing.assert_allclose(mode_profile_eval(prof, ys), np.exp(-ys) / 2, rtol=1e-13)
    assert mode_profile_eval(prof, 0.0) == pytest.approx(0.5, rel=1e-15)
    assert prof.c_I == 0.0
    trunc = mode_profile(1.0, 1.0, P(0.5, 0.0))
    w = mode_profile_eval(trunc, ys[:3])
    np.testing.assert_allclose(w, np.cosh(1 - ys[:3]) / math.sinh(1.0), rtol=1e-12)
    assert abs(mode_profile_derivative(trunc, 1, 1.0)) < 1e-13


@pytest.mark.parametrize("ell", range(0, MAX_DERIVATIVE + 1))
def test_half_order_derivatives_exponential(ell):
    lam = 1.7
    prof = mode_profile(lam, math.inf, P(0.5, 1.0))
    w0 = 1 / (1 + lam)
    for y in (1e-6, 0.05, 0.7, 4.0):
        assert mode_profile_derivative(prof, ell, y) == pytest.approx(w0 * (-lam) ** ell * math.exp(-lam * y), rel=1e-11)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("Y", [1.0, 3.0, math.inf])
def test_derivatives_against_finite_differences(beta, Y):
    prof = mode_profile(1.0, Y, P(beta, 1.0))
    h, y = 1e-3, 0.7
    for ell in (1, 2):
        lo = mode_profile_derivative(prof, ell - 1, y - h)
        hi = mode_profile_derivative(prof, ell - 1, y + h)
        assert mode_profile_derivative(prof, ell, y) == pytest.approx((hi - lo) / (2 * h), rel=1e-5)
    fd2 = (mode_profile_eval(prof, y + h) - 2 * mode_profile_eval(prof, y) + mode_profile_eval(prof, y - h)) / h**2
    assert mode_profile_derivative(prof, 2, y) == pytest.approx(fd2, rel=1e-5)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_neumann_condition_at_cutoff(beta):
    for lam, Y in [(0.5, 1.0), (2.0, 3.0), (10.0, 2.0)]:
        prof = mode_profile(lam, Y, P(beta, 1.0))
        scale = abs(prof.trace) * lam
        assert abs(mode_profile_derivative(prof, 1, Y)) <= 1e-11 * scale


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("Y", [1.5, math.inf])
def test_profile_against_ode_shooting(beta, Y):
    """Integrate (y^a w')' = lam^2 y^a w from the right end towards 0."""
    p = P(beta, 0.7)
    lam = 1.3
    prof = mode_profile(lam, Y, p)
    a = p.alpha
    start = Y if math.isfinite(Y) else 6.0
    w_s = mode_profile_eval(prof, start)
    dw_s = 0.0 if math.isfinite(Y) else mode_profile_derivative(prof, 1, start)

    def rhs(y, z):
        # z = (w, y^a w')
        return [z[1] / y**a, lam**2 * y**a * z[0]]

    ys = np.array([1.0, 0.5, 0.1, 0.02, 1e-12])
    sol = scipy.integrate.solve_ivp(
        rhs, (start, 1e-12), [w_s, start**a * dw_s], t_eval=ys, rtol=1e-12, atol=1e-15, method="DOP853"
    )
    np.testing.assert_allclose(sol.y[0][:-1], mode_profile_eval(prof, ys[:-1]), rtol=1e-7)
    # w(y) - w(0) = O(y^(2 beta))
    assert sol.y[0][-1] == pytest.approx(prof.trace, rel=1e-4)
    # the Robin condition at 0: -lim y^a w' = d_b (fhat - s w(0)) = d_b symbol w(0);
    # at y the flux is off by O(y^(1 + alpha))
    flux = -sol.y[1][-1]
    np.testing.assert_allclose(flux, p.d_beta * prof.symbol * prof.trace, rtol=1e-3)


def test_derivative_table_matches_single_calls():
    prof = mode_profile(0.8, 2.0, P(0.3))
    table = profile_derivative_table(prof, 6, 0.9)
    for ell in range(7):
        assert table[ell] == pytest.approx(mode_profile_derivative(prof, ell, 0.9), rel=1e-14)


def test_derivative_depth_and_domain():
    prof = mode_profile(1.0, 2.0, P(0.3))
    with pytest.raises(ValueError):
        mode_profile_derivative(prof, MAX_DERIVATIVE + 1, 0.5)
    with pytest.raises(ValueError):
        mode_profile_derivative(prof, 1, 0.0)
    with pytest.raises(ValueError):
        mode_profile_eval(prof, 2.5)
    with pytest.raises(ValueError):
        mode_profile(0.0, 1.0, P(0.3))


def _half_order_error(lam, Y, s):
    """Energy and trace^2 of w_Y - w_inf on (0, Y) by direct integration.

    With E = exp(-2 lam Y) and D = s (1 + E) + lam (1 - E) the difference is
    e(y) = E (lam - s) exp(-lam y) / (D (s + lam)) + exp(-lam (2Y - y)) / D,
    which is free of cancellation.
    """
    E = math.exp(-2 * lam * Y)
    D = s * (1 + E) + lam * (1 - E)
    A = E * (lam - s) / (D * (s + lam))

    def e(y):
        return A * math.exp(-lam * y) + math.exp(-lam * (2 * Y - y)) / D

    def de(y):
        return -lam * A * math.exp(-lam * y) + lam * math.exp(-lam * (2 * Y - y)) / D

    val, _ = scipy.integrate.quad(lambda y: de(y) ** 2 + lam**2 * e(y) ** 2, 0, Y, epsabs=0, epsrel=1e-12, limit=200)
    return val, e(0.0) ** 2


@pytest.mark.parametrize("lam", [0.1, 1.0, 5.0])
@pytest.mark.parametrize("Y", [0.5, 2.0, 8.0])
@pytest.mark.parametrize("s", [0.0, 1.0])
def test_truncation_error_half_order_closed_form(lam, Y, s):
    energy, trace = truncation_error(lam, Y, P(0.5, s))
    ref_e, ref_t = _half_order_error(lam, Y, s)
    assert energy == pytest.approx(ref_e, rel=1e-7, abs=1e-300)
    assert trace == pytest.approx(ref_t, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("beta", [0.25, 0.75])
def test_pair_difference_against_profiles(beta):
    """Energy of w_Y1 - w_Y2 on (0, Y1) from the exact profiles by quadrature."""
    p = P(beta, 1.0)
    lam, Y1, Y2 = 0.9, 1.5, 3.0
    a, b = mode_profile(lam, Y1, p), mode_profile(lam, Y2, p)
    a_ = p.alpha

    def integrand(y):
        d0 = mode_profile_eval(a, y) - mode_profile_eval(b, y)
        d1 = mode_profile_derivative(a, 1, y) - mode_profile_derivative(b, 1, y)
        return y**a_ * (d1 * d1 + lam**2 * d0 * d0)

    ref, _ = scipy.integrate.quad(integrand, 0, Y1, epsabs=0, epsrel=1e-10, limit=200)
    energy, trace = pair_difference(lam, Y1, Y2, p)
    assert energy == pytest.approx(ref, rel=1e-6)
    assert trace == pytest.approx((a.trace - b.trace) ** 2, rel=1e-10)


@given(st.floats(0.05, 0.95), st.floats(0.01, 50.0), st.floats(0.1, 50.0), st.floats(0.0, 10.0))
def test_solution_norm_energy_identity(beta, lam, Y, s):
    p = P(beta, s)
    energy, trace = solution_norms(lam, Y, p)
    a = dtn_symbol(lam, Y, p)
    # energy + s d_b w0^2 = d_b w0
    w0 = math.sqrt(trace)
    assert energy + s * p.d_beta * trace == pytest.approx(p.d_beta * w0, rel=1e-12)
    assert energy <= p.d_beta / (4 * s) + 1e-15 if s > 0 else True
    assert a > 0


@pytest.mark.parametrize("beta", [0.05, 0.25, 0.5, 0.75, 0.95])
def test_derivatives_against_mpmath(beta):
    mpmath.mp.dps = 40
    prof = mode_profile(1.0, math.inf, P(beta))
    for x in (1e-4, 0.05, 0.9, 2.0, 3.0, 4.5, 7.0, 12.0):
        for ell in (1, 4, 8, 12):
            ref = float(mpmath.diff(lambda t: t**beta * mpmath.besselk(beta, t), x, ell)) * prof.c_K
            assert mode_profile_derivative(prof, ell, x) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("beta", [0.05, 0.25, 0.75, 0.95])
@pytest.mark.parametrize("Y", [6.0, math.inf])
def test_small_argument_series_joins_recurrence(beta, Y):
    import fracext.bessel as B

    prof = mode_profile(1.0, Y, P(beta))
    lo = B._profile_derivatives(prof, list(range(10)), B.SERIES_X * (1 - 1e-12))
    hi = B._profile_derivatives(prof, list(range(10)), B.SERIES_X * (1 + 1e-12))
    np.testing.assert_allclose(lo, hi, rtol=1e-10)
