import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exphmap.core import BranchError, DomainError, MetricSignature, eh_residual_flat
from exphmap.flatspace import (
    HodographSolution,
    ParametricFlatSolution,
    default_norm,
    eval_parametric,
    fd_radial,
    hodograph_cartesian_residual,
    hodograph_f,
    hodograph_jacobian,
    hodograph_jacobian_ok,
    hodograph_radial,
    hodograph_radial_derivs,
    hodograph_xy,
    kummer_parameters,
    parametric_derivatives,
    radial_ode_residual,
)

EUC = MetricSignature.euclidean()
MINK = MetricSignature.minkowski()


def mp_radial(a, r, form="corrected"):
    """Radial factor and its r-derivatives in 40-digit arithmetic."""
    mpmath.mp.dps = 40
    A, b = kummer_parameters(a)
    s = mpmath.mpf(1) / 2 if form == "corrected" else mpmath.mpf(1)
    C = mpmath.mpf(2) ** (-(mpmath.mpf(a) + 1) / 2)
    f = lambda x: C * x**a * mpmath.exp(-s * x * x) * mpmath.hyp1f1(A, b, x * x / 2)  # noqa: E731
    r = mpmath.mpf(r)
    return f(r), mpmath.diff(f, r), mpmath.diff(f, r, 2)


def test_parametric_value():
    phi, p, q = eval_parametric(ParametricFlatSolution(1.0), 4 / 3, 0.0)
    assert (phi, p, q) == pytest.approx((0.75, 1.0, 0.0), abs=1e-14)


@settings(max_examples=40)
@given(st.floats(0.05, 5), st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3))
def test_euclidean_residual(l, c, cp, x, y):
    sol = ParametricFlatSolution(l, c, cp)
    assert abs(eh_residual_flat(parametric_derivatives(sol, x, y), EUC)) < 1e-8


@settings(max_examples=40)
@given(st.floats(0.05, 5), st.floats(-2, 2), st.floats(-0.5, 0.5), st.floats(-3, 3), st.floats(0.02, 0.98))
def test_minkowski_residual(l, c, cp, x, frac):
    sol = ParametricFlatSolution(l, c, cp, 0.0, MINK)
    lo, hi = sol.y_range()
    y = lo + frac * (hi - lo)
    assert abs(eh_residual_flat(parametric_derivatives(sol, x, y), MINK)) < 1e-8


def test_partials_match_finite_differences():
    rng = np.random.default_rng(0)
    for sig in (EUC, MINK):
        sol = ParametricFlatSolution(0.9, 0.2, 0.1, 0.0, sig)
        lo, hi = sol.y_range()
        x = rng.uniform(-2, 2, 50)
        y = rng.uniform(max(lo, -2) + 0.1, min(hi, 2) - 0.1, 50)
        g = parametric_derivatives(sol, x, y)
        h = 1e-5
        fx = (eval_parametric(sol, x + h, y)[0] - eval_parametric(sol, x - h, y)[0]) / (2 * h)
        fy = (eval_parametric(sol, x, y + h)[0] - eval_parametric(sol, x, y - h)[0]) / (2 * h)
        assert np.max(np.abs(fx - g.d_x)) < 1e-6
        assert np.max(np.abs(fy - g.d_y)) < 1e-6
        h = 1e-4
        fxx = (parametric_derivatives(sol, x + h, y).d_x - parametric_derivatives(sol, x - h, y).d_x) / (2 * h)
        fyy = (parametric_derivatives(sol, x, y + h).d_y - parametric_derivatives(sol, x, y - h).d_y) / (2 * h)
        assert np.max(np.abs(fxx - g.d_xx)) < 1e-6
        assert np.max(np.abs(fyy - g.d_yy)) < 1e-6


def test_minkowski_branch_error():
    sol = ParametricFlatSolution(1.0, 0.0, 0.0, 0.0, MINK)
    with pytest.raises(BranchError):
        eval_parametric(sol, 0.0, 0.9)


def test_parametric_rejects_bad_inputs():
    with pytest.raises(DomainError):
        ParametricFlatSolution(0.0)
    with pytest.raises(DomainError):
        ParametricFlatSolution(1.0, signature=MetricSignature.friedmann_lemaitre())


def test_constant_shift():
    a = eval_parametric(ParametricFlatSolution(1.0, 0.1, 0.2, 0.0), 0.3, 0.4)[0]
    b = eval_parametric(ParametricFlatSolution(1.0, 0.1, 0.2, 2.5), 0.3, 0.4)[0]
    assert b - a == pytest.approx(2.5)


# -- hodograph ---------------------------------------------------------------


@pytest.mark.parametrize("r", [0.1, 0.7, 2.0, 4.5])
def test_radial_a1_is_linear(r):
    assert hodograph_radial(1.0, r, 0.5) == pytest.approx(r / 2, abs=1e-12)
    assert hodograph_radial(1.0, r) == pytest.approx(default_norm(1.0) * r, abs=1e-12)


@pytest.mark.parametrize("a", [1.0, 2.0, 3.0, 1.5])
@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.5, 5.0])
def test_radial_against_mpmath(a, r):
    R, Rp, Rpp = hodograph_radial_derivs(a, r)
    ref = mp_radial(a, r)
    for got, want in zip((R, Rp, Rpp), ref):
        assert got == pytest.approx(float(want), rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("a", [1.0, 2.0, 3.0])
def test_radial_residual_corrected(a):
    r = np.linspace(0.1, 5, 60)
    res = radial_ode_residual(lambda rr: hodograph_radial_derivs(a, rr), a, r)
    assert np.max(np.abs(res)) < 1e-8


def test_radial_residual_mpmath_oracle():
    # residual evaluated entirely in high precision
    for a in (1.0, 2.0, 3.0):
        for r in (0.1, 1.0, 5.0):
            R, Rp, Rpp = mp_radial(a, r)
            r_ = mpmath.mpf(r)
            res = Rpp + (r_ + 1 / r_) * Rp - a * a * (1 + 1 / r_**2) * R
            assert abs(res) < 1e-25


def test_radial_polynomial_case_fd():
    fd = fd_radial(lambda r: hodograph_radial(2.0, r), h=1e-3)
    for r in (0.5, 1.0, 2.0, 5.0):
        assert abs(radial_ode_residual(lambda rr: fd(float(rr)), 2.0, r)) < 1e-8


def test_radial_a2_values():
    assert hodograph_radial(2.0, 1.0, 1.0) == pytest.approx(7 / 6, rel=1e-12)


def test_literal_form_fails():
    fd = fd_radial(lambda r: hodograph_radial(1.0, r, None, "literal"), h=1e-3)
    assert abs(radial_ode_residual(lambda rr: fd(float(rr)), 1.0, 1.0)) > 1e-2


def test_radial_residual_rejects_origin():
    with pytest.raises(DomainError):
        radial_ode_residual(lambda r: hodograph_radial_derivs(1.0, r), 1.0, 0.0)


def test_hodograph_a1_degenerate():
    sol = HodographSolution(1.0, normC=0.5)
    r, th = np.array([0.5, 1.0, 2.0]), np.array([0.3, 1.2, 2.5])
    f, res = hodograph_f(sol, r, th)
    np.testing.assert_allclose(f, r * np.cos(th) / 2, atol=1e-14)
    assert np.max(np.abs(res)) < 1e-12
    assert not hodograph_jacobian_ok(sol, r, th)


def test_hodograph_fd_residual():
    sol = HodographSolution(2.0, 1.0, 1.0)
    rng = np.random.default_rng(1)
    r, th = rng.uniform(0.2, 3, 20), rng.uniform(0, 2 * np.pi, 20)
    _, res = hodograph_f(sol, r, th, derivs="fd")
    assert np.max(np.abs(res)) < 1e-7


@given(st.floats(0.2, 3), st.floats(-np.pi, np.pi))
def test_hodograph_cartesian_residual(r, th):
    sol = HodographSolution(2.0, 1.0, 0.5)
    u, v = r * np.cos(th), r * np.sin(th)
    assert abs(hodograph_cartesian_residual(sol, u, v)) < 1e-9 * (1 + r**4)


def test_hodograph_xy_is_gradient():
    sol = HodographSolution(3.0, 1.0, 0.2)
    u, v, h = 0.7, -0.4, 1e-6

    def f(uu, vv):
        return hodograph_f(sol, np.hypot(uu, vv), np.arctan2(vv, uu))[0]

    x, y = hodograph_xy(sol, u, v)
    assert x == pytest.approx((f(u + h, v) - f(u - h, v)) / (2 * h), abs=1e-7)
    assert y == pytest.approx((f(u, v + h) - f(u, v - h)) / (2 * h), abs=1e-7)


def test_hodograph_jacobian_nondegenerate_a2():
    sol = HodographSolution(2.0)
    assert hodograph_jacobian_ok(sol, np.array([0.5, 1.0]), np.array([0.1, 0.2]))
    assert np.all(np.isfinite(hodograph_jacobian(sol, 1.0, 0.3)))


def test_hodograph_validation():
    with pytest.raises(DomainError):
        HodographSolution(0.0)
    with pytest.raises(DomainError):
        HodographSolution(1.0, form="other")
    with pytest.raises(DomainError):
        hodograph_f(HodographSolution(1.0), 0.0, 0.0)
