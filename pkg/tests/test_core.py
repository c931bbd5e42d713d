import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exphmap.core import (
    CosmoState,
    DomainError,
    Gradient2D,
    MetricSignature,
    ModelParams,
    SignatureKind,
    UZState,
    eh_residual_flat,
    energy_density,
    stress_energy,
    stress_energy_divergence,
)
from exphmap.flatspace import ParametricFlatSolution, parametric_derivatives

finite = st.floats(-5, 5)


def test_metrics():
    np.testing.assert_array_equal(MetricSignature.euclidean().metric(), np.eye(2))
    np.testing.assert_array_equal(MetricSignature.minkowski().metric(), np.diag([1.0, -1.0]))
    fl = MetricSignature.friedmann_lemaitre(k=1)
    assert fl.kind is SignatureKind.FRIEDMANN_LEMAITRE
    np.testing.assert_array_equal(fl.metric(), np.diag([1.0, -1, -1, -1]))


def test_fl_signature_bad_k():
    with pytest.raises(DomainError):
        MetricSignature.friedmann_lemaitre(k=2)


def test_scale_factor_missing():
    with pytest.raises(DomainError):
        MetricSignature.friedmann_lemaitre().scale(1.0)


@pytest.mark.parametrize("kwargs", [dict(k=3), dict(rho0=-1.0), dict(R0=0.0), dict(b_const=0.0)])
def test_model_params_validation(kwargs):
    with pytest.raises(DomainError):
        ModelParams(**kwargs)


def test_model_params_replace():
    p = ModelParams(lam=0.5)
    q = p.replace(K=3.0)
    assert (q.lam, q.K, p.K) == (0.5, 3.0, 1.0)


def test_state_validation():
    with pytest.raises(DomainError):
        CosmoState(t=0.0, R=-1.0, H=0.0, y=0.0, phi=0.0, rho=0.0)
    with pytest.raises(DomainError):
        UZState(u=-1e-3, z=0.0)


@given(finite, finite)
def test_energy_density_signs(px, py):
    g = Gradient2D(px, py)
    assert energy_density(g, MetricSignature.euclidean()) == pytest.approx(0.5 * (px * px + py * py))
    assert energy_density(g, MetricSignature.minkowski()) == pytest.approx(0.5 * (px * px - py * py))


def test_energy_density_fl_velocity():
    assert energy_density(2.0, MetricSignature.friedmann_lemaitre()) == 2.0


def test_energy_density_wrong_gradient_type():
    with pytest.raises(DomainError):
        energy_density(Gradient2D(1.0, 0.0), MetricSignature.friedmann_lemaitre())
    with pytest.raises(DomainError):
        stress_energy(1.0, MetricSignature.euclidean())


@given(finite, finite, st.floats(0.1, 2))
def test_stress_energy_symmetric(px, py, lam):
    T = stress_energy(Gradient2D(px, py), MetricSignature.euclidean(), lam)
    np.testing.assert_allclose(T, T.T)


def test_stress_energy_vanishing_gradient_is_metric():
    for sig in (MetricSignature.euclidean(), MetricSignature.minkowski()):
        np.testing.assert_array_equal(stress_energy(Gradient2D(0.0, 0.0), sig), sig.metric())


def test_stress_energy_fl():
    T = stress_energy(1.0, MetricSignature.friedmann_lemaitre(), lam=0.5)
    e = np.exp(0.25)
    assert T[0, 0] == pytest.approx(e * 0.5)
    assert T[1, 1] == pytest.approx(-e)


def test_residual_needs_hessian():
    with pytest.raises(DomainError):
        eh_residual_flat(Gradient2D(1.0, 1.0), MetricSignature.euclidean())


def test_residual_linear_field_vanishes():
    g = Gradient2D(1.3, -0.4, 0.0, 0.0, 0.0)
    assert eh_residual_flat(g, MetricSignature.euclidean()) == 0.0
    assert eh_residual_flat(g, MetricSignature.minkowski()) == 0.0


def test_residual_rejects_fl():
    with pytest.raises(DomainError):
        eh_residual_flat(Gradient2D(1, 1, 0, 0, 0), MetricSignature.friedmann_lemaitre())


@pytest.mark.parametrize("sig", [MetricSignature.euclidean(), MetricSignature.minkowski()])
def test_stress_energy_conserved_on_solution(sig):
    sol = ParametricFlatSolution(1.0, 0.3, -0.2, 0.0, sig)

    def T(x, y):
        g = parametric_derivatives(sol, x, y)
        return stress_energy(Gradient2D(g.d_x, g.d_y), sig)

    for x, y in [(0.1, 0.2), (-0.7, 0.1), (1.1, -0.3)]:
        assert np.max(np.abs(stress_energy_divergence(T, x, y, sig, h=1e-4))) < 1e-5


def test_stress_energy_not_conserved_off_solution():
    sig = MetricSignature.euclidean()

    def T(x, y):
        # phi = x^2 + y^3 does not solve the equation
        return stress_energy(Gradient2D(2 * x, 3 * y * y), sig)

    assert np.max(np.abs(stress_energy_divergence(T, 0.4, 0.5, sig))) > 1e-2
