import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import fwtransform.semiclassical as sc
from fwtransform.errors import StiffnessError, Unsupported, ValidityError, ValidityWarning
from fwtransform.fields import (
    FieldConfiguration,
    gaussian_well,
    stern_gerlach,
    uniform_electric,
    uniform_magnetic,
    zero_field,
)
from fwtransform.params import ParticleParams, PhaseSpinState
from fwtransform.semiclassical import (
    FORCE_TERMS,
    SPIN_TERMS,
    STERN_GERLACH_TERMS,
    IntegratorControls,
    cyclotron_frequency,
    integrate,
    rest_precession_frequency,
    rhs_scalar,
    rhs_spin_half,
    rotation_frequency,
    validity_report,
    velocity,
)

comp = st.floats(-2, 2, allow_nan=False)
vec = st.tuples(comp, comp, comp)


def unit(v):
    v = np.asarray(v, float)
    n = np.linalg.norm(v)
    return v / n if n > 1e-3 else np.array([0.0, 0.0, 1.0])


def test_zero_field_rhs_vanishes():
    s = PhaseSpinState((1, 2, 3), (0.3, 0.1, -0.2), (0, 0, 1))
    dpi, dP = rhs_spin_half(s, zero_field(), ParticleParams(g=2.3, eta=0.5))
    assert np.all(dpi == 0) and np.all(dP == 0)


def test_term_names():
    s = PhaseSpinState((0, 0, 0), (0.3, 0, 0), (1, 0, 0))
    f, t = rhs_spin_half(s, uniform_magnetic((0, 0, 0.1)), ParticleParams(), terms=True)
    assert tuple(f) == FORCE_TERMS and tuple(t) == SPIN_TERMS
    assert set(STERN_GERLACH_TERMS) < set(FORCE_TERMS)


@pytest.mark.parametrize("hbar", [1.0, 0.1, 0.01])
def test_rest_precession_rate_independent_of_hbar(hbar):
    p = ParticleParams(hbar=hbar)
    s = PhaseSpinState((0, 0, 0), (0, 0, 0), (1, 0, 0))
    _, dP = rhs_spin_half(s, uniform_magnetic((0, 0, 0.2)), p)
    assert np.linalg.norm(dP) == pytest.approx(0.2, rel=1e-14)
    assert rest_precession_frequency(0.2, p) == pytest.approx(0.2, rel=1e-14)


def test_uniform_electric_force():
    p = ParticleParams(e=-1.0)
    s = PhaseSpinState((0, 0, 0), (0.5, 0, 0), (0, 1, 0))
    dpi, _ = rhs_spin_half(s, uniform_electric((0.1, 0.2, 0)), p)
    assert np.allclose(dpi, [-0.1, -0.2, 0], atol=1e-15)
    assert np.allclose(rhs_scalar(s, uniform_electric((0.1, 0.2, 0)), p), [-0.1, -0.2, 0])


@given(vec, vec, st.floats(0.1, 3))
def test_lorentz_force_perpendicular_to_velocity(pi, B, e):
    p = ParticleParams(e=e)
    s = PhaseSpinState((0, 0, 0), pi, None)
    f = rhs_scalar(s, uniform_magnetic(B), p)
    assert abs(f @ velocity(pi, p)) <= 1e-12 * (1 + np.linalg.norm(f))


@given(vec, vec, vec, st.floats(1.5, 3), st.floats(-1, 1))
def test_spin_derivative_perpendicular_to_P(pi, B, Pv, g, eta):
    p = ParticleParams(g=g, eta=eta, hbar=0.3)
    P = unit(Pv)
    fields = uniform_magnetic(B) + uniform_electric((0.1, -0.3, 0.2))
    _, dP = rhs_spin_half(PhaseSpinState((0, 0, 0), pi, P), fields, p)
    assert abs(dP @ P) <= 1e-12 * (1 + np.linalg.norm(dP))


def _spin_potential(r, pi, P, fields, p):
    """Classical spin-dependent energy whose negative gradient is the Stern-Gerlach force."""
    r = np.asarray(r, float).reshape(1, 3)
    E, H = fields.E(r)[0], fields.H(r)[0]
    eps = p.energy(pi)
    mc2, c = p.rest_energy, p.c
    k = 1 / (eps * (eps + mc2))
    return (
        -(p.mu_anom + p.mu0 * mc2 / eps) * (P @ H)
        + (p.mu_anom * c / eps + p.mu0 * mc2 * c * k) * (P @ np.cross(pi, E))
        + p.mu_anom * c**2 * k * (P @ pi) * (H @ pi)
    )


def test_stern_gerlach_force_is_gradient_of_spin_energy():
    fields = stern_gerlach(0.3, 0.2) + gaussian_well(-0.4, 2.0)
    p = ParticleParams(g=2.7, hbar=0.2)
    r, pi, P = np.array([0.4, 0.1, -0.3]), np.array([0.3, -0.5, 0.2]), unit([0.2, 0.5, 0.8])
    f, _ = rhs_spin_half(PhaseSpinState(r, pi, P), fields, p, terms=True)
    sg = sum(f[k] for k in STERN_GERLACH_TERMS)
    h = 1e-5
    grad = np.array(
        [
            (_spin_potential(r + h * e, pi, P, fields, p) - _spin_potential(r - h * e, pi, P, fields, p)) / (2 * h)
            for e in np.eye(3)
        ]
    )
    assert np.allclose(sg, -grad, rtol=1e-7, atol=1e-12)


def test_validity_report_values():
    p = ParticleParams(hbar=0.01)
    s = PhaseSpinState((0, 0, 0), (1.0, 0, 0))
    rep = validity_report(s, gaussian_well(-0.3, 4.0), p)
    assert rep.lambda_over_l == pytest.approx(2 * np.pi * 0.01 / 4.0)
    assert rep.ok
    assert validity_report(s, uniform_magnetic((0, 0, 1)), p.with_hbar(100)).lambda_over_l == 0.0
    assert not validity_report(s, gaussian_well(-0.3, 4.0), p.with_hbar(1.0)).ok


def test_free_motion_is_straight_line():
    p = ParticleParams()
    tr = integrate(PhaseSpinState((0, 0, 0), (0.75, 0, 0), (0, 0, 1)), zero_field(), p, 10.0)
    assert np.allclose(tr.r[-1], [10 * 0.6, 0, 0], rtol=1e-12)
    assert tr.max_spin_drift() <= 1e-12


def test_energy_conserved_without_stern_gerlach():
    fields = gaussian_well(-0.3, 4.0) + uniform_magnetic((0, 0, 0.1))
    p = ParticleParams(g=2.5, hbar=0.01)
    ctl = IntegratorControls(stern_gerlach=False)
    tr = integrate(PhaseSpinState((-5, 0, 0), (0.8, 0.2, 0), unit([1, 1, 0])), fields, p, 20.0, ctl)
    assert np.max(np.abs(tr.energy_drift())) <= 1e-9
    assert tr.max_spin_drift() <= 1e-9


def test_tolerance_convergence():
    fields = uniform_magnetic((0, 0, 0.5))
    p = ParticleParams(g=2.2)
    s0 = PhaseSpinState((0, 0, 0), (1.0, 0, 0), (1, 0, 0))
    a = integrate(s0, fields, p, 30.0, IntegratorControls(rtol=1e-6, atol=1e-9))
    b = integrate(s0, fields, p, 30.0, IntegratorControls(rtol=1e-12, atol=1e-14))
    omega = cyclotron_frequency(s0.pi, 0.5, p)
    exact = np.array([np.cos(omega * 30.0), -np.sin(omega * 30.0), 0.0])
    assert np.linalg.norm(b.pi[-1] - exact) < np.linalg.norm(a.pi[-1] - exact)
    assert np.linalg.norm(b.pi[-1] - exact) < 1e-9


def test_cyclotron_rotation_sense():
    p = ParticleParams()
    B = 0.5
    s0 = PhaseSpinState((0, 0, 0), (1.0, 0, 0))
    tr = integrate(s0, uniform_magnetic((0, 0, B)), p, 10.0)
    assert rotation_frequency(tr.t, tr.pi) == pytest.approx(-cyclotron_frequency(s0.pi, B, p), rel=1e-9)


def test_stiffness_error(monkeypatch):
    class Failed:
        status = -1
        message = "Required step size is less than spacing between numbers."

    monkeypatch.setattr(sc, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(StiffnessError):
        integrate(PhaseSpinState((0, 0, 0), (1, 0, 0)), zero_field(), ParticleParams(), 1.0)


def test_validity_error_and_warning():
    s0 = PhaseSpinState((0, 0, 0), (0.5, 0, 0))
    p = ParticleParams(hbar=1.0)
    with pytest.raises(ValidityError):
        integrate(s0, gaussian_well(-0.3, 4.0), p, 1.0)
    with pytest.warns(ValidityWarning):
        tr = integrate(s0, gaussian_well(-0.3, 4.0), p, 1.0, IntegratorControls(allow_invalid=True))
    assert not tr.validity.ok


def test_time_dependent_unsupported():
    f = zero_field()
    td = FieldConfiguration(
        phi=f.Phi, vector_potential=f.A, electric=f.E, magnetic=f.H, name="td", x_only=True, time_dependent=True
    )
    with pytest.raises(Unsupported):
        integrate(PhaseSpinState((0, 0, 0), (1, 0, 0)), td, ParticleParams(), 1.0)


def test_projection_mode_and_outputs(tmp_path):
    fields = uniform_magnetic((0, 0, 0.5))
    s0 = PhaseSpinState((0, 0, 0), (1.0, 0, 0), (1, 0, 0))
    ctl = IntegratorControls(project_spin=True, n_samples=21, rtol=1e-6, atol=1e-8)
    tr = integrate(s0, fields, ParticleParams(g=2.2), 10.0, ctl)
    assert np.allclose(np.linalg.norm(tr.P, axis=1), 1.0, atol=1e-14)
    assert tr.metadata["projected"] and tr.max_spin_drift() > 0
    tr.to_csv(tmp_path / "t.csv")
    tr.to_json(tmp_path / "t.json")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0].startswith("t,x,y,z,pi_x") and len(lines) == 22
    data = json.loads((tmp_path / "t.json").read_text())
    assert data["samples"] == 21 and data["metadata"]["projected"]
