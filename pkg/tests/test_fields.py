import math

import numpy as np
import pytest

from fwtransform.errors import FieldConsistencyError, FieldDomainError, ScenarioError
from fwtransform.fields import (
    gaussian_well,
    load_field_table,
    sampled_table,
    stern_gerlach,
    uniform_electric,
    uniform_magnetic,
    zero_field,
)

PRESETS = [
    zero_field(),
    uniform_electric((0.1, -0.2, 0.3)),
    uniform_magnetic((0.0, 0.4, 0.2)),
    gaussian_well(-0.3, 8.0, 1.0),
    stern_gerlach(1.0, 0.05),
    uniform_electric((0.1, 0, 0)) + uniform_magnetic((0, 0, 0.2)),
]


@pytest.mark.parametrize("f", PRESETS, ids=lambda f: f.name)
def test_presets_are_consistent(f):
    assert f.check_consistency() < 1e-6


@pytest.mark.parametrize("f", PRESETS, ids=lambda f: f.name)
def test_analytic_jacobians_match_finite_differences(f):
    from fwtransform.fields import _fd_gradient

    pts = f.default_sample_points(9)
    h = 1e-3
    assert np.allclose(f.grad_E(pts), _fd_gradient(f.E, pts, h), atol=1e-8)
    assert np.allclose(f.grad_H(pts), _fd_gradient(f.H, pts, h), atol=1e-8)


def test_stern_gerlach_field_is_source_free():
    f = stern_gerlach(1.0, 0.05)
    pts = f.default_sample_points(11)
    jac = f.grad_H(pts)
    div = np.trace(jac, axis1=-2, axis2=-1)
    curl = np.stack([jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]], -1)
    assert np.allclose(div, 0) and np.allclose(curl, 0)
    assert f.length_scale == pytest.approx(20.0)


def test_uniform_fields_have_infinite_scale_and_x_only_flags():
    assert math.isinf(uniform_magnetic((0, 0, 1)).length_scale)
    assert uniform_magnetic((0, 0, 1)).x_only
    assert not uniform_magnetic((1, 0, 0)).x_only
    assert uniform_electric((1, 0, 0)).x_only
    assert not uniform_electric((0, 1, 0)).x_only


def test_gaussian_well_values():
    f = gaussian_well(-0.3, 8.0)
    r = np.array([[8.0, 0, 0]])
    assert f.Phi(r)[0] == pytest.approx(-0.3 * math.exp(-0.5))
    # E = -dPhi/dx
    assert f.E(r)[0, 0] == pytest.approx(-0.3 * 8.0 / 64.0 * math.exp(-0.5))


def test_sampled_table_reproduces_analytic_well():
    x = np.linspace(-30, 30, 241)
    phi = -0.3 * np.exp(-(x**2) / 128.0)
    z = np.zeros_like(x)
    f = sampled_table(x, phi, z, z, z)
    ref = gaussian_well(-0.3, 8.0)
    pts = np.zeros((50, 3))
    pts[:, 0] = np.linspace(-20, 20, 50)
    assert np.allclose(f.Phi(pts), ref.Phi(pts), atol=1e-7)
    assert np.allclose(f.E(pts), ref.E(pts), atol=1e-6)
    assert f.check_consistency() < 1e-6


def test_sampled_table_outside_range():
    x = np.linspace(-1, 1, 11)
    z = np.zeros_like(x)
    f = sampled_table(x, x, z, z, z)
    with pytest.raises(FieldDomainError):
        f.Phi(np.array([[2.0, 0, 0]]))


def test_inconsistent_table_reports_location():
    x = np.linspace(-5, 5, 101)
    z = np.zeros_like(x)
    efield = np.zeros((x.size, 3))
    efield[:, 0] = -1.0  # Phi = x implies E_x = -1 everywhere...
    efield[60:, 0] = 0.5  # ...except here
    f = sampled_table(x, x, z, z, z, electric=efield)
    with pytest.raises(FieldConsistencyError) as err:
        f.check_consistency()
    e = err.value
    assert e.quantity == "E=-grad(Phi)"
    assert e.max_deviation > 1.0
    assert e.location[0] > 0.5


def test_magnetic_from_table_potentials():
    x = np.linspace(-2, 2, 81)
    z = np.zeros_like(x)
    f = sampled_table(x, z, z, 0.3 * x, z)
    h = f.H(np.array([[0.1, 0, 0]]))[0]
    assert np.allclose(h, [0, 0, 0.3])


def test_table_validation():
    with pytest.raises(ScenarioError):
        sampled_table([0, 1, 0.5, 2], [0] * 4, [0] * 4, [0] * 4, [0] * 4)


def test_bundled_table_and_data_dir(tmp_path, monkeypatch):
    f = load_field_table("gaussian_well.csv")
    assert f.x_only
    assert f.Phi(np.array([[0.0, 0, 0]]))[0] == pytest.approx(-0.3, rel=1e-9)
    (tmp_path / "mine.csv").write_text("x,Phi,Ax,Ay,Az\n0,0,0,0,0\n1,1,0,0,0\n2,2,0,0,0\n3,3,0,0,0\n")
    monkeypatch.setenv("FW_DATA_DIR", str(tmp_path))
    g = load_field_table("mine.csv")
    assert g.E(np.array([[1.5, 0, 0]]))[0, 0] == pytest.approx(-1.0)
    with pytest.raises(FileNotFoundError):
        load_field_table("does-not-exist.csv")


def test_table_missing_columns(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,Phi\n0,0\n")
    with pytest.raises(ScenarioError):
        load_field_table(p)


def test_non_finite_field_raises():
    from dataclasses import replace

    f = replace(zero_field(), phi=lambda r: np.full(np.shape(r)[:-1], np.nan))
    with pytest.raises(FieldDomainError):
        f.Phi(np.zeros((1, 3)))


def test_superposition():
    f = uniform_electric((0.1, 0, 0)) + gaussian_well(-0.3, 8.0)
    r = np.array([[1.0, 0, 0]])
    assert np.allclose(f.E(r), uniform_electric((0.1, 0, 0)).E(r) + gaussian_well(-0.3, 8.0).E(r))
    assert f.length_scale == 8.0
