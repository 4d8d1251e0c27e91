import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fwtransform.algebra import BlockOperator, is_even
from fwtransform.discretization import MomentumBlock, PeriodicGrid1D
from fwtransform.errors import GapClosure, Unsupported
from fwtransform.fields import gaussian_well, uniform_electric, zero_field
from fwtransform.hamiltonians import (
    build_dirac_pauli,
    build_feshbach_villars,
    eval_fw_spin_half_analytic,
    fw_spinless_leading,
    spatial_operators,
)
from fwtransform.oracle import (
    MAX_EVOLVE_DIM,
    Propagator,
    WavepacketState,
    ehrenfest_check,
    eriksen_fw,
    evolve,
    gaussian_wavepacket,
    sign_function,
)
from fwtransform.params import ParticleParams
from fwtransform.transform import exact_fw, random_commuting_triple

seeds = st.integers(0, 2**31 - 1)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_eriksen_free_dirac(px, py, pz):
    parts = build_dirac_pauli(zero_field(), ParticleParams(), MomentumBlock((px, py, pz)))
    res = eriksen_fw(parts.total())
    eps = np.sqrt(1 + px * px + py * py + pz * pz)
    assert np.allclose(res.H_diag.matrix, np.diag([eps, eps, -eps, -eps]), atol=1e-12 * eps)
    assert res.method == "eigh"


@given(seeds)
def test_eriksen_agrees_with_exact_fw(seed):
    parts = random_commuting_triple(np.random.default_rng(seed), 16)
    a = exact_fw(*parts)
    b = eriksen_fw(parts.total())
    assert np.allclose(a.H_fw.matrix, b.H_diag.matrix, atol=1e-10)
    assert np.allclose(a.U.matrix, b.U.matrix, atol=1e-10)


def test_block_diagonal_input_gives_identity():
    h = np.diag([2.0, 1.5, -1.0, -3.0]).astype(complex)
    res = eriksen_fw(BlockOperator(h, 4, "t"))
    assert np.allclose(res.U.matrix, np.eye(4), atol=1e-14)


def test_sign_function_is_involution():
    parts = random_commuting_triple(np.random.default_rng(5), 16)
    lam, _ = sign_function(parts.total())
    assert np.allclose(lam @ lam, np.eye(16), atol=1e-12)


def test_pseudo_hermitian_input():
    sch = PeriodicGrid1D(32, 32.0, p_offset=1.0)
    parts = build_feshbach_villars(gaussian_well(-0.3, 4.0), ParticleParams(hbar=0.2), sch)
    res = eriksen_fw(parts.total())
    assert res.hermiticity == "pseudo-hermitian"
    assert res.odd_residual <= 1e-10
    assert is_even(res.H_diag, tol=1e-10)
    u, b = res.U.matrix, res.U.beta
    assert np.linalg.norm(b @ u.conj().T @ b @ u - np.eye(64)) <= 1e-9


def test_gap_closure():
    h = np.zeros((4, 4), complex)
    h[0, 2] = h[2, 0] = 1.0
    with pytest.raises(GapClosure):
        eriksen_fw(BlockOperator(h, 4, "t"))


def test_rest_phase():
    p = ParticleParams(hbar=0.5)
    H = eval_fw_spin_half_analytic(zero_field(), p, MomentumBlock())
    psi = WavepacketState([1, 0, 0, 0], 4)
    out = evolve(psi, H, 2.0, p.hbar)
    assert out.psi[0] == pytest.approx(np.exp(-1j * 2.0 / 0.5), abs=1e-14)


def test_unitary_evolution_preserves_norm():
    sch = PeriodicGrid1D(64, 32.0, p_offset=0.5)
    p = ParticleParams(hbar=0.1)
    H = eval_fw_spin_half_analytic(gaussian_well(-0.3, 4.0), p, sch)
    psi = gaussian_wavepacket(sch, -4.0, 1.0, p.hbar, [1, 0, 0, 0])
    assert abs(evolve(psi, H, 50.0, p.hbar).norm() - 1.0) <= 1e-12


def test_pseudo_unitary_evolution_preserves_weighted_norm():
    sch = PeriodicGrid1D(64, 32.0, p_offset=0.5)
    p = ParticleParams(hbar=0.1)
    parts = build_feshbach_villars(gaussian_well(-0.3, 4.0), p, sch)
    psi = gaussian_wavepacket(sch, -4.0, 1.0, p.hbar, [1, 0])
    assert psi.weighted
    assert abs(evolve(psi, parts.total(), 20.0, p.hbar).norm() - 1.0) <= 1e-10


def test_dimension_limit():
    big = BlockOperator(np.eye(MAX_EVOLVE_DIM + 4, dtype=complex), 4, "t")
    with pytest.raises(Unsupported):
        Propagator(big)


def test_state_validation():
    with pytest.raises(ValueError):
        WavepacketState(np.ones(5), 4)
    with pytest.raises(ValueError):
        WavepacketState([0, 1], 2).normalized()


def test_ehrenfest_free_particle():
    sch = PeriodicGrid1D(64, 32.0, p_offset=1.0)
    p = ParticleParams(hbar=0.05)
    ops = spatial_operators(zero_field(), p, sch)
    H = eval_fw_spin_half_analytic(zero_field(), p, sch)
    psi = gaussian_wavepacket(sch, 0.0, 1.0, p.hbar, [1, 0, 0, 0])
    rec = ehrenfest_check(psi, H, ops, zero_field(), p)
    assert rec.abs_deviation <= 1e-10
    rec = ehrenfest_check(psi, H, ops, zero_field(), p, observable="polarization")
    assert rec.abs_deviation <= 1e-10
    with pytest.raises(ValueError):
        ehrenfest_check(psi, H, ops, zero_field(), p, observable="energy")


def test_ehrenfest_uniform_electric_spinless():
    f = uniform_electric((0.05, 0, 0))
    sch = PeriodicGrid1D(128, 64.0, p_offset=1.0)
    p = ParticleParams(hbar=0.05)
    ops = spatial_operators(f, p, sch, check=False)
    H = fw_spinless_leading(f, p, sch, check=False)
    psi = gaussian_wavepacket(sch, 0.0, 1.0, p.hbar, [1, 0])
    rec = ehrenfest_check(psi, H, ops, f, p)
    assert rec.classical == pytest.approx([0.05, 0, 0])
    assert rec.rel_deviation <= 1e-6
    assert rec.validity_ok
