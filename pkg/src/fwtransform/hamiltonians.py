"""Concrete Hamiltonians for spin-1/2 and spin-0 particles in external fields.

Each builder returns a :class:`~fwtransform.transform.SplitHamiltonian`
(``M``, ``E``, ``O``) on a given discretization scheme.  Fields are sampled at
the scheme's nodes and act as diagonal multiplication operators tensored with
spin matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ALPHA,
    BETA4,
    GAMMA,
    I2,
    POLARIZATION,
    RHO2,
    RHO3,
    SIGMA,
    BlockOperator,
    Factorized,
    hermitian_function,
    sqrtm_principal,
)
from .discretization import DiscretizationScheme
from .errors import FieldDomainError, Unsupported
from .fields import FieldConfiguration
from .params import ParticleParams
from .transform import SplitHamiltonian

I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class SpatialOperators:
    """Position-space operators of one scheme at one value of hbar.

    ``pi``, ``E`` and ``H`` are triples of ``n x n`` matrices; ``phi`` is a
    single matrix.
    """

    scheme: DiscretizationScheme
    params: ParticleParams
    pi: tuple
    phi: np.ndarray
    E: tuple
    H: tuple
    tag: str

    @property
    def n(self) -> int:
        return self.scheme.n

    def pi_squared(self) -> np.ndarray:
        return sum(p @ p for p in self.pi)


def spatial_operators(
    fields: FieldConfiguration,
    params: ParticleParams,
    scheme: DiscretizationScheme,
    check: bool = True,
) -> SpatialOperators:
    """Sample ``fields`` on ``scheme`` and form ``pi = p - (e/c) A``.

    With ``check`` the relations ``E = -grad Phi`` and ``H = curl A`` are
    verified first (raising :class:`FieldConsistencyError`).
    """
    if fields.time_dependent:
        raise Unsupported("time-dependent fields are not supported")
    if scheme.one_dimensional and not fields.x_only:
        raise FieldDomainError(f"field {fields.name!r} depends on y or z; a one-dimensional scheme cannot hold it")
    if check:
        fields.check_consistency()
    nodes = scheme.nodes()
    p = scheme.momenta(params.hbar)
    a = fields.A(nodes)
    q = params.e / params.c
    pi = tuple(p[i] - q * scheme.diagonal(a[:, i]) for i in range(3))
    ef = fields.E(nodes)
    hf = fields.H(nodes)
    return SpatialOperators(
        scheme=scheme,
        params=params,
        pi=pi,
        phi=scheme.diagonal(fields.Phi(nodes)),
        E=tuple(scheme.diagonal(ef[:, i]) for i in range(3)),
        H=tuple(scheme.diagonal(hf[:, i]) for i in range(3)),
        tag=scheme.basis_tag(params.hbar),
    )


def _dot(spin, spatial):
    return sum(np.kron(s, a) for s, a in zip(spin, spatial))


def build_dirac_pauli(
    fields: FieldConfiguration,
    params: ParticleParams,
    scheme: DiscretizationScheme,
    check: bool = True,
) -> SplitHamiltonian:
    """Dirac-Pauli Hamiltonian with anomalous magnetic and electric dipole moments.

    ``M = m c^2``, ``E = e Phi - mu' Pi.H - d Pi.E`` and
    ``O = c alpha.pi + i mu' gamma.E - i d gamma.H``.
    """
    ops = spatial_operators(fields, params, scheme, check=check)
    return dirac_pauli_from_operators(ops)


def dirac_pauli_from_operators(ops: SpatialOperators) -> SplitHamiltonian:
    p = ops.params
    n = ops.n
    mu, d = p.mu_anom, p.edm
    m = p.rest_energy * np.eye(4 * n, dtype=complex)
    e = (
        p.e * np.kron(I4, ops.phi)
        - mu * _dot(POLARIZATION, ops.H)
        - d * _dot(POLARIZATION, ops.E)
    )
    o = (
        p.c * _dot(ALPHA, ops.pi)
        + 1j * mu * _dot(GAMMA, ops.E)
        - 1j * d * _dot(GAMMA, ops.H)
    )
    mk = lambda x: BlockOperator(x, 4, ops.tag)
    return SplitHamiltonian(mk(m), mk(e), mk(o))


def build_feshbach_villars(
    fields: FieldConfiguration,
    params: ParticleParams,
    scheme: DiscretizationScheme,
    check: bool = True,
) -> SplitHamiltonian:
    """Two-component spinless Hamiltonian ``rho3 m c^2 + (rho3 + i rho2) pi^2/2m + e Phi``.

    ``M = m c^2 + pi^2/2m``, ``E = e Phi`` and ``O = i rho2 pi^2/2m``;
    ``M`` and ``O`` commute.
    """
    ops = spatial_operators(fields, params, scheme, check=check)
    p = ops.params
    kin = ops.pi_squared() / (2.0 * p.m)
    eye = np.eye(ops.n, dtype=complex)
    m = np.kron(I2, p.rest_energy * eye + kin)
    e = p.e * np.kron(I2, ops.phi)
    o = np.kron(1j * RHO2, kin)
    mk = lambda x: BlockOperator(x, 2, ops.tag)
    return SplitHamiltonian(mk(m), mk(e), mk(o))


def spinless_energy(ops: SpatialOperators) -> np.ndarray:
    """``sqrt(m^2 c^4 + c^2 pi^2)`` as an ``n x n`` matrix."""
    p = ops.params
    return hermitian_function(p.rest_energy**2 * np.eye(ops.n) + p.c**2 * ops.pi_squared(), np.sqrt)


def feshbach_villars_T(ops: SpatialOperators) -> np.ndarray:
    """``sqrt(eps / m c^2) (eps + m c^2)`` as an ``n x n`` matrix."""
    p = ops.params
    eps = spinless_energy(ops)
    mc2 = p.rest_energy
    return sqrtm_principal(eps / mc2) @ (eps + mc2 * np.eye(ops.n))


def fw_spinless_leading(fields, params, scheme, check: bool = True) -> BlockOperator:
    """``beta sqrt(m^2 c^4 + c^2 pi^2) + e Phi`` for the spinless particle."""
    ops = spatial_operators(fields, params, scheme, check=check)
    eps = spinless_energy(ops)
    h = np.kron(RHO3, eps) + params.e * np.kron(I2, ops.phi)
    return BlockOperator(h, 2, ops.tag)


def _cross(a, b):
    return (
        a[1] @ b[2] - a[2] @ b[1],
        a[2] @ b[0] - a[0] @ b[2],
        a[0] @ b[1] - a[1] @ b[0],
    )


def _sym_cross(a, b):
    """``a x b - b x a`` for operator-valued vectors."""
    ab, ba = _cross(a, b), _cross(b, a)
    return tuple(x - y for x, y in zip(ab, ba))


FW_SPIN_HALF_TERMS = (
    "rest_kinetic",
    "electric_potential",
    "anomalous_zeeman",
    "normal_zeeman",
    "anomalous_spin_orbit",
    "normal_spin_orbit",
    "anomalous_helicity",
    "edm_electric",
    "edm_helicity",
    "edm_motional",
)


def eval_fw_spin_half_analytic(
    fields: FieldConfiguration,
    params: ParticleParams,
    scheme: DiscretizationScheme,
    terms: bool = False,
    check: bool = True,
):
    """Closed-form FW Hamiltonian of the Dirac-Pauli particle to first order in hbar.

    With ``eps' = sqrt(m^2 c^4 + c^2 pi^2)`` and ``N = sqrt(2 eps'(eps' + m c^2))``::

        beta eps' + e Phi - mu' Pi.H - (mu0/2){m c^2/eps', Pi.H}
        + (mu' c/4){1/eps', Sigma.(pi x E - E x pi)}
        + mu0 m c^3 N^-1 Sigma.(pi x E - E x pi) N^-1
        + (mu' c^2/2) N^-1 {Pi.pi, H.pi + pi.H} N^-1
        - d Pi.E + (d c^2/2) N^-1 {Pi.pi, E.pi + pi.E} N^-1
        - (d c/4){1/eps', Sigma.(pi x H - H x pi)}

    Returns a :class:`BlockOperator`, or ``(operator, dict)`` with every term
    separately when ``terms`` is true.
    """
    ops = spatial_operators(fields, params, scheme, check=check)
    p = params
    n = ops.n
    k = lambda s, a: np.kron(s, a)
    pi4 = tuple(k(I4, q) for q in ops.pi)
    E4 = tuple(k(I4, q) for q in ops.E)
    H4 = tuple(k(I4, q) for q in ops.H)
    mc2 = p.rest_energy
    eps_s = spinless_energy(ops)
    norm_s = sqrtm_principal(2.0 * eps_s @ (eps_s + mc2 * np.eye(n)))
    eps = k(I4, eps_s)
    f_eps = Factorized(eps)
    f_n = Factorized(k(I4, norm_s))
    sandwich = lambda x: f_n.left(f_n.right(x))
    inv_eps_acomm = lambda x: f_eps.left(x) + f_eps.right(x)

    def spin_dot(spin, vec):
        return sum(k(s, np.eye(n)) @ v for s, v in zip(spin, vec))

    pi_h = spin_dot(POLARIZATION, H4)
    pi_e = spin_dot(POLARIZATION, E4)
    pi_p = spin_dot(POLARIZATION, pi4)
    so_e = spin_dot(SIGMA, _sym_cross(pi4, E4))
    so_h = spin_dot(SIGMA, _sym_cross(pi4, H4))
    h_pi = sum(h @ q + q @ h for h, q in zip(H4, pi4))
    e_pi = sum(e @ q + q @ e for e, q in zip(E4, pi4))
    mu0, mu, d, c = p.mu0, p.mu_anom, p.edm, p.c

    parts = {
        "rest_kinetic": k(BETA4, eps_s),
        "electric_potential": p.e * k(I4, ops.phi),
        "anomalous_zeeman": -mu * pi_h,
        "normal_zeeman": -0.5 * mu0 * mc2 * inv_eps_acomm(pi_h),
        "anomalous_spin_orbit": 0.25 * mu * c * inv_eps_acomm(so_e),
        "normal_spin_orbit": mu0 * mc2 * c * sandwich(so_e),
        "anomalous_helicity": 0.5 * mu * c**2 * sandwich(pi_p @ h_pi + h_pi @ pi_p),
        "edm_electric": -d * pi_e,
        "edm_helicity": 0.5 * d * c**2 * sandwich(pi_p @ e_pi + e_pi @ pi_p),
        "edm_motional": -0.25 * d * c * inv_eps_acomm(so_h),
    }
    total = sum(parts.values())
    op = BlockOperator(total, 4, ops.tag)
    if terms:
        return op, {name: BlockOperator(parts[name], 4, ops.tag) for name in FW_SPIN_HALF_TERMS}
    return op


def heisenberg_rhs(H_fw: BlockOperator, observable: BlockOperator, params: ParticleParams) -> BlockOperator:
    """``(i/hbar)[H_fw, observable]`` (static fields)."""
    H_fw.compatible(observable)
    h, a = H_fw.matrix, observable.matrix
    return H_fw.like(1j / params.hbar * (h @ a - a @ h))


def kinetic_momentum_operators(ops: SpatialOperators, spinor_rank: int) -> tuple:
    eye = np.eye(spinor_rank, dtype=complex)
    return tuple(BlockOperator(np.kron(eye, q), spinor_rank, ops.tag) for q in ops.pi)


def polarization_operators(ops: SpatialOperators) -> tuple:
    """The polarization operator ``Pi = beta Sigma`` on a spin-1/2 basis."""
    eye = np.eye(ops.n, dtype=complex)
    return tuple(BlockOperator(np.kron(s, eye), 4, ops.tag) for s in POLARIZATION)


def position_operator(ops: SpatialOperators, spinor_rank: int) -> BlockOperator:
    return BlockOperator(np.kron(np.eye(spinor_rank), ops.scheme.position()), spinor_rank, ops.tag)
