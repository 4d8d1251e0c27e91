"""Brute-force validators: one-step Eriksen block-diagonalization, exact time
evolution of small systems and Ehrenfest comparisons with the classical
equations of motion."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import BlockOperator, Factorized, odd_part, rel_norm, sqrtm_principal
from .errors import GapClosure, Unsupported
from .transform import hermiticity_class

#: Largest matrix dimension handled by :func:`evolve`.
MAX_EVOLVE_DIM = 2048
GAP_RTOL = 1e-8


@dataclass(frozen=True)
class WavepacketState:
    """State vector over ``spinor_rank x n`` components.

    Spin-1/2 states are normalized as ``psi^dag psi = 1``; spinless
    (two-component) states as ``psi^dag beta psi = 1``.
    """

    psi: np.ndarray
    spinor_rank: int
    basis_tag: str = "generic"

    def __post_init__(self):
        v = np.array(self.psi, dtype=complex).reshape(-1)
        if v.size % self.spinor_rank:
            raise ValueError("state length is not a multiple of the spinor rank")
        object.__setattr__(self, "psi", v)

    @property
    def beta_diag(self) -> np.ndarray:
        n = self.psi.size // self.spinor_rank
        half = self.spinor_rank // 2
        return np.concatenate([np.ones(half * n), -np.ones(half * n)])

    @property
    def weighted(self) -> bool:
        return self.spinor_rank == 2

    def norm(self) -> float:
        """``psi^dag psi`` (spin-1/2) or ``psi^dag beta psi`` (spinless)."""
        w = self.beta_diag if self.weighted else 1.0
        return float(np.real(np.vdot(self.psi, w * self.psi)))

    def normalized(self) -> "WavepacketState":
        nrm = self.norm()
        if nrm <= 0:
            raise ValueError("state has non-positive norm in its convention")
        return WavepacketState(self.psi / np.sqrt(nrm), self.spinor_rank, self.basis_tag)

    def expectation(self, op) -> float:
        """Real part of ``<op>`` in the state's norm convention."""
        a = op.matrix if isinstance(op, BlockOperator) else np.asarray(op)
        w = self.beta_diag if self.weighted else 1.0
        num = np.vdot(self.psi, w * (a @ self.psi))
        return float(np.real(num) / self.norm())


def gaussian_wavepacket(scheme, center: float, width: float, hbar: float, spinor) -> WavepacketState:
    """``spinor (x) gaussian`` on ``scheme``; the mean momentum is the scheme's offset.

    ``spinor`` has length 2 (spinless, e.g. ``(1, 0)`` for a positive-energy
    FW state) or 4.
    """
    spinor = np.asarray(spinor, dtype=complex)
    env = scheme.coherent_state(center, width, hbar)
    st = WavepacketState(np.kron(spinor, env), spinor.size, scheme.basis_tag(hbar))
    return st.normalized()


@dataclass(frozen=True)
class EriksenResult:
    U: BlockOperator
    H_diag: BlockOperator
    sign: BlockOperator
    odd_residual: float
    hermiticity: str
    method: str


def _spectral_norm_estimate(h):
    return float(np.linalg.norm(h, 2)) if h.shape[0] <= 512 else float(np.linalg.norm(h))


def sign_function(H: BlockOperator, gap_rtol: float = GAP_RTOL):
    """Matrix sign ``H (H^2)^(-1/2)``; returns ``(lambda, method)``.

    Hermitian input uses ``eigh``.  Otherwise the unsymmetric eigenproblem
    is solved and its residual checked; an ill-conditioned eigenbasis falls
    back to the Newton iteration ``X <- (X + X^-1)/2``.  Eigenvalues with
    ``|Re w| <= gap_rtol * ||H||`` raise :class:`GapClosure`.
    """
    h = H.matrix
    kind = hermiticity_class(H)
    scale = _spectral_norm_estimate(h)
    if kind == "hermitian":
        w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
        if np.min(np.abs(w)) <= gap_rtol * scale:
            raise GapClosure(f"eigenvalue {w[np.argmin(np.abs(w))]:.3e} within gap tolerance")
        return (v * np.sign(w)) @ v.conj().T, "eigh"
    w, v = np.linalg.eig(h)
    if np.min(np.abs(w.real)) <= gap_rtol * scale:
        raise GapClosure(f"eigenvalue {w[np.argmin(np.abs(w.real))]:.3e} within gap tolerance")
    resid = np.linalg.norm(h @ v - v * w) / (scale * np.sqrt(h.shape[0]))
    cond = np.linalg.cond(v)
    if resid < 1e-10 and cond < 1e8:
        lam = (v * np.sign(w.real)) @ np.linalg.inv(v)
        return lam, "eig"
    x = h / scale
    for _ in range(100):
        x_new = 0.5 * (x + np.linalg.inv(x))
        if np.linalg.norm(x_new - x) <= 1e-14 * np.linalg.norm(x_new):
            x = x_new
            break
        x = x_new
    return x, "newton"


def eriksen_fw(H: BlockOperator, gap_rtol: float = GAP_RTOL) -> EriksenResult:
    """One-step block-diagonalization ``U = (1 + beta lambda)/2 [1/2 + (beta lambda + lambda beta)/4]^(-1/2)``.

    ``lambda = sign(H)`` and ``H_diag = U H U^-1``.
    """
    lam, method = sign_function(H, gap_rtol)
    b = H.beta
    eye = np.eye(H.dim)
    bl = b @ lam
    z = 0.5 * eye + 0.25 * (bl + lam @ b)
    kind = hermiticity_class(H)
    fz = Factorized(sqrtm_principal(z, hermitian=(kind == "hermitian")))
    u = fz.right(0.5 * (eye + bl))
    if kind == "hermitian":
        u_inv = u.conj().T
    else:
        u_inv = np.linalg.inv(u)
    hd = u @ H.matrix @ u_inv
    if kind == "hermitian":
        hd = 0.5 * (hd + hd.conj().T)
    H_diag = H.like(hd)
    return EriksenResult(
        U=H.like(u),
        H_diag=H_diag,
        sign=H.like(lam),
        odd_residual=rel_norm(odd_part(hd, b), hd),
        hermiticity=kind,
        method=method,
    )


class Propagator:
    """Exact ``exp(-i H t / hbar)`` from one eigendecomposition of ``H``."""

    def __init__(self, H: BlockOperator, hbar: float = 1.0):
        if H.dim > MAX_EVOLVE_DIM:
            raise Unsupported(f"dimension {H.dim} exceeds {MAX_EVOLVE_DIM} for exact evolution")
        self.H = H
        self.hbar = float(hbar)
        h = H.matrix
        self.hermitian = hermiticity_class(H) == "hermitian"
        if self.hermitian:
            self.w, self.v = np.linalg.eigh(0.5 * (h + h.conj().T))
            self._vinv = self.v.conj().T
        else:
            self.w, self.v = np.linalg.eig(h)
            self._vinv = np.linalg.inv(self.v)

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        c = self._vinv @ psi
        return self.v @ (np.exp(-1j * self.w * t / self.hbar) * c)

    def evolve(self, state: WavepacketState, t: float) -> WavepacketState:
        return WavepacketState(self.apply(state.psi, t), state.spinor_rank, state.basis_tag)


def evolve(psi0: WavepacketState, H: BlockOperator, t: float, hbar: float = 1.0) -> WavepacketState:
    """State after time ``t`` under a time-independent ``H``."""
    return Propagator(H, hbar).evolve(psi0, t)


@dataclass
class EhrenfestRecord:
    observable: str
    quantum: list
    classical: list
    abs_deviation: float
    rel_deviation: float
    lambda_over_l: float
    validity_ok: bool
    dt: float
    expectation_point: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def ehrenfest_check(
    psi0: WavepacketState,
    H_fw: BlockOperator,
    ops,
    fields,
    params,
    observable: str = "momentum",
    dt: Optional[float] = None,
    validity_threshold: float = 0.01,
) -> EhrenfestRecord:
    """Compare ``d<A>/dt`` from exact evolution with the classical right-hand side.

    ``observable`` is ``"momentum"`` (kinetic momentum, compared with the
    force equation) or ``"polarization"`` (spin-1/2 only, compared with the
    precession equation).  ``ops`` is the
    :class:`~fwtransform.hamiltonians.SpatialOperators` the Hamiltonian was
    built from.  The time derivative is a central difference with step
    ``dt`` (default ``1e-3``).
    """
    from .hamiltonians import kinetic_momentum_operators, polarization_operators, position_operator
    from .params import PhaseSpinState
    from .semiclassical import rhs_scalar, rhs_spin_half, validity_report

    rank = psi0.spinor_rank
    spin = rank == 4
    prop = Propagator(H_fw, params.hbar)
    if dt is None:
        dt = 1e-3
    pis = kinetic_momentum_operators(ops, rank)
    x_op = position_operator(ops, rank)
    pols = polarization_operators(ops) if spin else ()

    def mean(state, ops_):
        return np.array([state.expectation(o) for o in ops_])

    r = np.array([psi0.expectation(x_op), 0.0, 0.0])
    if not ops.scheme.one_dimensional:
        r = np.array(ops.scheme.nodes()[0])
    pi = mean(psi0, pis)
    P = mean(psi0, pols) if spin else None
    plus, minus = prop.evolve(psi0, dt), prop.evolve(psi0, -dt)
    if observable == "momentum":
        targets = pis
    elif observable == "polarization":
        if not spin:
            raise ValueError("polarization needs a spin-1/2 state")
        targets = pols
    else:
        raise ValueError(f"unknown observable {observable!r}")
    quantum = (mean(plus, targets) - mean(minus, targets)) / (2.0 * dt)
    state = PhaseSpinState(r, pi, P)
    if spin:
        dpi, dP = rhs_spin_half(state, fields, params)
        classical = dpi if observable == "momentum" else dP
    else:
        classical = rhs_scalar(state, fields, params)
    rep = validity_report(state, fields, params, threshold=validity_threshold)
    dev = float(np.linalg.norm(quantum - classical))
    ref = float(np.linalg.norm(classical))
    return EhrenfestRecord(
        observable=observable,
        quantum=[float(v) for v in quantum],
        classical=[float(v) for v in classical],
        abs_deviation=dev,
        rel_deviation=dev / ref if ref > 0 else dev,
        lambda_over_l=rep.lambda_over_l,
        validity_ok=rep.ok,
        dt=float(dt),
        expectation_point={
            "r": [float(v) for v in r],
            "pi": [float(v) for v in pi],
            "P": None if P is None else [float(v) for v in P],
        },
    )
