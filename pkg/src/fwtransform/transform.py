"""Foldy-Wouthuysen transformation of ``H = beta M + E + O``.

Two routes are implemented:

* :func:`exact_fw` for the commuting case ``[E, O] = [M, O] = 0``, where a
  single unitary (pseudo-unitary) rotation block-diagonalizes ``H`` exactly
  and ``H_FW = beta eps + E`` with ``eps = sqrt(M^2 + O^2)``;
* :func:`general_fw` for arbitrary even ``M``, ``E`` and odd ``O`` in static
  fields.  A first rotation ``U = sign(beta eps + beta M - O) beta`` leaves an
  odd remainder of first order in hbar (:func:`general_fw_step`,
  :func:`resplit`), which :func:`final_fw` folds into the even part.

:func:`hbar_scaling_probe` measures how the remainders scale with hbar.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .algebra import (
    BlockOperator,
    Factorized,
    acomm,
    comm,
    hermitian_defect,
    odd_part,
    rel_norm,
    sqrtm_principal,
)
from .errors import NotExactCase, ScalingRangeWarning, Unsupported, ValidityWarning

#: Relative tolerance for deciding that two operators commute.
COMMUTATION_TOL = 1e-12


@dataclass(frozen=True)
class SplitHamiltonian:
    """``H = beta M + E + O`` given as its three parts.

    Iterating yields ``M, E, O`` so that ``exact_fw(*parts)`` works.
    """

    M: BlockOperator
    E: BlockOperator
    O: BlockOperator
    stationary: bool = True

    def __iter__(self):
        return iter((self.M, self.E, self.O))

    def total(self) -> BlockOperator:
        return self.M.beta_operator() @ self.M + self.E + self.O


@dataclass(frozen=True)
class FWResult:
    """Outcome of a transformation.

    ``U`` is the (first-stage) transformation operator, ``H_prime`` the
    rotated Hamiltonian ``U H U^-1`` split as ``beta eps + E_prime + O_prime``,
    and ``H_fw`` the final block-diagonal Hamiltonian.
    """

    U: BlockOperator
    H_fw: BlockOperator
    H_prime: BlockOperator
    E_prime: BlockOperator
    O_prime: BlockOperator
    epsilon: BlockOperator
    residual_odd_norm: float
    unitarity_defect: float
    method: str
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StepDiagnostics:
    epsilon: BlockOperator
    T: BlockOperator
    U: BlockOperator
    U_inv: BlockOperator
    path: str
    mo_commutator: float
    conjugation_defect: float


def _arrays(M, E, O):
    M.compatible(E)
    M.compatible(O)
    return M.matrix, E.matrix, O.matrix, M.beta


def hermiticity_class(H: BlockOperator, tol: float = 1e-10) -> str:
    """``"hermitian"``, ``"pseudo-hermitian"`` (``beta H^dag beta = H``) or ``"neither"``."""
    h = H.matrix
    if hermitian_defect(h) <= tol:
        return "hermitian"
    b = H.beta
    if rel_norm(b @ h.conj().T @ b - h, h) <= tol:
        return "pseudo-hermitian"
    return "neither"


def unitarity_defect(U: BlockOperator, kind: str) -> float:
    """``||U^dag U - I||_F`` (hermitian) or ``||beta U^dag beta U - I||_F`` (pseudo)."""
    u = U.matrix
    eye = np.eye(U.dim)
    if kind == "pseudo-hermitian":
        b = U.beta
        return float(np.linalg.norm(b @ u.conj().T @ b @ u - eye))
    return float(np.linalg.norm(u.conj().T @ u - eye))


def _commutes(a, b, tol):
    scale = np.linalg.norm(a) * np.linalg.norm(b)
    c = np.linalg.norm(comm(a, b))
    return c <= tol * scale or c == 0.0, (c / scale if scale else 0.0)


def resplit(H_prime: BlockOperator, epsilon: BlockOperator):
    """Even and odd remainders of ``H' = beta eps + E' + O'``.

    ``E' = (H' + beta H' beta)/2 - beta eps`` and ``O' = (H' - beta H' beta)/2``.
    """
    H_prime.compatible(epsilon)
    b = H_prime.beta
    h = H_prime.matrix
    flipped = b @ h @ b
    e_p = 0.5 * (h + flipped) - b @ epsilon.matrix
    o_p = 0.5 * (h - flipped)
    return H_prime.like(e_p), H_prime.like(o_p)


def final_fw(epsilon: BlockOperator, E_prime: BlockOperator, O_prime: BlockOperator) -> BlockOperator:
    """``beta eps + E' + (1/4) beta {O'^2, 1/eps}``.

    Terms of third order in ``O'`` and commutator corrections of order hbar^2
    are not included.
    """
    epsilon.compatible(E_prime)
    epsilon.compatible(O_prime)
    b = epsilon.beta
    eps = epsilon.matrix
    o2 = O_prime.matrix @ O_prime.matrix
    fe = Factorized(eps)
    anti = fe.left(o2) + fe.right(o2)
    return epsilon.like(b @ eps + E_prime.matrix + 0.25 * b @ anti)


def exact_fw(M: BlockOperator, E: BlockOperator, O: BlockOperator, tol: float = COMMUTATION_TOL) -> FWResult:
    """Exact transformation for ``[E, O] = [M, O] = 0``.

    ``U = (eps + M + beta O) / sqrt(2 eps (eps + M))`` and
    ``H_FW = beta eps + E``.  Raises :class:`NotExactCase` when either
    commutator exceeds ``tol`` relative to the product of norms.
    """
    m, e, o, b = _arrays(M, E, O)
    ok_eo, c_eo = _commutes(e, o, tol)
    ok_mo, c_mo = _commutes(m, o, tol)
    if not (ok_eo and ok_mo):
        raise NotExactCase(
            f"exact transform needs [E,O] = [M,O] = 0; relative sizes {c_eo:.2e}, {c_mo:.2e}"
        )
    eps = sqrtm_principal(m @ m + o @ o)
    norm_sq = 2.0 * eps @ (eps + m)
    fn = Factorized(sqrtm_principal(norm_sq))
    u = fn.right(eps + m + b @ o)
    u_inv = fn.right(eps + m - b @ o)
    h = b @ m + e + o
    h_prime = u @ h @ u_inv
    H = M.like(h)
    kind = hermiticity_class(H)
    U = M.like(u)
    Hp = M.like(h_prime)
    epsilon = M.like(eps)
    E_p, O_p = resplit(Hp, epsilon)
    H_fw = M.like(b @ eps + e)
    return FWResult(
        U=U,
        H_fw=H_fw,
        H_prime=Hp,
        E_prime=E_p,
        O_prime=O_p,
        epsilon=epsilon,
        residual_odd_norm=rel_norm(O_p, Hp),
        unitarity_defect=unitarity_defect(U, kind),
        method="exact",
        diagnostics={
            "conjugation_defect": rel_norm(h_prime - H_fw.matrix, H_fw),
            "hermiticity": kind,
            "eo_commutator": c_eo,
            "mo_commutator": c_mo,
        },
    )


def general_fw_step(
    M: BlockOperator,
    E: BlockOperator,
    O: BlockOperator,
    *,
    stationary: bool = True,
    path: str = "auto",
    tol: float = COMMUTATION_TOL,
):
    """First-stage transform; returns ``(H_prime, StepDiagnostics)``.

    ``H' = beta eps + E + (2T)^-1 S T^-1`` with ``T = sqrt((beta eps + beta M - O)^2)``
    and ``S`` the nested commutator sum for static fields
    (``F = E``)::

        S = [T,[T, beta eps + E]] + beta [O,[O,M]] - [O,[O,E]]
            - [eps+M,[eps+M,E]] - [eps+M,[M,O]]
            - beta {O,[eps+M,E]} + beta {eps+M,[O,E]}

    When ``[M, O] = 0`` the terms containing ``[M, O]`` and
    ``[T,[T, beta eps]]`` vanish and ``T = sqrt(2 eps (eps + M))``; ``path``
    selects ``"full"``, ``"reduced"`` or ``"auto"`` (reduced when the
    commutator is below ``tol``).
    """
    if not stationary:
        raise Unsupported("time-dependent fields are not supported by the numeric engine")
    m, e, o, b = _arrays(M, E, O)
    mo_small, c_mo = _commutes(m, o, tol)
    if path == "auto":
        path = "reduced" if mo_small else "full"
    if path not in ("full", "reduced"):
        raise ValueError(f"unknown path {path!r}")
    if path == "reduced" and not mo_small:
        raise NotExactCase(f"reduced path needs [M,O] = 0; relative size {c_mo:.2e}")

    eps = sqrtm_principal(m @ m + o @ o)
    em = eps + m
    x = b @ eps + b @ m - o
    if path == "full":
        t = sqrtm_principal(x @ x)
        s = (
            comm(t, comm(t, b @ eps + e))
            + b @ comm(o, comm(o, m))
            - comm(o, comm(o, e))
            - comm(em, comm(em, e))
            - comm(em, comm(m, o))
            - b @ acomm(o, comm(em, e))
            + b @ acomm(em, comm(o, e))
        )
    else:
        t = sqrtm_principal(2.0 * eps @ em)
        s = (
            comm(t, comm(t, e))
            - comm(o, comm(o, e))
            - comm(em, comm(em, e))
            - b @ acomm(o, comm(em, e))
            + b @ acomm(em, comm(o, e))
        )
    ft = Factorized(t)
    h_prime = b @ eps + e + 0.5 * ft.left(ft.right(s))
    sign_x = ft.left(x)
    u = sign_x @ b
    u_inv = b @ sign_x
    h = b @ m + e + o
    conj = rel_norm(u @ h @ u_inv - h_prime, h_prime)
    Hp = M.like(h_prime)
    diag = StepDiagnostics(
        epsilon=M.like(eps),
        T=M.like(t),
        U=M.like(u),
        U_inv=M.like(u_inv),
        path=path,
        mo_commutator=c_mo,
        conjugation_defect=conj,
    )
    return Hp, diag


def general_fw(
    M: BlockOperator,
    E: BlockOperator,
    O: BlockOperator,
    *,
    stationary: bool = True,
    path: str = "auto",
    tol: float = COMMUTATION_TOL,
) -> FWResult:
    """First-stage rotation, even/odd resplit and second-stage folding."""
    Hp, d = general_fw_step(M, E, O, stationary=stationary, path=path, tol=tol)
    E_p, O_p = resplit(Hp, d.epsilon)
    H_fw = final_fw(d.epsilon, E_p, O_p)
    H = M.like(M.beta @ M.matrix + E.matrix + O.matrix)
    kind = hermiticity_class(H)
    return FWResult(
        U=d.U,
        H_fw=H_fw,
        H_prime=Hp,
        E_prime=E_p,
        O_prime=O_p,
        epsilon=d.epsilon,
        residual_odd_norm=rel_norm(odd_part(H_fw.matrix, H_fw.beta), H_fw),
        unitarity_defect=unitarity_defect(d.U, kind),
        method="general",
        diagnostics={
            "path": d.path,
            "conjugation_defect": d.conjugation_defect,
            "first_stage_odd_norm": O_p.norm(),
            "mo_commutator": d.mo_commutator,
            "hermiticity": kind,
        },
    )


def transform(parts: SplitHamiltonian, method: str = "auto", tol: float = COMMUTATION_TOL) -> FWResult:
    """Dispatch to :func:`exact_fw` when its preconditions hold, else :func:`general_fw`."""
    if method == "exact":
        return exact_fw(*parts, tol=tol)
    if method == "general":
        return general_fw(*parts, stationary=parts.stationary, tol=tol)
    try:
        return exact_fw(*parts, tol=tol)
    except NotExactCase:
        return general_fw(*parts, stationary=parts.stationary, tol=tol)


class ScalingCase(NamedTuple):
    """What a scaling-probe builder returns for one value of hbar.

    ``state`` (optional) is a semiclassical probe vector; when given, every
    norm is ``||X state||`` rather than the Frobenius norm of ``X``.
    ``reference`` (optional) is an approximation of the FW Hamiltonian whose
    distance to the transform and to the oracle is also reported.
    """

    parts: SplitHamiltonian
    state: Optional[np.ndarray] = None
    lambda_over_l: Optional[float] = None
    reference: Optional[BlockOperator] = None


@dataclass
class ScalingReport:
    hbar: np.ndarray
    norms: dict
    slopes: dict
    flags: dict
    validity_warnings: list
    floor: dict

    def summary(self) -> dict:
        return {
            "hbar": self.hbar.tolist(),
            "norms": {k: np.asarray(v).tolist() for k, v in self.norms.items()},
            "slopes": dict(self.slopes),
            "flags": dict(self.flags),
            "validity_warnings": list(self.validity_warnings),
        }


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        return float("nan")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _probe_point(builder, hbar, oracle):
    from .oracle import eriksen_fw

    case = builder(hbar)
    if not isinstance(case, ScalingCase):
        case = ScalingCase(*case) if isinstance(case, tuple) else ScalingCase(case)
    parts = case.parts
    res = general_fw(*parts, stationary=parts.stationary)
    state = case.state

    def size(x):
        return float(np.linalg.norm(x @ state)) if state is not None else float(np.linalg.norm(x))

    b = res.H_fw.beta
    out = {
        "odd_remainder": size(res.O_prime.matrix),
        "fw_odd": size(odd_part(res.H_fw.matrix, b)),
    }
    scale = size(res.H_fw.matrix)
    oracle_h = eriksen_fw(parts.total()).H_diag.matrix if oracle else None
    if oracle:
        out["oracle_gap"] = size(res.H_fw.matrix - oracle_h)
    if case.reference is not None:
        ref = case.reference.matrix
        out["reference_gap"] = size(res.H_fw.matrix - ref)
        if oracle:
            out["oracle_reference_gap"] = size(oracle_h - ref)
    return out, scale, case.lambda_over_l


def hbar_scaling_probe(
    builder: Callable[[float], ScalingCase],
    hbar_values: Sequence[float],
    *,
    oracle: bool = True,
    jobs: int = 1,
    validity_threshold: float = 0.05,
    floor_rtol: float = 1e-11,
) -> ScalingReport:
    """Fit log-log slopes of the transform remainders against hbar.

    ``builder(hbar)`` returns a :class:`ScalingCase`.  Reported quantities are
    ``odd_remainder`` (``O'`` after the first stage), ``fw_odd`` (odd part of
    the final Hamiltonian), with ``oracle`` also ``oracle_gap`` (``H_FW``
    minus the Eriksen block-diagonal form), and with a reference operator
    ``reference_gap`` and ``oracle_reference_gap``.  A quantity sitting at
    round-off for every hbar gets slope NaN and a ``"round-off"`` flag.
    """
    hbars = np.asarray(sorted(float(h) for h in hbar_values))
    if hbars.size < 3:
        raise ValueError("scaling probe needs at least three hbar values")
    if hbars.max() / hbars.min() < 10.0:
        warnings.warn(
            f"hbar values span a factor {hbars.max() / hbars.min():.3g} < 10",
            ScalingRangeWarning,
            stacklevel=2,
        )
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda h: _probe_point(builder, h, oracle), hbars))
    else:
        results = [_probe_point(builder, h, oracle) for h in hbars]

    keys = list(results[0][0])
    norms = {k: np.array([r[0][k] for r in results]) for k in keys}
    scales = np.array([r[1] for r in results])
    bad_validity = []
    for h, (_, _, lam) in zip(hbars, results):
        if lam is not None and lam > validity_threshold:
            bad_validity.append({"hbar": float(h), "lambda_over_l": float(lam)})
    if bad_validity:
        warnings.warn(
            f"validity condition lambda/l <= {validity_threshold} violated at {len(bad_validity)} point(s)",
            ValidityWarning,
            stacklevel=2,
        )
    slopes, flags, floor = {}, {}, {}
    for k in keys:
        fl = floor_rtol * scales
        floor[k] = fl.tolist()
        if np.all(norms[k] <= fl):
            slopes[k] = float("nan")
            flags[k] = "round-off"
        else:
            slopes[k] = loglog_slope(hbars, norms[k])
            flags[k] = "ok" if np.all(norms[k] > fl) else "partly-round-off"
    return ScalingReport(hbars, norms, slopes, flags, bad_validity, floor)


def random_commuting_triple(rng: np.random.Generator, dim: int, spinor_rank: int = 4) -> SplitHamiltonian:
    """Random hermitian ``M, E, O`` that are functions of one odd generator.

    With ``G`` odd and hermitian, ``O = a G``, ``M = m0 + b G^2`` and
    ``E = c G^2 + d G^4`` (``m0 > 0``, ``b >= 0``), so ``[E, O] = [M, O] = 0``.
    ``|E| <= 0.75 m0`` keeps the positive and negative branches apart, which
    the sign-function oracle needs.  ``dim`` must be a multiple of
    ``spinor_rank``.
    """
    if dim % spinor_rank:
        raise ValueError("dim must be a multiple of spinor_rank")
    half = dim // 2
    blk = rng.normal(size=(half, half)) + 1j * rng.normal(size=(half, half))
    g = np.zeros((dim, dim), dtype=complex)
    g[:half, half:] = blk
    g[half:, :half] = blk.conj().T
    g /= np.linalg.norm(g, 2)
    g2 = g @ g
    a, m0, b = rng.uniform(0.2, 3.0), rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0)
    c, d = m0 * rng.uniform(-0.5, 0.5), m0 * rng.uniform(-0.25, 0.25)
    eye = np.eye(dim)
    mk = lambda x: BlockOperator(x, spinor_rank, f"random[{dim}]")
    return SplitHamiltonian(mk(m0 * eye + b * g2), mk(c * g2 + d * g2 @ g2), mk(a * g))
