"""Finite-dimensional beta-graded block operators.

Every operator is a complex square matrix acting on ``spinor_rank`` spinor
components over an ``n``-dimensional spatial basis.  The spinor index is the
slow one, so an operator built from a spin matrix ``S`` and a spatial matrix
``A`` is ``kron(S, A)`` and beta is ``diag(+1, ..., +1, -1, ..., -1)`` with the
upper spinor first.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import InvalidBasis, SingularSqrt

#: Default relative Frobenius tolerance for grading and hermiticity predicates.
RTOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)

# two-component (spin-0) matrices acting on (phi, chi)
RHO1, RHO2, RHO3 = SIGMA_X, SIGMA_Y, SIGMA_Z


def _blocks(a, b, c, d):
    return np.block([[a, b], [c, d]])


_Z2 = np.zeros((2, 2), dtype=complex)
BETA4 = _blocks(I2, _Z2, _Z2, -I2)
ALPHA = tuple(_blocks(_Z2, s, s, _Z2) for s in PAULI)
GAMMA = tuple(_blocks(_Z2, s, -s, _Z2) for s in PAULI)
SIGMA = tuple(_blocks(s, _Z2, _Z2, s) for s in PAULI)
POLARIZATION = tuple(_blocks(s, _Z2, _Z2, -s) for s in PAULI)


def beta_matrix(spinor_rank: int, n: int) -> np.ndarray:
    """Return beta for ``spinor_rank`` components over ``n`` basis functions."""
    if spinor_rank not in (2, 4):
        raise InvalidBasis(f"spinor_rank must be 2 or 4, got {spinor_rank}")
    half = spinor_rank // 2
    signs = np.concatenate([np.ones(half * n), -np.ones(half * n)])
    return np.diag(signs).astype(complex)


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """A square complex matrix tagged with its spinor rank and basis.

    The wrapped array is copied and made read-only, so instances can be
    shared freely.
    """

    matrix: np.ndarray
    spinor_rank: int
    basis_tag: str = "generic"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidBasis(f"operator matrix must be square, got shape {m.shape}")
        if self.spinor_rank not in (2, 4):
            raise InvalidBasis(f"spinor_rank must be 2 or 4, got {self.spinor_rank}")
        if m.shape[0] % self.spinor_rank:
            raise InvalidBasis(
                f"dimension {m.shape[0]} is not a multiple of spinor_rank {self.spinor_rank}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    # construction helpers
    @classmethod
    def from_parts(cls, spin, spatial, basis_tag="generic"):
        """``kron(spin, spatial)`` as a block operator."""
        spin = np.asarray(spin, dtype=complex)
        return cls(np.kron(spin, np.asarray(spatial, dtype=complex)), spin.shape[0], basis_tag)

    @classmethod
    def identity(cls, spinor_rank, n, basis_tag="generic"):
        return cls(np.eye(spinor_rank * n, dtype=complex), spinor_rank, basis_tag)

    @classmethod
    def zeros(cls, spinor_rank, n, basis_tag="generic"):
        return cls(np.zeros((spinor_rank * n,) * 2, dtype=complex), spinor_rank, basis_tag)

    def like(self, matrix) -> "BlockOperator":
        """Wrap ``matrix`` with this operator's rank and basis."""
        return BlockOperator(matrix, self.spinor_rank, self.basis_tag)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dim // self.spinor_rank

    @cached_property
    def beta(self) -> np.ndarray:
        return beta_matrix(self.spinor_rank, self.n)

    def beta_operator(self) -> "BlockOperator":
        return self.like(self.beta)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def dagger(self) -> "BlockOperator":
        return self.like(self.matrix.conj().T)

    def upper_block(self) -> np.ndarray:
        """The block acting on the upper spinor (positive-energy block in FW form)."""
        h = self.dim // 2
        return self.matrix[:h, :h]

    def lower_block(self) -> np.ndarray:
        h = self.dim // 2
        return self.matrix[h:, h:]

    def compatible(self, other: "BlockOperator") -> None:
        if not isinstance(other, BlockOperator):
            raise InvalidBasis(f"expected BlockOperator, got {type(other).__name__}")
        if (
            other.basis_tag != self.basis_tag
            or other.spinor_rank != self.spinor_rank
            or other.dim != self.dim
        ):
            raise InvalidBasis(
                f"basis mismatch: ({self.basis_tag}, rank {self.spinor_rank}, dim {self.dim})"
                f" vs ({other.basis_tag}, rank {other.spinor_rank}, dim {other.dim})"
            )

    # arithmetic
    def __add__(self, other):
        if isinstance(other, BlockOperator):
            self.compatible(other)
            return self.like(self.matrix + other.matrix)
        return self.like(self.matrix + other * np.eye(self.dim))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, BlockOperator):
            self.compatible(other)
            return self.like(self.matrix - other.matrix)
        return self.like(self.matrix - other * np.eye(self.dim))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.like(-self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, BlockOperator):
            return NotImplemented
        return self.like(scalar * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.like(self.matrix / scalar)

    def __matmul__(self, other):
        if isinstance(other, BlockOperator):
            self.compatible(other)
            return self.like(self.matrix @ other.matrix)
        return self.matrix @ other

    def __repr__(self):
        return (
            f"BlockOperator(dim={self.dim}, spinor_rank={self.spinor_rank}, "
            f"basis_tag={self.basis_tag!r}, norm={self.norm():.6g})"
        )


@dataclass(frozen=True)
class GradedParts:
    even: BlockOperator
    odd: BlockOperator


def rel_norm(a, ref) -> float:
    """``||a|| / ||ref||`` in the Frobenius norm (``||a||`` when ``ref`` is zero)."""
    a = a.matrix if isinstance(a, BlockOperator) else np.asarray(a)
    ref = ref.matrix if isinstance(ref, BlockOperator) else np.asarray(ref)
    den = np.linalg.norm(ref)
    num = np.linalg.norm(a)
    return float(num / den) if den > 0 else float(num)


def _beta_for(a: np.ndarray, spinor_rank: int) -> np.ndarray:
    if a.shape[0] % spinor_rank:
        raise InvalidBasis(f"dimension {a.shape[0]} incompatible with spinor_rank {spinor_rank}")
    return beta_matrix(spinor_rank, a.shape[0] // spinor_rank)


def _split(a: np.ndarray, beta: np.ndarray):
    if beta.shape != a.shape:
        raise InvalidBasis(f"beta of shape {beta.shape} does not fit operator of shape {a.shape}")
    # beta is diagonal with +-1, so beta A beta is a sign flip of the off-diagonal blocks
    s = np.diag(beta).real
    flipped = a * np.outer(s, s)
    return 0.5 * (a + flipped), 0.5 * (a - flipped)


def even_part(a: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return _split(a, beta)[0]


def odd_part(a: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return _split(a, beta)[1]


def grade_split(A: BlockOperator) -> GradedParts:
    """Split ``A`` into the parts commuting and anticommuting with beta.

    ``even = (A + beta A beta) / 2`` and ``odd = (A - beta A beta) / 2``.
    """
    if not isinstance(A, BlockOperator):
        raise InvalidBasis("grade_split needs a BlockOperator carrying its basis")
    ev, od = _split(A.matrix, A.beta)
    return GradedParts(A.like(ev), A.like(od))


def is_even(A: BlockOperator, tol: float = RTOL) -> bool:
    return rel_norm(grade_split(A).odd, A) <= tol


def is_odd(A: BlockOperator, tol: float = RTOL) -> bool:
    return rel_norm(grade_split(A).even, A) <= tol


def commutator(A: BlockOperator, B: BlockOperator) -> BlockOperator:
    A.compatible(B)
    return A.like(A.matrix @ B.matrix - B.matrix @ A.matrix)


def anticommutator(A: BlockOperator, B: BlockOperator) -> BlockOperator:
    A.compatible(B)
    return A.like(A.matrix @ B.matrix + B.matrix @ A.matrix)


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def acomm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def hermitian_defect(a: np.ndarray) -> float:
    return rel_norm(a - a.conj().T, a)


def pseudo_adjoint(A: BlockOperator) -> BlockOperator:
    """``beta A^dagger beta``."""
    b = A.beta
    return A.like(b @ A.matrix.conj().T @ b)


def is_hermitian(A: BlockOperator, tol: float = RTOL) -> bool:
    return hermitian_defect(A.matrix) <= tol


def is_pseudo_hermitian(A: BlockOperator, tol: float = RTOL) -> bool:
    return rel_norm(pseudo_adjoint(A).matrix - A.matrix, A) <= tol


def hermitian_function(a: np.ndarray, f) -> np.ndarray:
    """Apply ``f`` to the spectrum of a hermitian matrix."""
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    return (v * f(w)) @ v.conj().T


def sqrtm_principal(a: np.ndarray, hermitian: bool | None = None) -> np.ndarray:
    """Principal square root of a matrix with spectrum in the open right half plane.

    Hermitian input goes through ``eigh``; anything else through a complex
    Schur decomposition.  Raises :class:`SingularSqrt` when an eigenvalue has
    non-positive real part.
    """
    a = np.asarray(a, dtype=complex)
    if hermitian is None:
        hermitian = hermitian_defect(a) <= 1e-13
    if hermitian:
        h = 0.5 * (a + a.conj().T)
        w, v = np.linalg.eigh(h)
        if w.size and w[0] <= 0.0:
            raise SingularSqrt(f"hermitian operand has eigenvalue {w[0]:.3e} <= 0")
        return (v * np.sqrt(w)) @ v.conj().T
    t, _ = sla.schur(a, output="complex")
    ev = np.diag(t)
    if ev.size and ev.real.min() <= 0.0:
        bad = ev[np.argmin(ev.real)]
        raise SingularSqrt(f"operand has eigenvalue {bad:.3e} with non-positive real part")
    root = sla.sqrtm(a)
    return np.asarray(root, dtype=complex)


def operator_sqrt(A: BlockOperator, hermitian: bool | None = None) -> BlockOperator:
    """Principal square root ``S`` with ``S @ S == A``."""
    return A.like(sqrtm_principal(A.matrix, hermitian))


class Factorized:
    """LU (or Cholesky, for hermitian positive definite input) factorization.

    Used wherever an operator inverse appears in a formula: products with the
    inverse are formed by triangular solves, never by an explicit inverse.
    """

    def __init__(self, a: np.ndarray):
        a = np.asarray(a, dtype=complex)
        self.shape = a.shape
        self._cho = None
        self._lu = None
        if hermitian_defect(a) <= 1e-13:
            try:
                self._cho = sla.cho_factor(0.5 * (a + a.conj().T))
            except np.linalg.LinAlgError:
                self._cho = None
        if self._cho is None:
            with warnings.catch_warnings():
                # exact zero pivots are reported below as SingularSqrt
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                self._lu = sla.lu_factor(a, check_finite=True)
            piv_diag = np.abs(np.diag(self._lu[0]))
            if piv_diag.min() == 0.0:
                raise SingularSqrt("operator to be inverted is singular")

    def left(self, x: np.ndarray) -> np.ndarray:
        """``A^{-1} x``."""
        if self._cho is not None:
            return sla.cho_solve(self._cho, x)
        return sla.lu_solve(self._lu, x)

    def right(self, x: np.ndarray) -> np.ndarray:
        """``x A^{-1}``, via ``(A^H)^{-1} x^H``."""
        if self._cho is not None:
            return sla.cho_solve(self._cho, x.conj().T).conj().T
        return sla.lu_solve(self._lu, x.conj().T, trans=2).conj().T

    def inverse(self) -> np.ndarray:
        return self.left(np.eye(self.shape[0], dtype=complex))
