"""Finite bases that turn position and momentum operators into matrices.

Three schemes are provided:

``MomentumBlock``
    a single plane wave; kinetic momenta and fields are c-numbers.  Suited to
    free particles and to spin dynamics at a fixed momentum.
``PeriodicGrid1D``
    ``n`` equally spaced points in x with spectral differentiation.  The
    momentum window is centred on ``p_offset`` (a Bloch twist), so a fixed
    number of points can follow a semiclassical packet to small hbar.
``HermiteBasis1D``
    the lowest ``n`` harmonic-oscillator functions in x.  Position and
    momentum are tridiagonal, so potentials linear in x (uniform fields) are
    represented exactly away from the truncation edge.

For the one-dimensional schemes the transverse canonical momenta ``p_y`` and
``p_z`` are conserved c-numbers and fields may depend on x only.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .errors import InvalidBasis


def _fmt(v) -> str:
    return f"{float(v):.10g}"


class DiscretizationScheme(ABC):
    """Common interface of all bases."""

    n: int
    one_dimensional: bool = True

    @property
    @abstractmethod
    def tag(self) -> str:
        ...

    def basis_tag(self, hbar: float) -> str:
        return f"{self.tag};hbar={_fmt(hbar)}"

    @abstractmethod
    def nodes(self) -> np.ndarray:
        """Points (shape ``(n, 3)``) at which fields are sampled."""

    @abstractmethod
    def diagonal(self, values) -> np.ndarray:
        """Matrix of multiplication by a function sampled at :meth:`nodes`."""

    @abstractmethod
    def position(self) -> np.ndarray:
        """Matrix of the x coordinate."""

    @abstractmethod
    def momenta(self, hbar: float) -> tuple:
        """Canonical momenta ``(p_x, p_y, p_z)`` as ``n x n`` matrices."""

    @abstractmethod
    def coherent_state(self, center: float, width: float, hbar: float) -> np.ndarray:
        """Normalized Gaussian packet in x centred at ``center``.

        Its mean momentum is the scheme's central momentum; ``width`` is the
        position standard deviation.
        """

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=complex)


class MomentumBlock(DiscretizationScheme):
    """A single plane wave of canonical momentum ``momentum`` located at ``position``."""

    one_dimensional = False

    def __init__(self, momentum=(0.0, 0.0, 0.0), position=(0.0, 0.0, 0.0)):
        self.momentum = np.asarray(momentum, dtype=float).reshape(3)
        self.point = np.asarray(position, dtype=float).reshape(3)
        self.n = 1

    @property
    def tag(self):
        return "momentum[" + ",".join(_fmt(v) for v in self.momentum) + "]"

    def nodes(self):
        return self.point.reshape(1, 3)

    def diagonal(self, values):
        return np.asarray(values, dtype=complex).reshape(1, 1)

    def position(self):
        return np.array([[self.point[0]]], dtype=complex)

    def momenta(self, hbar):
        return tuple(np.array([[p]], dtype=complex) for p in self.momentum)

    def coherent_state(self, center=0.0, width=1.0, hbar=1.0):
        return np.ones(1, dtype=complex)


class PeriodicGrid1D(DiscretizationScheme):
    """Uniform periodic grid in x with a Fourier (spectral) momentum operator.

    Parameters
    ----------
    n : int
        Number of grid points.
    length : float
        Box length; the grid covers ``[center - length/2, center + length/2)``.
    p_offset : float
        Central x-momentum.  States are represented as
        ``exp(i p_offset x / hbar) * envelope(x)``.
    p_perp : (float, float)
        Conserved canonical momenta ``(p_y, p_z)``.
    """

    def __init__(self, n, length, p_offset=0.0, p_perp=(0.0, 0.0), center=0.0):
        if n < 2:
            raise InvalidBasis("grid needs at least two points")
        if length <= 0:
            raise InvalidBasis("grid length must be positive")
        self.n = int(n)
        self.length = float(length)
        self.p_offset = float(p_offset)
        self.p_perp = tuple(float(v) for v in p_perp)
        self.center = float(center)
        self.dx = self.length / self.n
        self.x = self.center - 0.5 * self.length + self.dx * np.arange(self.n)
        self.k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        # unitary DFT matrix: fft(v) / sqrt(n) == F @ v
        self._F = np.fft.fft(np.eye(self.n), axis=0) / math.sqrt(self.n)

    @property
    def tag(self):
        return (
            f"grid1d[n={self.n},L={_fmt(self.length)},x0={_fmt(self.center)},"
            f"poff={_fmt(self.p_offset)},pperp={_fmt(self.p_perp[0])},{_fmt(self.p_perp[1])}]"
        )

    def nodes(self):
        pts = np.zeros((self.n, 3))
        pts[:, 0] = self.x
        return pts

    def diagonal(self, values):
        return np.diag(np.asarray(values, dtype=complex).reshape(self.n))

    def position(self):
        return np.diag(self.x).astype(complex)

    def momentum_values(self, hbar):
        """x-momentum eigenvalues, in FFT order."""
        return self.p_offset + hbar * self.k

    def momenta(self, hbar):
        F = self._F
        px = F.conj().T @ np.diag(self.momentum_values(hbar)) @ F
        px = 0.5 * (px + px.conj().T)
        eye = self.identity()
        return px, self.p_perp[0] * eye, self.p_perp[1] * eye

    def coherent_state(self, center, width, hbar=1.0):
        env = np.exp(-((self.x - center) ** 2) / (4.0 * width**2)).astype(complex)
        return env / np.linalg.norm(env)


def hermite_functions(nmax: int, xi: np.ndarray) -> np.ndarray:
    """Normalized oscillator functions ``psi_k(xi)``, ``k < nmax``, rows indexed by k."""
    out = np.zeros((nmax, xi.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi**2)
    if nmax > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, nmax - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


class HermiteBasis1D(DiscretizationScheme):
    """Truncated harmonic-oscillator basis in x.

    ``x = center + width (a + a^dag) / sqrt(2)`` and
    ``p_x = p_offset + hbar (a - a^dag) / (i sqrt(2) width)``; both are exact
    tridiagonal matrices, and the canonical commutator holds except in the
    last row and column.  Multiplication by a general function uses the
    discrete-variable representation built on the eigenvectors of ``x``, which
    is exact for polynomials of degree one.
    """

    def __init__(self, n, width=1.0, p_offset=0.0, p_perp=(0.0, 0.0), center=0.0):
        if n < 2:
            raise InvalidBasis("need at least two oscillator functions")
        if width <= 0:
            raise InvalidBasis("oscillator width must be positive")
        self.n = int(n)
        self.width = float(width)
        self.p_offset = float(p_offset)
        self.p_perp = tuple(float(v) for v in p_perp)
        self.center = float(center)
        off = np.sqrt(np.arange(1, self.n))
        self._a = np.diag(off, 1).astype(complex)
        xi = (np.diag(off, 1) + np.diag(off, -1)) / math.sqrt(2.0)
        self._xi_nodes, self._dvr = np.linalg.eigh(xi)

    @property
    def tag(self):
        return (
            f"hermite1d[n={self.n},b={_fmt(self.width)},x0={_fmt(self.center)},"
            f"poff={_fmt(self.p_offset)},pperp={_fmt(self.p_perp[0])},{_fmt(self.p_perp[1])}]"
        )

    def nodes(self):
        pts = np.zeros((self.n, 3))
        pts[:, 0] = self.center + self.width * self._xi_nodes
        return pts

    def diagonal(self, values):
        v = np.asarray(values, dtype=complex).reshape(self.n)
        return (self._dvr * v) @ self._dvr.T

    def position(self):
        a = self._a
        return self.center * self.identity() + self.width / math.sqrt(2.0) * (a + a.T)

    def momenta(self, hbar):
        a = self._a
        px = self.p_offset * self.identity() + hbar / (1j * math.sqrt(2.0) * self.width) * (a - a.T)
        eye = self.identity()
        return px, self.p_perp[0] * eye, self.p_perp[1] * eye

    def coherent_state(self, center, width, hbar=1.0):
        b = self.width
        half = max(12.0 * width, 6.0 * b * math.sqrt(self.n)) + abs(center - self.center)
        x = np.linspace(self.center - half, self.center + half, 8 * self.n + 4001)
        xi = (x - self.center) / b
        basis = hermite_functions(self.n, xi) / math.sqrt(b)
        env = np.exp(-((x - center) ** 2) / (4.0 * width**2))
        coeff = np.trapezoid(basis * env, x, axis=1).astype(complex)
        return coeff / np.linalg.norm(coeff)
