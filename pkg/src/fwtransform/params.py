"""Particle parameters and the semiclassical phase-space/spin state."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class ParticleParams:
    """Mass, signed charge, g- and EDM eta-factors plus the unit constants.

    Gaussian units: the kinetic momentum is ``pi = p - (e/c) A``.  The magnetic
    and electric dipole moments are derived and scale linearly with ``hbar``.
    """

    m: float = 1.0
    e: float = 1.0
    g: float = 2.0
    eta: float = 0.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def mu0(self) -> float:
        """Dirac magnetic moment ``e hbar / (2 m c)``."""
        return self.e * self.hbar / (2.0 * self.m * self.c)

    @property
    def mu_anom(self) -> float:
        """Anomalous magnetic moment ``(g - 2)/2 * mu0``."""
        return 0.5 * (self.g - 2.0) * self.mu0

    @property
    def edm(self) -> float:
        """Electric dipole moment ``eta/2 * mu0``."""
        return 0.5 * self.eta * self.mu0

    @property
    def anomaly(self) -> float:
        return 0.5 * (self.g - 2.0)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    def with_hbar(self, hbar: float) -> "ParticleParams":
        return replace(self, hbar=float(hbar))

    def energy(self, pi) -> float:
        """``sqrt(m^2 c^4 + c^2 pi^2)`` for a classical kinetic momentum."""
        pi = np.asarray(pi, dtype=float)
        return float(np.sqrt(self.rest_energy**2 + self.c**2 * pi @ pi))

    def to_dict(self) -> dict:
        return {"m": self.m, "e": self.e, "g": self.g, "eta": self.eta, "c": self.c, "hbar": self.hbar}


#: Natural units, Dirac g-factor.
NATURAL = ParticleParams()
#: Electron-like anomaly with negative charge.
ELECTRON_LIKE = ParticleParams(e=-1.0, g=2.002319)


def _vec3(v, name):
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    return a


@dataclass(frozen=True)
class PhaseSpinState:
    """Position ``r``, kinetic momentum ``pi`` and polarization ``P`` (``|P| = 1``).

    ``P`` is ``None`` for spinless particles.
    """

    r: np.ndarray
    pi: np.ndarray
    P: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "r", _vec3(self.r, "r"))
        object.__setattr__(self, "pi", _vec3(self.pi, "pi"))
        if self.P is not None:
            object.__setattr__(self, "P", _vec3(self.P, "P"))

    @property
    def has_spin(self) -> bool:
        return self.P is not None

    def to_vector(self) -> np.ndarray:
        parts = [self.r, self.pi] + ([self.P] if self.P is not None else [])
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, y, spin: bool) -> "PhaseSpinState":
        y = np.asarray(y, dtype=float)
        return cls(y[0:3], y[3:6], y[6:9] if spin else None)
