"""Classical equations of motion for the kinetic momentum and polarization.

Operators of the FW Hamiltonian are replaced by their mean values: ``pi`` by
the classical kinetic momentum, the polarization operator by a unit vector
``P``.  Fields and field gradients are evaluated at the instantaneous
position, which moves with the group velocity ``dr/dt = c^2 pi / eps'``.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StiffnessError, ValidityError, ValidityWarning
from .fields import FieldConfiguration
from .params import ParticleParams, PhaseSpinState

DEFAULT_VALIDITY_THRESHOLD = 0.05


@dataclass(frozen=True)
class ValidityReport:
    """Semiclassical applicability at one phase-space point.

    ``lambda_over_l`` uses the de Broglie wavelength ``2 pi hbar / |pi|``.
    """

    lambda_over_l: float
    pl_over_hbar: float
    ok: bool
    threshold: float
    wavelength: float
    length_scale: float
    convention: str = "lambda = 2*pi*hbar/|pi|"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def validity_report(
    state: PhaseSpinState,
    fields: FieldConfiguration,
    params: ParticleParams,
    threshold: float = DEFAULT_VALIDITY_THRESHOLD,
) -> ValidityReport:
    """Compare the de Broglie wavelength with the field's nonuniformity scale.

    Uniform fields (``l = inf``) are always valid.
    """
    p = float(np.linalg.norm(state.pi))
    l = float(fields.length_scale)
    lam = 2.0 * math.pi * params.hbar / p if p > 0 else math.inf
    if math.isinf(l):
        ratio = 0.0
        pl = math.inf
    else:
        ratio = lam / l
        pl = p * l / params.hbar
    return ValidityReport(
        lambda_over_l=ratio,
        pl_over_hbar=pl,
        ok=bool(ratio <= threshold),
        threshold=float(threshold),
        wavelength=lam,
        length_scale=l,
    )


def _cross(a, b):
    # np.cross is slow for single 3-vectors
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def _field_point(fields, r):
    r = np.asarray(r, dtype=float).reshape(1, 3)
    return fields.E(r)[0], fields.H(r)[0], fields.Phi(r)[0]


FORCE_TERMS = (
    "electric",
    "lorentz",
    "anomalous_zeeman_gradient",
    "normal_zeeman_gradient",
    "anomalous_spin_orbit_gradient",
    "normal_spin_orbit_gradient",
    "anomalous_helicity_gradient",
)
SPIN_TERMS = (
    "anomalous_magnetic",
    "normal_magnetic",
    "anomalous_spin_orbit",
    "normal_spin_orbit",
    "anomalous_helicity",
    "edm_electric",
    "edm_helicity",
    "edm_motional",
)
#: Force terms of order hbar (field-gradient, spin-dependent).
STERN_GERLACH_TERMS = FORCE_TERMS[2:]


def rhs_scalar(state: PhaseSpinState, fields: FieldConfiguration, params: ParticleParams) -> np.ndarray:
    """Lorentz force ``e E + (e c / eps') pi x H`` with ``eps' = sqrt(m^2 c^4 + c^2 pi^2)``."""
    E, H, _ = _field_point(fields, state.r)
    pi = state.pi
    eps = params.energy(pi)
    return params.e * E + params.e * params.c / eps * _cross(pi, H)


def rhs_spin_half(
    state: PhaseSpinState,
    fields: FieldConfiguration,
    params: ParticleParams,
    terms: bool = False,
):
    """Force and polarization derivative for a spin-1/2 particle.

    Returns ``(dpi/dt, dP/dt)``; with ``terms=True`` returns two dicts keyed
    by :data:`FORCE_TERMS` and :data:`SPIN_TERMS`.  Gradients act on the
    fields only (``pi`` and ``P`` are independent variables).  Spin terms
    carry the ``1/hbar`` of the Heisenberg equation, so the precession rate
    does not depend on hbar.  The dipole-moment force terms are absent, as
    in the standard form of these equations.
    """
    if state.P is None:
        raise ValueError("spin-1/2 right-hand side needs a polarization vector")
    r = np.asarray(state.r, dtype=float).reshape(1, 3)
    E, H, _ = _field_point(fields, state.r)
    JE = fields.grad_E(r)[0]
    JH = fields.grad_H(r)[0]
    p = params
    pi, P = state.pi, state.P
    c, mc2 = p.c, p.rest_energy
    eps = p.energy(pi)
    k = 1.0 / (eps * (eps + mc2))
    mu0, mu, d = p.mu0, p.mu_anom, p.edm

    grad_PH = JH.T @ P
    grad_P_piE = JE.T @ _cross(P, pi)
    grad_H_pi = JH.T @ pi
    force = {
        "electric": p.e * E,
        "lorentz": p.e * c / eps * _cross(pi, H),
        "anomalous_zeeman_gradient": mu * grad_PH,
        "normal_zeeman_gradient": mu0 * mc2 / eps * grad_PH,
        "anomalous_spin_orbit_gradient": -mu * c / eps * grad_P_piE,
        "normal_spin_orbit_gradient": -mu0 * mc2 * c * k * grad_P_piE,
        "anomalous_helicity_gradient": -mu * c**2 * k * (P @ pi) * grad_H_pi,
    }
    piE = _cross(pi, E)
    piH = _cross(pi, H)
    Pxpi = _cross(P, pi)
    inv_h = 1.0 / p.hbar
    spin = {
        "anomalous_magnetic": 2 * mu * _cross(P, H),
        "normal_magnetic": 2 * mu0 * mc2 / eps * _cross(P, H),
        "anomalous_spin_orbit": -2 * mu * c / eps * _cross(P, piE),
        "normal_spin_orbit": -2 * mu0 * mc2 * c * k * _cross(P, piE),
        "anomalous_helicity": -2 * mu * c**2 * k * Pxpi * (pi @ H),
        "edm_electric": 2 * d * _cross(P, E),
        "edm_helicity": -2 * d * c**2 * k * Pxpi * (pi @ E),
        "edm_motional": 2 * d * c / eps * _cross(P, piH),
    }
    spin = {key: inv_h * v for key, v in spin.items()}
    if terms:
        return force, spin
    return sum(force.values()), sum(spin.values())


def velocity(pi, params: ParticleParams) -> np.ndarray:
    """Group velocity ``c^2 pi / eps'``."""
    pi = np.asarray(pi, dtype=float)
    return params.c**2 * pi / params.energy(pi)


@dataclass(frozen=True)
class IntegratorControls:
    """Options of :func:`integrate`.

    ``project_spin`` renormalizes ``P`` at every output sample (the drift
    before renormalization is still recorded).  ``stern_gerlach=False`` drops
    the order-hbar force terms, in which case ``eps' + e Phi`` is conserved.
    """

    rtol: float = 1e-11
    atol: float = 1e-13
    method: str = "DOP853"
    n_samples: int = 201
    max_step: float = math.inf
    project_spin: bool = False
    stern_gerlach: bool = True
    allow_invalid: bool = False
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD


@dataclass
class Trajectory:
    t: np.ndarray
    r: np.ndarray
    pi: np.ndarray
    P: Optional[np.ndarray]
    energy: np.ndarray
    potential: np.ndarray
    metadata: dict = field(default_factory=dict)
    validity: Optional[ValidityReport] = None

    @property
    def has_spin(self) -> bool:
        return self.P is not None

    def state(self, i: int) -> PhaseSpinState:
        return PhaseSpinState(self.r[i], self.pi[i], None if self.P is None else self.P[i])

    def spin_norm_drift(self) -> np.ndarray:
        if self.P is None:
            return np.zeros_like(self.t)
        return np.linalg.norm(self.P, axis=1) - 1.0

    def energy_drift(self) -> np.ndarray:
        total = self.energy + self.potential
        return total - total[0]

    def max_spin_drift(self) -> float:
        if "max_spin_drift" in self.metadata:
            return float(self.metadata["max_spin_drift"])
        return float(np.max(np.abs(self.spin_norm_drift())))

    def to_csv(self, path) -> None:
        cols = ["t", "x", "y", "z", "pi_x", "pi_y", "pi_z"]
        if self.P is not None:
            cols += ["P_x", "P_y", "P_z"]
        cols += ["eps", "energy_drift", "spin_norm_drift"]
        drift_e = self.energy_drift()
        drift_p = self.spin_norm_drift()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for i, t in enumerate(self.t):
                row = [t, *self.r[i], *self.pi[i]]
                if self.P is not None:
                    row += list(self.P[i])
                row += [self.energy[i], drift_e[i], drift_p[i]]
                w.writerow([f"{float(v):.12e}" for v in row])

    def summary(self) -> dict:
        out = {
            "t_end": float(self.t[-1]),
            "samples": int(self.t.size),
            "max_energy_drift": float(np.max(np.abs(self.energy_drift()))),
            "max_spin_norm_drift": self.max_spin_drift(),
            "metadata": dict(self.metadata),
            "validity": None if self.validity is None else self.validity.to_dict(),
        }
        return out

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def _ode(fields, params, spin, stern_gerlach):
    def f(t, y):
        st = PhaseSpinState.from_vector(y, spin)
        dr = velocity(st.pi, params)
        if spin:
            force, torque = rhs_spin_half(st, fields, params, terms=True)
            if not stern_gerlach:
                for key in STERN_GERLACH_TERMS:
                    force.pop(key)
            return np.concatenate([dr, sum(force.values()), sum(torque.values())])
        return np.concatenate([dr, rhs_scalar(st, fields, params)])

    return f


def integrate(
    initial: PhaseSpinState,
    fields: FieldConfiguration,
    params: ParticleParams,
    t_end: float,
    controls: IntegratorControls = IntegratorControls(),
    t_eval=None,
) -> Trajectory:
    """Integrate position, kinetic momentum and (if present) polarization.

    Uses an adaptive embedded Runge-Kutta method (``DOP853`` by default).
    A failed validity check raises :class:`ValidityError` unless
    ``controls.allow_invalid`` is set, in which case a
    :class:`ValidityWarning` is issued and recorded.
    """
    if fields.time_dependent:
        from .errors import Unsupported

        raise Unsupported("time-dependent fields are not supported")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    rep = validity_report(initial, fields, params, controls.validity_threshold)
    if not rep.ok:
        msg = f"lambda/l = {rep.lambda_over_l:.3g} exceeds {controls.validity_threshold}"
        if not controls.allow_invalid:
            raise ValidityError(msg)
        warnings.warn(msg, ValidityWarning, stacklevel=2)

    spin = initial.has_spin
    f = _ode(fields, params, spin, controls.stern_gerlach)
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, controls.n_samples)
    t_eval = np.asarray(t_eval, dtype=float)
    y0 = initial.to_vector()
    opts = dict(method=controls.method, rtol=controls.rtol, atol=controls.atol, max_step=controls.max_step)

    nfev = 0
    max_drift = 0.0
    if controls.project_spin and spin:
        ys = [y0.copy()]
        y = y0.copy()
        for t0, t1 in zip(t_eval[:-1], t_eval[1:]):
            sol = solve_ivp(f, (t0, t1), y, **opts)
            _check(sol)
            nfev += sol.nfev
            y = sol.y[:, -1].copy()
            nrm = np.linalg.norm(y[6:9])
            max_drift = max(max_drift, abs(nrm - 1.0))
            y[6:9] /= nrm
            ys.append(y.copy())
        Y = np.array(ys)
    else:
        sol = solve_ivp(f, (0.0, t_end), y0, t_eval=t_eval, **opts)
        _check(sol)
        nfev = sol.nfev
        Y = sol.y.T
    r, pi = Y[:, 0:3], Y[:, 3:6]
    P = Y[:, 6:9] if spin else None
    energy = np.array([params.energy(q) for q in pi])
    potential = params.e * fields.Phi(r)
    meta = {
        "method": controls.method,
        "rtol": controls.rtol,
        "atol": controls.atol,
        "nfev": int(nfev),
        "projected": bool(controls.project_spin and spin),
        "stern_gerlach": bool(controls.stern_gerlach),
    }
    if spin:
        meta["max_spin_drift"] = (
            max_drift if meta["projected"] else float(np.max(np.abs(np.linalg.norm(P, axis=1) - 1.0)))
        )
    return Trajectory(t_eval, r, pi, P, energy, np.asarray(potential, dtype=float), meta, rep)


def _check(sol):
    if sol.status < 0:
        if "step size" in sol.message.lower():
            raise StiffnessError(sol.message)
        raise StiffnessError(f"integration failed: {sol.message}")


def rotation_angle(vectors, axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Unwrapped azimuth of ``vectors`` about ``axis`` (right-handed)."""
    v = np.asarray(vectors, dtype=float)
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    e1 = _cross(a, [1.0, 0.0, 0.0])
    if np.linalg.norm(e1) < 1e-8:
        e1 = _cross(a, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = _cross(a, e1)
    return np.unwrap(np.arctan2(v @ e2, v @ e1))


def rotation_frequency(t, vectors, axis=(0.0, 0.0, 1.0)) -> float:
    """Signed mean angular velocity ``(phi(t_end) - phi(0)) / (t_end - t_0)``.

    Samples must be dense enough that consecutive azimuths differ by less
    than pi.
    """
    phi = rotation_angle(vectors, axis)
    t = np.asarray(t, dtype=float)
    return float((phi[-1] - phi[0]) / (t[-1] - t[0]))


def cyclotron_frequency(pi, B: float, params: ParticleParams) -> float:
    """Relativistic ``e c B / eps'`` (signed)."""
    return params.e * params.c * B / params.energy(pi)


def cyclotron_radius(pi_perp: float, B: float, params: ParticleParams) -> float:
    """``c |pi_perp| / |e B|``."""
    return params.c * abs(pi_perp) / abs(params.e * B)


def rest_precession_frequency(B: float, params: ParticleParams) -> float:
    """``g mu0 B / hbar`` for a particle at rest in a magnetic field ``B``.

    The polarization turns about ``B`` at minus this rate.
    """
    return params.g * params.mu0 * B / params.hbar


def moving_precession_frequency(pi, B: float, params: ParticleParams) -> float:
    """Spin rotation rate ``(e B / m c)(a + m c^2 / eps')`` for ``pi`` transverse to ``B``."""
    eps = params.energy(pi)
    return params.e * B / (params.m * params.c) * (params.anomaly + params.rest_energy / eps)
