"""Static electromagnetic field configurations.

A :class:`FieldConfiguration` bundles the potentials (Phi, A) and strengths
(E, H) as vectorized callables of position arrays of shape ``(..., 3)``.
Strengths are related to the potentials by ``E = -grad Phi`` and
``H = curl A``; :meth:`FieldConfiguration.check_consistency` verifies both by
finite differences.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import FieldConsistencyError, FieldDomainError, ScenarioError

Array = np.ndarray


def _points(r) -> Array:
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise FieldDomainError(f"positions must have a trailing axis of length 3, got {r.shape}")
    return r


def _fd_gradient(f, r: Array, h: float) -> Array:
    """Fourth-order central-difference gradient of a scalar or vector field.

    Returns an array whose last axis indexes the derivative direction.
    """
    cols = []
    for j in range(3):
        d = np.zeros(3)
        d[j] = h
        cols.append(
            (-f(r + 2 * d) + 8 * f(r + d) - 8 * f(r - d) + f(r - 2 * d)) / (12.0 * h)
        )
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class FieldConfiguration:
    """Stationary potentials and strengths of an external field.

    Attributes
    ----------
    phi, vector_potential, electric, magnetic : callable
        Functions of positions ``r`` with shape ``(..., 3)``.
    length_scale : float
        Characteristic size of the nonuniformity region (``inf`` for uniform fields).
    x_only : bool
        Whether the configuration depends on x alone, as the one-dimensional
        bases require.
    electric_jacobian, magnetic_jacobian : callable, optional
        ``J[..., i, j] = d F_i / d x_j``; finite differences are used when absent.
    """

    phi: Callable[[Array], Array]
    vector_potential: Callable[[Array], Array]
    electric: Callable[[Array], Array]
    magnetic: Callable[[Array], Array]
    length_scale: float = math.inf
    name: str = "custom"
    x_only: bool = False
    time_dependent: bool = False
    electric_jacobian: Optional[Callable[[Array], Array]] = None
    magnetic_jacobian: Optional[Callable[[Array], Array]] = None
    params: dict = field(default_factory=dict, compare=False)

    def _call(self, fn, r):
        r = _points(r)
        try:
            out = np.asarray(fn(r), dtype=float)
        except FieldDomainError:
            raise
        except (ValueError, IndexError, FloatingPointError) as exc:
            raise FieldDomainError(f"field {self.name!r} failed at requested points: {exc}") from exc
        if not np.all(np.isfinite(out)):
            raise FieldDomainError(f"field {self.name!r} is not finite at requested points")
        return out

    def Phi(self, r):
        return self._call(self.phi, r)

    def A(self, r):
        return self._call(self.vector_potential, r)

    def E(self, r):
        return self._call(self.electric, r)

    def H(self, r):
        return self._call(self.magnetic, r)

    def _fd_step(self):
        return 1e-3 * min(self.length_scale, 1.0)

    def grad_E(self, r):
        """``dE_i/dx_j`` with the derivative index last."""
        if self.electric_jacobian is not None:
            return self._call(self.electric_jacobian, r)
        return _fd_gradient(self.E, _points(r), self._fd_step())

    def grad_H(self, r):
        if self.magnetic_jacobian is not None:
            return self._call(self.magnetic_jacobian, r)
        return _fd_gradient(self.H, _points(r), self._fd_step())

    def __add__(self, other: "FieldConfiguration") -> "FieldConfiguration":
        def both(f, g):
            return lambda r: f(r) + g(r)

        def jac(a, b):
            if a.electric_jacobian is None or b.electric_jacobian is None:
                return None
            return both(a.electric_jacobian, b.electric_jacobian)

        def hjac(a, b):
            if a.magnetic_jacobian is None or b.magnetic_jacobian is None:
                return None
            return both(a.magnetic_jacobian, b.magnetic_jacobian)

        return FieldConfiguration(
            phi=both(self.phi, other.phi),
            vector_potential=both(self.vector_potential, other.vector_potential),
            electric=both(self.electric, other.electric),
            magnetic=both(self.magnetic, other.magnetic),
            length_scale=min(self.length_scale, other.length_scale),
            name=f"{self.name}+{other.name}",
            x_only=self.x_only and other.x_only,
            time_dependent=self.time_dependent or other.time_dependent,
            electric_jacobian=jac(self, other),
            magnetic_jacobian=hjac(self, other),
        )

    def default_sample_points(self, count: int = 41) -> Array:
        scale = self.length_scale if math.isfinite(self.length_scale) else 1.0
        lo, hi = self.params.get("x_range", (-3.0 * scale, 3.0 * scale))
        xs = np.linspace(lo, hi, count)
        pts = np.zeros((count, 3))
        pts[:, 0] = xs
        if not self.x_only:
            rng = np.random.default_rng(0)
            pts[:, 1:] = rng.uniform(-scale, scale, size=(count, 2))
        return pts

    def check_consistency(self, points=None, rtol: float = 1e-6, atol: float = 1e-9) -> float:
        """Verify ``E = -grad Phi`` and ``H = curl A`` at sample points.

        Returns the largest deviation relative to the field scale; raises
        :class:`FieldConsistencyError` naming the worst point otherwise.
        """
        pts = self.default_sample_points() if points is None else _points(points)
        if pts.ndim == 1:
            pts = pts.reshape(1, 3)
        if self.x_only and "x_range" in self.params:
            lo, hi = self.params["x_range"]
            margin = 3 * self._fd_step()
            pts = pts[(pts[:, 0] > lo + margin) & (pts[:, 0] < hi - margin)]
        h = self._fd_step()
        worst = 0.0
        for quantity, expected, derived in (
            ("E=-grad(Phi)", self.E(pts), -_fd_gradient(self.Phi, pts, h)),
            ("H=curl(A)", self.H(pts), _curl(_fd_gradient(self.A, pts, h))),
        ):
            dev = np.linalg.norm(expected - derived, axis=-1)
            scale = max(np.abs(expected).max(), np.abs(derived).max(), 1.0)
            i = int(np.argmax(dev))
            rel = dev[i] / scale
            if dev[i] > atol + rtol * scale:
                raise FieldConsistencyError(
                    f"field {self.name!r}: {quantity} violated, deviation {dev[i]:.3e} at "
                    f"r = ({pts[i, 0]:.6g}, {pts[i, 1]:.6g}, {pts[i, 2]:.6g})",
                    max_deviation=float(dev[i]),
                    location=pts[i],
                    quantity=quantity,
                )
            worst = max(worst, float(rel))
        return worst

    def length_scale_diagnostic(self, points=None) -> float:
        """``max|grad Phi| * l / max|Phi|``: order one for a sensible ``l``."""
        pts = self.default_sample_points() if points is None else _points(points)
        phi = np.abs(self.Phi(pts)).max()
        grad = np.linalg.norm(self.E(pts), axis=-1).max()
        if phi == 0.0 or not math.isfinite(self.length_scale):
            return float("nan")
        return float(grad * self.length_scale / phi)


def _curl(jac: Array) -> Array:
    """Curl from a Jacobian ``J[..., i, j] = dA_i/dx_j``."""
    return np.stack(
        [
            jac[..., 2, 1] - jac[..., 1, 2],
            jac[..., 0, 2] - jac[..., 2, 0],
            jac[..., 1, 0] - jac[..., 0, 1],
        ],
        axis=-1,
    )


def _zeros3(r):
    return np.zeros(np.shape(r)[:-1] + (3,))


def _zeros33(r):
    return np.zeros(np.shape(r)[:-1] + (3, 3))


def _const3(v):
    v = np.asarray(v, dtype=float)
    return lambda r: np.broadcast_to(v, np.shape(r)[:-1] + (3,)).copy()


def zero_field() -> FieldConfiguration:
    return FieldConfiguration(
        phi=lambda r: np.zeros(np.shape(r)[:-1]),
        vector_potential=_zeros3,
        electric=_zeros3,
        magnetic=_zeros3,
        name="zero",
        x_only=True,
        electric_jacobian=_zeros33,
        magnetic_jacobian=_zeros33,
    )


def uniform_electric(E0) -> FieldConfiguration:
    """Uniform electric field with ``Phi = -E0 . r``."""
    E0 = np.asarray(E0, dtype=float).reshape(3)
    return FieldConfiguration(
        phi=lambda r: -(np.asarray(r) @ E0),
        vector_potential=_zeros3,
        electric=_const3(E0),
        magnetic=_zeros3,
        name="uniform-E",
        x_only=bool(E0[1] == 0 and E0[2] == 0),
        electric_jacobian=_zeros33,
        magnetic_jacobian=_zeros33,
        params={"E": E0.tolist()},
    )


def uniform_magnetic(B0) -> FieldConfiguration:
    """Uniform magnetic field in the gauge ``A = (0, B_z x, B_x y - B_y x)``."""
    B0 = np.asarray(B0, dtype=float).reshape(3)

    def vec_pot(r):
        r = np.asarray(r)
        out = np.zeros(r.shape)
        out[..., 1] = B0[2] * r[..., 0]
        out[..., 2] = B0[0] * r[..., 1] - B0[1] * r[..., 0]
        return out

    return FieldConfiguration(
        phi=lambda r: np.zeros(np.shape(r)[:-1]),
        vector_potential=vec_pot,
        electric=_zeros3,
        magnetic=_const3(B0),
        name="uniform-B",
        x_only=bool(B0[0] == 0),
        electric_jacobian=_zeros33,
        magnetic_jacobian=_zeros33,
        params={"B": B0.tolist()},
    )


def gaussian_well(amplitude: float, width: float, center: float = 0.0) -> FieldConfiguration:
    """``Phi = amplitude * exp(-(x - center)^2 / (2 width^2))``; ``l = width``."""
    a, w, c = float(amplitude), float(width), float(center)

    def phi(r):
        x = np.asarray(r)[..., 0]
        return a * np.exp(-((x - c) ** 2) / (2 * w * w))

    def efield(r):
        x = np.asarray(r)[..., 0]
        out = np.zeros(np.shape(r))
        out[..., 0] = a * (x - c) / (w * w) * np.exp(-((x - c) ** 2) / (2 * w * w))
        return out

    def ejac(r):
        x = np.asarray(r)[..., 0]
        out = np.zeros(np.shape(r)[:-1] + (3, 3))
        u = (x - c) / w
        out[..., 0, 0] = a / (w * w) * (1 - u * u) * np.exp(-0.5 * u * u)
        return out

    return FieldConfiguration(
        phi=phi,
        vector_potential=_zeros3,
        electric=efield,
        magnetic=_zeros3,
        length_scale=w,
        name="gaussian-well",
        x_only=True,
        electric_jacobian=ejac,
        magnetic_jacobian=_zeros33,
        params={"amplitude": a, "width": w, "center": c},
    )


def stern_gerlach(B0: float, gradient: float) -> FieldConfiguration:
    """Curl- and divergence-free field ``H = (G z, 0, B0 + G x)``.

    Vector potential ``A_y = B0 x + G (x^2 - z^2) / 2``.
    """
    B0, G = float(B0), float(gradient)

    def vec_pot(r):
        r = np.asarray(r)
        out = np.zeros(r.shape)
        out[..., 1] = B0 * r[..., 0] + 0.5 * G * (r[..., 0] ** 2 - r[..., 2] ** 2)
        return out

    def hfield(r):
        r = np.asarray(r)
        out = np.zeros(r.shape)
        out[..., 0] = G * r[..., 2]
        out[..., 2] = B0 + G * r[..., 0]
        return out

    def hjac(r):
        out = np.zeros(np.shape(r)[:-1] + (3, 3))
        out[..., 0, 2] = G
        out[..., 2, 0] = G
        return out

    return FieldConfiguration(
        phi=lambda r: np.zeros(np.shape(r)[:-1]),
        vector_potential=vec_pot,
        electric=_zeros3,
        magnetic=hfield,
        length_scale=abs(B0 / G) if G else math.inf,
        name="stern-gerlach",
        x_only=False,
        electric_jacobian=_zeros33,
        magnetic_jacobian=hjac,
        params={"B0": B0, "gradient": G},
    )


def sampled_table(x, phi, ax, ay, az, electric=None, magnetic=None, length_scale=None, name="table"):
    """Field given on samples along x, interpolated by cubic splines.

    Strengths are derived from the potentials (``E_x = -Phi'``,
    ``H = (0, -A_z', A_y')``) unless explicit ``electric``/``magnetic``
    samples of shape ``(m, 3)`` are supplied, in which case those are used and
    :meth:`FieldConfiguration.check_consistency` will compare them with the
    derived values.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 4 or np.any(np.diff(x) <= 0):
        raise ScenarioError("field table needs at least 4 strictly increasing x samples")
    lo, hi = float(x[0]), float(x[-1])
    s_phi = CubicSpline(x, phi)
    s_a = [CubicSpline(x, a) for a in (ax, ay, az)]
    s_e = [CubicSpline(x, electric[:, i]) for i in range(3)] if electric is not None else None
    s_h = [CubicSpline(x, magnetic[:, i]) for i in range(3)] if magnetic is not None else None

    def xs(r):
        xv = np.asarray(r)[..., 0]
        if np.any(xv < lo - 1e-12) or np.any(xv > hi + 1e-12):
            raise FieldDomainError(f"x outside table range [{lo}, {hi}]")
        return xv

    def vec_pot(r):
        xv = xs(r)
        return np.stack([s(xv) for s in s_a], axis=-1)

    def efield(r):
        xv = xs(r)
        if s_e is not None:
            return np.stack([s(xv) for s in s_e], axis=-1)
        out = np.zeros(np.shape(r))
        out[..., 0] = -s_phi(xv, 1)
        return out

    def hfield(r):
        xv = xs(r)
        if s_h is not None:
            return np.stack([s(xv) for s in s_h], axis=-1)
        out = np.zeros(np.shape(r))
        out[..., 1] = -s_a[2](xv, 1)
        out[..., 2] = s_a[1](xv, 1)
        return out

    if length_scale is None:
        dphi = np.abs(s_phi(x, 1)).max()
        length_scale = float(np.ptp(phi) / dphi) if dphi > 0 else (hi - lo)
    return FieldConfiguration(
        phi=lambda r: s_phi(xs(r)),
        vector_potential=vec_pot,
        electric=efield,
        magnetic=hfield,
        length_scale=float(length_scale),
        name=name,
        x_only=True,
        params={"x_range": (lo, hi)},
    )


TABLE_COLUMNS = ("x", "Phi", "Ax", "Ay", "Az")


def load_field_table(path, length_scale=None) -> FieldConfiguration:
    """Read a CSV field table with columns ``x, Phi, Ax, Ay, Az``.

    Optional columns ``Ex, Ey, Ez, Hx, Hy, Hz`` override the derived strengths.
    Relative paths are looked up in ``$FW_DATA_DIR`` first, then in the
    package's bundled data directory.
    """
    p = resolve_data_path(path)
    with open(p, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = [c for c in TABLE_COLUMNS if c not in cols]
        if missing:
            raise ScenarioError(f"{p}: missing columns {missing}")
        rows = list(reader)
    try:
        data = {c: np.array([float(r[c]) for r in rows]) for c in cols}
    except ValueError as exc:
        raise ScenarioError(f"{p}: non-numeric entry ({exc})") from exc
    electric = magnetic = None
    if all(c in data for c in ("Ex", "Ey", "Ez")):
        electric = np.stack([data["Ex"], data["Ey"], data["Ez"]], axis=1)
    if all(c in data for c in ("Hx", "Hy", "Hz")):
        magnetic = np.stack([data["Hx"], data["Hy"], data["Hz"]], axis=1)
    return sampled_table(
        data["x"], data["Phi"], data["Ax"], data["Ay"], data["Az"],
        electric=electric, magnetic=magnetic, length_scale=length_scale, name=Path(p).stem,
    )


def data_dir() -> Path:
    return Path(__file__).with_name("data")


def resolve_data_path(path) -> Path:
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    env = os.environ.get("FW_DATA_DIR")
    if env and (Path(env) / p).exists():
        return Path(env) / p
    if (data_dir() / p).exists():
        return data_dir() / p
    raise FileNotFoundError(f"field table {path!s} not found (FW_DATA_DIR={env!r})")


def with_length_scale(fields: FieldConfiguration, length_scale: float) -> FieldConfiguration:
    return replace(fields, length_scale=float(length_scale))
