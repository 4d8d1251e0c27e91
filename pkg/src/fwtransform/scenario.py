"""Scenario documents, the preset catalog and the task runners behind ``fw``.

A scenario is a TOML document::

    task = "simulate"
    seed = 0

    [particle]
    kind = "spin-1/2"      # or "spin-0"
    g = 2.002319

    [field]
    preset = "uniform-B"
    B = [0.0, 0.0, 0.2]

    [simulate]
    t_end = 100.0
    pi0 = [0.0, 0.0, 0.0]
    P0 = [1.0, 0.0, 0.0]

Unknown keys are rejected.  ``preset = "name"`` at top level starts from a
catalog entry and overlays the document on it.
"""
from __future__ import annotations

import copy
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .discretization import HermiteBasis1D, MomentumBlock, PeriodicGrid1D
from .errors import ScenarioError
from .fields import (
    gaussian_well,
    load_field_table,
    stern_gerlach,
    uniform_electric,
    uniform_magnetic,
    with_length_scale,
    zero_field,
)
from .params import ParticleParams, PhaseSpinState

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

TASKS = ("transform", "simulate", "ehrenfest", "probe", "check")
KINDS = ("spin-1/2", "spin-0")
FIELD_PRESETS = ("zero", "uniform-E", "uniform-B", "uniform-EB", "gaussian-well", "stern-gerlach", "table")
SCHEMES = ("momentum", "grid", "hermite")


# -- schema -----------------------------------------------------------------

def _num(lo=-math.inf, hi=math.inf, lo_open=False):
    def check(v, where):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioError(f"{where}: expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v) or v < lo or v > hi or (lo_open and v == lo):
            bound = f"({lo}, {hi}]" if lo_open else f"[{lo}, {hi}]"
            raise ScenarioError(f"{where}: {v} outside {bound}")
        return v

    return check


def _int(lo=0, hi=10**7):
    def check(v, where):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(f"{where}: expected an integer, got {v!r}")
        if v < lo or v > hi:
            raise ScenarioError(f"{where}: {v} outside [{lo}, {hi}]")
        return v

    return check


def _choice(options):
    def check(v, where):
        if v not in options:
            raise ScenarioError(f"{where}: {v!r} is not one of {list(options)}")
        return v

    return check


def _bool(v, where):
    if not isinstance(v, bool):
        raise ScenarioError(f"{where}: expected true/false, got {v!r}")
    return v


def _str(v, where):
    if not isinstance(v, str):
        raise ScenarioError(f"{where}: expected a string, got {v!r}")
    return v


def _vec(size):
    num = _num()

    def check(v, where):
        if not isinstance(v, list) or len(v) != size:
            raise ScenarioError(f"{where}: expected a list of {size} numbers")
        return [num(x, f"{where}[{i}]") for i, x in enumerate(v)]

    return check


def _list_of(item, min_len=1):
    def check(v, where):
        if not isinstance(v, list) or len(v) < min_len:
            raise ScenarioError(f"{where}: expected a list with at least {min_len} entries")
        return [item(x, f"{where}[{i}]") for i, x in enumerate(v)]

    return check


_POS = _num(0.0, lo_open=True)

SCHEMA = {
    "task": _choice(TASKS),
    "seed": _int(0, 2**32 - 1),
    "preset": _str,
    "particle": {
        "kind": _choice(KINDS),
        "m": _POS,
        "e": _num(),
        "g": _num(),
        "eta": _num(),
        "c": _POS,
        "hbar": _POS,
    },
    "field": {
        "preset": _choice(FIELD_PRESETS),
        "E": _vec(3),
        "B": _vec(3),
        "amplitude": _num(),
        "width": _POS,
        "center": _num(),
        "B0": _num(),
        "gradient": _num(),
        "table": _str,
        "length_scale": _POS,
    },
    "discretization": {
        "scheme": _choice(SCHEMES),
        "n": _int(2, 1024),
        "length": _POS,
        "width": _POS,
        "center": _num(),
        "p_offset": _num(),
        "p_perp": _vec(2),
        "momenta": _list_of(_vec(3)),
        "position": _vec(3),
    },
    "transform": {
        "method": _choice(("auto", "exact", "general")),
        "tolerance": _POS,
    },
    "simulate": {
        "t_end": _POS,
        "r0": _vec(3),
        "pi0": _vec(3),
        "P0": _vec(3),
        "rtol": _POS,
        "atol": _POS,
        "n_samples": _int(2, 10**6),
        "project_spin": _bool,
        "stern_gerlach": _bool,
        "allow_invalid": _bool,
        "validity_threshold": _POS,
    },
    "probe": {
        "hbar": _list_of(_POS, 3),
        "packet_center": _num(),
        "packet_width": _POS,
        "spinor": _list_of(_num(), 2),
        "oracle": _bool,
    },
    "ehrenfest": {
        "packet_center": _num(),
        "packet_width": _POS,
        "observable": _choice(("momentum", "polarization")),
        "dt": _POS,
        "spinor": _list_of(_num(), 2),
        "validity_threshold": _POS,
    },
    "check": {
        "samples": _int(1, 10**4),
        "dim": _int(4, 64),
        "tolerance": _POS,
    },
    "output": {
        "summary": _str,
        "trajectory": _str,
    },
}


def validate_document(doc: dict, schema: dict = SCHEMA, prefix: str = "") -> dict:
    """Check ``doc`` against ``schema``; returns a normalized copy."""
    if not isinstance(doc, dict):
        raise ScenarioError(f"{prefix or 'document'}: expected a table")
    out = {}
    for key, value in doc.items():
        where = f"{prefix}{key}"
        if key not in schema:
            raise ScenarioError(f"{where}: unknown key")
        rule = schema[key]
        if isinstance(rule, dict):
            out[key] = validate_document(value, rule, where + ".")
        else:
            out[key] = rule(value, where)
    return out


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


# -- presets ----------------------------------------------------------------

_REST_B = 0.2
_PERIOD_B = 2 * math.pi / _REST_B

PRESETS = {
    "free-dirac": {
        "description": "Free spin-1/2 particle on momentum blocks; transform against the closed-form energy.",
        "anchor": "Dirac-Pauli Hamiltonian, zero field; FW energy sqrt(m^2 c^4 + c^2 p^2)",
        "scenario": {
            "task": "transform",
            "particle": {"kind": "spin-1/2"},
            "field": {"preset": "zero"},
            "discretization": {
                "scheme": "momentum",
                "momenta": [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0], [1.0, 0.5, 0.0], [3.0, 0.0, 0.0], [0.0, 2.0, -1.0]],
            },
        },
    },
    "dirac-pauli-uniform-B": {
        "description": "Spin-1/2 particle at rest in a uniform magnetic field; spin precession.",
        "anchor": "Dirac-Pauli Hamiltonian with anomalous magnetic and electric dipole moments",
        "scenario": {
            "task": "simulate",
            "particle": {"kind": "spin-1/2", "g": 2.0},
            "field": {"preset": "uniform-B", "B": [0.0, 0.0, _REST_B]},
            "simulate": {
                "t_end": 100 * _PERIOD_B,
                "pi0": [0.0, 0.0, 0.0],
                "P0": [1.0, 0.0, 0.0],
                "n_samples": 4001,
            },
        },
    },
    "g-minus-2": {
        "description": "Electron-like anomaly at rest in a uniform magnetic field; spin versus cyclotron rate.",
        "anchor": "semiclassical spin precession (T-BMT form) with anomalous moment",
        "scenario": {
            "task": "simulate",
            "particle": {"kind": "spin-1/2", "g": 2.002319, "e": -1.0},
            "field": {"preset": "uniform-B", "B": [0.0, 0.0, _REST_B]},
            "simulate": {
                "t_end": 100 * _PERIOD_B,
                "pi0": [0.0, 0.0, 0.0],
                "P0": [1.0, 0.0, 0.0],
                "n_samples": 4001,
            },
        },
    },
    "stern-gerlach": {
        "description": "Moving spin-1/2 particle in a field with a linear gradient; spin-dependent force.",
        "anchor": "semiclassical force with Stern-Gerlach terms",
        "scenario": {
            "task": "simulate",
            "particle": {"kind": "spin-1/2", "g": 2.2, "hbar": 0.1},
            "field": {"preset": "stern-gerlach", "B0": 1.0, "gradient": 0.01},
            "simulate": {
                "t_end": 50.0,
                "pi0": [0.0, 1.0, 0.0],
                "P0": [0.0, 0.0, 1.0],
                "n_samples": 501,
            },
        },
    },
    "cyclotron": {
        "description": "Spinless particle circling in a uniform magnetic field.",
        "anchor": "spinless semiclassical Lorentz force",
        "scenario": {
            "task": "simulate",
            "particle": {"kind": "spin-0"},
            "field": {"preset": "uniform-B", "B": [0.0, 0.0, 0.5]},
            "simulate": {"t_end": 10 * 2 * math.pi * math.sqrt(2.0) / 0.5, "pi0": [1.0, 0.0, 0.0], "n_samples": 2001},
        },
    },
    "feshbach-villars-gaussian-well": {
        "description": "Spinless particle in a Gaussian well on a periodic grid; hbar scaling of the transform remainders.",
        "anchor": "Feshbach-Villars Hamiltonian and its FW form beta sqrt(m^2 c^4 + c^2 pi^2) + e Phi",
        "scenario": {
            "task": "probe",
            "particle": {"kind": "spin-0"},
            "field": {"preset": "gaussian-well", "amplitude": -0.3, "width": 8.0},
            "discretization": {"scheme": "grid", "n": 128, "length": 64.0, "p_offset": 1.0},
            "probe": {"hbar": [0.02, 0.04, 0.08, 0.16], "packet_center": -8.0, "packet_width": 2.0},
        },
    },
    "ehrenfest-gaussian-well": {
        "description": "Narrow spinless packet in a Gaussian well; quantum force against the classical one.",
        "anchor": "semiclassical limit of the spinless FW equations of motion",
        "scenario": {
            "task": "ehrenfest",
            "particle": {"kind": "spin-0", "hbar": 0.01},
            "field": {"preset": "gaussian-well", "amplitude": -0.3, "width": 8.0},
            "discretization": {"scheme": "grid", "n": 256, "length": 64.0, "p_offset": 1.0},
            "ehrenfest": {"packet_center": -4.0, "packet_width": 0.4},
        },
    },
    "dirac-pauli-uniform-EB": {
        "description": "Spin-1/2 particle with anomalous and electric dipole moments in uniform E and B; hbar scaling against the closed-form FW Hamiltonian.",
        "anchor": "FW Hamiltonian of the Dirac-Pauli particle to first order in hbar",
        "scenario": {
            "task": "probe",
            "particle": {"kind": "spin-1/2", "g": 2.2, "eta": 0.3},
            "field": {"preset": "uniform-EB", "E": [0.05, 0.0, 0.0], "B": [0.0, 0.0, 0.05]},
            "discretization": {"scheme": "hermite", "n": 60, "width": 1.0, "p_offset": 1.0, "p_perp": [0.3, 0.2]},
            "probe": {"hbar": [0.02, 0.04, 0.08, 0.16], "packet_center": 0.0, "packet_width": 0.7071067811865476,
                      "spinor": [1.0, 1.0, 0.0, 0.0]},
        },
    },
    "tabulated-well": {
        "description": "Spinless particle in a Gaussian well read from the bundled CSV table.",
        "anchor": "Feshbach-Villars Hamiltonian with a sampled potential",
        "scenario": {
            "task": "transform",
            "particle": {"kind": "spin-0", "hbar": 0.05},
            "field": {"preset": "table", "table": "gaussian_well.csv", "length_scale": 8.0},
            "discretization": {"scheme": "grid", "n": 64, "length": 48.0, "p_offset": 1.0},
            "transform": {"method": "general"},
        },
    },
}


def list_presets() -> list:
    """Catalog entries ``{name, description, anchor, task}`` sorted by name."""
    return [
        {
            "name": name,
            "description": entry["description"],
            "anchor": entry["anchor"],
            "task": entry["scenario"]["task"],
        }
        for name, entry in sorted(PRESETS.items())
    ]


# -- scenario object ---------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    data: dict
    source: str = "<memory>"

    @property
    def task(self) -> str:
        return self.data["task"]

    @property
    def seed(self) -> int:
        return int(self.data.get("seed", 0))

    def section(self, name: str) -> dict:
        return self.data.get(name, {})

    @property
    def spin(self) -> bool:
        return self.section("particle").get("kind", "spin-1/2") == "spin-1/2"

    def particle(self, hbar=None) -> ParticleParams:
        p = {k: v for k, v in self.section("particle").items() if k != "kind"}
        if hbar is not None:
            p["hbar"] = hbar
        return ParticleParams(**p)

    def fields(self):
        f = self.section("field")
        kind = f.get("preset", "zero")
        if kind == "zero":
            out = zero_field()
        elif kind == "uniform-E":
            out = uniform_electric(f.get("E", [0.0, 0.0, 0.0]))
        elif kind == "uniform-B":
            out = uniform_magnetic(f.get("B", [0.0, 0.0, 0.0]))
        elif kind == "uniform-EB":
            out = uniform_electric(f.get("E", [0.0, 0.0, 0.0])) + uniform_magnetic(f.get("B", [0.0, 0.0, 0.0]))
        elif kind == "gaussian-well":
            out = gaussian_well(f.get("amplitude", -0.3), f.get("width", 8.0), f.get("center", 0.0))
        elif kind == "stern-gerlach":
            out = stern_gerlach(f.get("B0", 1.0), f.get("gradient", 0.01))
        else:
            if "table" not in f:
                raise ScenarioError("field.table: required for preset 'table'")
            out = load_field_table(f["table"], length_scale=f.get("length_scale"))
        if "length_scale" in f and kind != "table":
            out = with_length_scale(out, f["length_scale"])
        return out

    def schemes(self):
        """List of ``(label, scheme)``; several for a momentum list."""
        d = self.section("discretization")
        kind = d.get("scheme", "momentum")
        if kind == "momentum":
            momenta = d.get("momenta", [[0.0, 0.0, 0.0]])
            pos = d.get("position", [0.0, 0.0, 0.0])
            return [(f"p={m}", MomentumBlock(m, pos)) for m in momenta]
        common = dict(p_offset=d.get("p_offset", 0.0), p_perp=tuple(d.get("p_perp", [0.0, 0.0])), center=d.get("center", 0.0))
        if kind == "grid":
            return [("grid", PeriodicGrid1D(d.get("n", 128), d.get("length", 64.0), **common))]
        return [("hermite", HermiteBasis1D(d.get("n", 60), d.get("width", 1.0), **common))]

    def scheme(self):
        return self.schemes()[0][1]

    def initial_state(self) -> PhaseSpinState:
        s = self.section("simulate")
        P = s.get("P0", [0.0, 0.0, 1.0]) if self.spin else None
        return PhaseSpinState(s.get("r0", [0.0, 0.0, 0.0]), s.get("pi0", [0.0, 0.0, 0.0]), P)


def _check_required(data: dict):
    if "task" not in data:
        raise ScenarioError("task: required")
    if data["task"] == "simulate" and "t_end" not in data.get("simulate", {}):
        raise ScenarioError("simulate.t_end: required for task 'simulate'")
    if data["task"] in ("probe", "ehrenfest") and data.get("discretization", {}).get("scheme", "momentum") == "momentum":
        raise ScenarioError(f"discretization.scheme: task {data['task']!r} needs 'grid' or 'hermite'")
    if data.get("field", {}).get("preset") == "table" and "table" not in data.get("field", {}):
        raise ScenarioError("field.table: required for preset 'table'")


def scenario_from_dict(doc: dict, source: str = "<memory>") -> Scenario:
    doc = validate_document(doc)
    if "preset" in doc:
        name = doc.pop("preset")
        if name not in PRESETS:
            raise ScenarioError(f"preset: unknown preset {name!r}")
        doc = _merge(PRESETS[name]["scenario"], doc)
        doc = validate_document(doc)
    _check_required(doc)
    return Scenario(doc, source)


def load_scenario(path) -> Scenario:
    """Parse and validate a TOML scenario file.

    Syntax errors raise :class:`ScenarioError` carrying the parser's line and
    column; schema errors name the offending dotted key.
    """
    p = Path(path)
    text = p.read_text()
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{p}: {exc}") from exc
    try:
        return scenario_from_dict(doc, str(p))
    except ScenarioError as exc:
        raise ScenarioError(f"{p}: {exc}") from exc


def preset_scenario(name: str) -> Scenario:
    if name not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}")
    return scenario_from_dict({"preset": name}, f"preset:{name}")


# -- output ------------------------------------------------------------------

def _clean(obj, digits):
    if isinstance(obj, dict):
        return {str(k): _clean(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(f"{v:.{digits}g}")
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def canonical_json(obj, digits: int = 12) -> str:
    """Sorted-key JSON with floats rounded to ``digits`` significant digits."""
    return json.dumps(_clean(obj, digits), sort_keys=True, indent=2) + "\n"


# -- tasks -------------------------------------------------------------------

def _builder(scn: Scenario):
    from .hamiltonians import build_dirac_pauli, build_feshbach_villars

    return build_dirac_pauli if scn.spin else build_feshbach_villars


def _validity_for_scheme(scn, scheme, fields, params, threshold=None):
    from .semiclassical import DEFAULT_VALIDITY_THRESHOLD, validity_report

    if isinstance(scheme, MomentumBlock):
        pi = scheme.momentum
    else:
        pi = np.array([scheme.p_offset, *scheme.p_perp])
    rep = validity_report(PhaseSpinState(np.zeros(3), pi), fields, params, threshold or DEFAULT_VALIDITY_THRESHOLD)
    return rep


def run_transform(scn: Scenario, jobs: int = 1, tolerance: float | None = None) -> dict:
    from .algebra import rel_norm
    from .oracle import eriksen_fw
    from .transform import transform

    fields = scn.fields()
    params = scn.particle()
    t = scn.section("transform")
    method = t.get("method", "auto")
    tol = tolerance if tolerance is not None else t.get("tolerance", 1e-10)
    build = _builder(scn)

    def one(item):
        label, scheme = item
        parts = build(fields, params, scheme)
        res = transform(parts, method)
        oracle = eriksen_fw(parts.total())
        return {
            "label": label,
            "basis": scheme.basis_tag(params.hbar),
            "method": res.method,
            "residual_odd_norm": res.residual_odd_norm,
            "unitarity_defect": res.unitarity_defect,
            "conjugation_defect": res.diagnostics["conjugation_defect"],
            "oracle_gap": rel_norm(res.H_fw.matrix - oracle.H_diag.matrix, res.H_fw),
            "hermiticity": res.diagnostics["hermiticity"],
            "validity": _validity_for_scheme(scn, scheme, fields, params).to_dict(),
        }

    items = scn.schemes()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(one, items))
    else:
        blocks = [one(i) for i in items]
    worst_odd = max(b["residual_odd_norm"] for b in blocks)
    worst_u = max(b["unitarity_defect"] for b in blocks)
    return {
        "task": "transform",
        "blocks": blocks,
        "max_residual_odd_norm": worst_odd,
        "max_unitarity_defect": worst_u,
        "tolerance": tol,
        "ok": bool(worst_odd <= tol and worst_u <= tol),
    }


def run_simulate(scn: Scenario, out_dir: Path | None = None, tolerance: float | None = None) -> dict:
    from .semiclassical import (
        IntegratorControls,
        cyclotron_frequency,
        integrate,
        rotation_frequency,
    )

    fields = scn.fields()
    params = scn.particle()
    s = scn.section("simulate")
    controls = IntegratorControls(
        rtol=tolerance if tolerance is not None else s.get("rtol", 1e-11),
        atol=s.get("atol", 1e-13),
        n_samples=s.get("n_samples", 2001),
        project_spin=s.get("project_spin", False),
        stern_gerlach=s.get("stern_gerlach", True),
        allow_invalid=s.get("allow_invalid", False),
        validity_threshold=s.get("validity_threshold", 0.05),
    )
    init = scn.initial_state()
    traj = integrate(init, fields, params, s["t_end"], controls)
    H0 = fields.H(init.r.reshape(1, 3))[0]
    B = float(np.linalg.norm(H0))
    freqs = {}
    if B > 0:
        axis = H0 / B
        pi_perp = init.pi - (init.pi @ axis) * axis
        # rotation rates about the local field direction; negative means clockwise for e > 0
        omega_c_analytic = -cyclotron_frequency(init.pi, B, params)
        freqs["cyclotron_analytic"] = omega_c_analytic
        if np.linalg.norm(pi_perp) > 0:
            freqs["momentum_rotation"] = rotation_frequency(traj.t, traj.pi, axis)
            omega_c = freqs["momentum_rotation"]
        else:
            omega_c = omega_c_analytic
        if traj.has_spin and np.linalg.norm(init.P - (init.P @ axis) * axis) > 1e-6:
            om_s = rotation_frequency(traj.t, traj.P, axis)
            freqs["spin_rotation"] = om_s
            freqs["anomaly_ratio"] = (om_s - omega_c) / omega_c
            freqs["anomaly_expected"] = params.anomaly * params.energy(init.pi) / params.rest_energy
    summary = {
        "task": "simulate",
        "frequencies": freqs,
        "trajectory": traj.summary(),
        "final_state": {
            "r": traj.r[-1],
            "pi": traj.pi[-1],
            "P": None if traj.P is None else traj.P[-1],
        },
    }
    if out_dir is not None:
        name = scn.section("output").get("trajectory", "trajectory.csv")
        traj.to_csv(out_dir / name)
        summary["trajectory_file"] = name
    return summary


def probe_case(scn: Scenario, fields, scheme_factory):
    from .hamiltonians import eval_fw_spin_half_analytic, fw_spinless_leading
    from .oracle import gaussian_wavepacket
    from .transform import ScalingCase

    build = _builder(scn)
    pr = scn.section("probe")
    spinor = pr.get("spinor", [1.0, 0.0, 0.0, 0.0] if scn.spin else [1.0, 0.0])
    if len(spinor) != (4 if scn.spin else 2):
        raise ScenarioError("probe.spinor: length must match the particle kind")

    def case(hbar):
        params = scn.particle(hbar)
        scheme = scheme_factory()
        parts = build(fields, params, scheme)
        width = pr.get("packet_width", 1.0)
        psi = gaussian_wavepacket(scheme, pr.get("packet_center", 0.0), width, hbar, spinor).psi
        if scn.spin:
            ref = eval_fw_spin_half_analytic(fields, params, scheme)
        else:
            ref = fw_spinless_leading(fields, params, scheme)
        lam = _validity_for_scheme(scn, scheme, fields, params).lambda_over_l
        return ScalingCase(parts, psi, lam, ref)

    return case


def run_probe(scn: Scenario, jobs: int = 1, hbar_values=None) -> dict:
    import warnings

    from .transform import hbar_scaling_probe

    fields = scn.fields()
    pr = scn.section("probe")
    hbars = hbar_values if hbar_values is not None else pr.get("hbar", [0.02, 0.04, 0.08, 0.16])
    case = probe_case(scn, fields, scn.scheme)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = hbar_scaling_probe(case, hbars, oracle=pr.get("oracle", True), jobs=jobs)
    out = rep.summary()
    out["task"] = "probe"
    out["warnings"] = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    return out


def run_ehrenfest(scn: Scenario) -> dict:
    from .hamiltonians import spatial_operators
    from .oracle import ehrenfest_check, gaussian_wavepacket
    from .transform import general_fw

    fields = scn.fields()
    params = scn.particle()
    scheme = scn.scheme()
    eh = scn.section("ehrenfest")
    parts = _builder(scn)(fields, params, scheme)
    res = general_fw(*parts)
    ops = spatial_operators(fields, params, scheme)
    spinor = eh.get("spinor", [1.0, 0.0, 0.0, 0.0] if scn.spin else [1.0, 0.0])
    psi = gaussian_wavepacket(scheme, eh.get("packet_center", 0.0), eh.get("packet_width", 1.0), params.hbar, spinor)
    rec = ehrenfest_check(
        psi, res.H_fw, ops, fields, params,
        observable=eh.get("observable", "momentum"),
        dt=eh.get("dt"),
        validity_threshold=eh.get("validity_threshold", 0.01),
    )
    out = rec.to_dict()
    out["task"] = "ehrenfest"
    return out


def run_check(scn: Scenario, seed: int | None = None, tolerance: float | None = None) -> dict:
    """Randomized sweep: exact transform against the oracle on commuting triples."""
    from .algebra import rel_norm
    from .oracle import eriksen_fw
    from .transform import exact_fw, random_commuting_triple

    c = scn.section("check")
    rng = np.random.default_rng(scn.seed if seed is None else seed)
    tol = tolerance if tolerance is not None else c.get("tolerance", 1e-10)
    dim = c.get("dim", 16)
    worst = {"odd": 0.0, "closed_form": 0.0, "oracle": 0.0, "unitarity": 0.0}
    for _ in range(c.get("samples", 20)):
        parts = random_commuting_triple(rng, dim)
        res = exact_fw(*parts)
        oracle = eriksen_fw(parts.total())
        worst["odd"] = max(worst["odd"], res.residual_odd_norm)
        worst["closed_form"] = max(worst["closed_form"], res.diagnostics["conjugation_defect"])
        worst["oracle"] = max(worst["oracle"], rel_norm(oracle.H_diag.matrix - res.H_fw.matrix, res.H_fw))
        worst["unitarity"] = max(worst["unitarity"], res.unitarity_defect)
    field_dev = scn.fields().check_consistency()
    return {
        "task": "check",
        "samples": c.get("samples", 20),
        "dim": dim,
        "max_deviation": worst,
        "field_consistency": field_dev,
        "tolerance": tol,
        "ok": bool(max(worst.values()) <= tol),
    }


def validate_scenario(scn: Scenario) -> dict:
    """Build every object a scenario refers to; raise on the first problem."""
    fields = scn.fields()
    dev = fields.check_consistency()
    params = scn.particle()
    report = {"source": scn.source, "task": scn.task, "field": fields.name, "field_consistency": dev}
    schemes = scn.schemes()
    report["bases"] = [s.basis_tag(params.hbar) for _, s in schemes]
    for _, s in schemes:
        if s.one_dimensional and not fields.x_only:
            from .errors import FieldDomainError

            raise FieldDomainError(f"field {fields.name!r} is not x-only; basis {s.tag} cannot hold it")
    if scn.task == "simulate":
        from .semiclassical import validity_report

        st = scn.initial_state()
        report["validity"] = validity_report(
            st, fields, params, scn.section("simulate").get("validity_threshold", 0.05)
        ).to_dict()
    report["ok"] = True
    return report
