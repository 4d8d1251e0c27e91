"""Acceptance criteria; each test prints one PASS/FAIL line."""
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from fwtransform.algebra import odd_part, rel_norm
from fwtransform.discretization import MomentumBlock
from fwtransform.fields import uniform_magnetic, zero_field
from fwtransform.hamiltonians import build_dirac_pauli, eval_fw_spin_half_analytic, polarization_operators, spatial_operators
from fwtransform.oracle import Propagator, WavepacketState, eriksen_fw
from fwtransform.params import ParticleParams, PhaseSpinState
from fwtransform.scenario import probe_case, preset_scenario, run_ehrenfest, run_simulate
from fwtransform.semiclassical import (
    IntegratorControls,
    cyclotron_frequency,
    cyclotron_radius,
    integrate,
    rhs_spin_half,
    rotation_frequency,
)
from fwtransform.transform import ScalingCase, exact_fw, general_fw, hbar_scaling_probe, random_commuting_triple

UNITARITY = {}


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def _probe(name, hbars=None):
    scn = preset_scenario(name)
    case = probe_case(scn, scn.fields(), scn.scheme)
    hb = hbars or scn.section("probe")["hbar"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return hbar_scaling_probe(case, hb), case


def test_criterion_1_exact_case(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst_odd = worst_form = worst_u = 0.0
    for i in range(50):
        dim = (8, 16, 32, 64)[i % 4]
        parts = random_commuting_triple(rng, dim)
        res = exact_fw(*parts)
        closed = parts.M.beta @ res.epsilon.matrix + parts.E.matrix
        # measured on the conjugated U H U^-1, not on the closed form
        hp = res.H_prime.matrix
        worst_odd = max(worst_odd, rel_norm(odd_part(hp, parts.M.beta), hp))
        worst_form = max(worst_form, rel_norm(hp - closed, hp))
        worst_u = max(worst_u, res.unitarity_defect)
    dt = time.perf_counter() - t0
    UNITARITY["criterion 1"] = worst_u
    ok = worst_odd <= 1e-10 and worst_form <= 1e-10 and dt < 10
    report(1, ok, f"max odd {worst_odd:.2e}, max |U H U^-1 - (beta eps + E)| {worst_form:.2e}, {dt:.2f} s")


def test_criterion_2_free_particle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    p = ParticleParams()
    worst = 0.0
    worst_u = 0.0
    for k in rng.uniform(-3, 3, size=(100, 3)):
        parts = build_dirac_pauli(zero_field(), p, MomentumBlock(k), check=False)
        eps = np.sqrt(1 + k @ k)
        closed = np.diag([eps, eps, -eps, -eps])
        hs = [exact_fw(*parts), general_fw(*parts)]
        mats = [r.H_fw.matrix for r in hs] + [eriksen_fw(parts.total()).H_diag.matrix, closed]
        worst_u = max(worst_u, *(r.unitarity_defect for r in hs))
        for i in range(4):
            for j in range(i):
                worst = max(worst, np.linalg.norm(mats[i] - mats[j]) / np.linalg.norm(closed))
    dt = time.perf_counter() - t0
    UNITARITY["criterion 2"] = worst_u
    report(2, worst <= 1e-12 and dt < 1, f"max pairwise relative gap {worst:.2e}, {dt:.2f} s")


def test_criterion_3_spinless_fw(report):
    t0 = time.perf_counter()
    rep, case = _probe("feshbach-villars-gaussian-well")
    dt = time.perf_counter() - t0
    s_ref, s_orc = rep.slopes["reference_gap"], rep.slopes["oracle_reference_gap"]
    worst_u = max(general_fw(*case(h).parts).unitarity_defect for h in rep.hbar)
    UNITARITY["criterion 3"] = worst_u
    ok = abs(s_ref - 2) <= 0.15 and abs(s_orc - 2) <= 0.15 and dt < 60
    report(3, ok, f"slope general-vs-closed {s_ref:.4f}, oracle-vs-closed {s_orc:.4f}, {dt:.2f} s")


def test_criterion_4_odd_residual_order(report):
    rep, _ = _probe("feshbach-villars-gaussian-well")
    s = rep.slopes["odd_remainder"]
    report(4, abs(s - 1) <= 0.1, f"slope of first-stage odd remainder {s:.4f}")


def test_criterion_5_unitarity(report):
    quiet = lambda n, ok, detail: None
    for name, fn in (("criterion 1", test_criterion_1_exact_case), ("criterion 2", test_criterion_2_free_particle),
                     ("criterion 3", test_criterion_3_spinless_fw)):
        if name not in UNITARITY:
            fn(quiet)
    worst = max(UNITARITY.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(UNITARITY.items()))
    report(5, worst <= 1e-10, detail)


def test_criterion_6_spin_half_cross_check(report):
    t0 = time.perf_counter()
    rep, case = _probe("dirac-pauli-uniform-EB")
    dt = time.perf_counter() - t0
    s = rep.slopes["reference_gap"]

    def wrong(hbar):
        c = case(hbar)
        scn = preset_scenario("dirac-pauli-uniform-EB")
        params = scn.particle(hbar)
        _, terms = eval_fw_spin_half_analytic(scn.fields(), params, scn.scheme(), terms=True)
        # halving N^2 doubles every N^-1 ... N^-1 sandwich
        extra = sum(terms[k].matrix for k in ("normal_spin_orbit", "anomalous_helicity", "edm_helicity"))
        return ScalingCase(c.parts, c.state, c.lambda_over_l, c.reference.like(c.reference.matrix + extra))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bad = hbar_scaling_probe(wrong, rep.hbar, oracle=False).slopes["reference_gap"]
    ok = s >= 2 - 0.05 and bad < 1.5 and dt < 60
    report(6, ok, f"slope {s:.4f} (fit resolution 0.05); with N = sqrt(eps(eps+mc^2)) slope {bad:.4f}; {dt:.2f} s")


def test_criterion_7_precession(report):
    rest = run_simulate(preset_scenario("dirac-pauli-uniform-B"))
    scn = preset_scenario("dirac-pauli-uniform-B")
    p = scn.particle()
    B = scn.section("field")["B"][2]
    omega = abs(rest["frequencies"]["spin_rotation"])
    expect = p.g * abs(p.mu0) * B / p.hbar
    err_rest = abs(omega - expect) / expect
    g2 = run_simulate(preset_scenario("g-minus-2"))
    f = g2["frequencies"]
    err_anom = abs(f["anomaly_ratio"] - f["anomaly_expected"]) / f["anomaly_expected"]
    drift = max(rest["trajectory"]["max_spin_norm_drift"], g2["trajectory"]["max_spin_norm_drift"])
    ok = err_rest <= 1e-9 and err_anom <= 1e-7 and drift <= 1e-9
    report(
        7,
        ok,
        f"rest rate rel err {err_rest:.1e}, anomaly ratio {f['anomaly_ratio']:.12f} (rel err {err_anom:.1e}), |P| drift {drift:.1e}",
    )


def test_criterion_8_quantum_classical(report):
    t0 = time.perf_counter()
    B, p = 0.2, ParticleParams(g=2.2, hbar=0.05)
    field = uniform_magnetic((0, 0, B))
    sch = MomentumBlock()
    H = eval_fw_spin_half_analytic(field, p, sch)
    ops = spatial_operators(field, p, sch)
    pols = polarization_operators(ops)
    _, dP = rhs_spin_half(PhaseSpinState((0, 0, 0), (0, 0, 0), (1, 0, 0)), field, p)
    omega_cl = dP[1]  # rotation rate about +z for P along x
    period = 2 * np.pi / abs(omega_cl)
    t = np.linspace(0, 10 * period, 801)
    prop = Propagator(H, p.hbar)
    psi0 = WavepacketState(np.array([1, 1, 0, 0]) / np.sqrt(2), 4)
    traj = np.array([[prop.evolve(psi0, s).expectation(o) for o in pols] for s in t])
    omega_q = rotation_frequency(t, traj)
    err_prec = abs(omega_q - omega_cl) / abs(omega_cl)
    eh = run_ehrenfest(preset_scenario("ehrenfest-gaussian-well"))
    dt = time.perf_counter() - t0
    ok = err_prec <= 1e-3 and eh["lambda_over_l"] <= 0.01 and eh["rel_deviation"] <= 0.01 and dt < 120
    report(
        8,
        ok,
        f"<Pi> precession rel err {err_prec:.1e}; Ehrenfest rel dev {eh['rel_deviation']:.2e} "
        f"at lambda/l {eh['lambda_over_l']:.4f}; {dt:.2f} s",
    )


def test_criterion_9_cyclotron(report):
    p, B = ParticleParams(), 0.5
    field = uniform_magnetic((0, 0, B))
    worst_t = worst_r = 0.0
    for q in (0.1, 1.0, 3.0):
        s0 = PhaseSpinState((0, 0, 0), (q, 0, 0))
        omega = cyclotron_frequency(s0.pi, B, p)
        period = 2 * np.pi / omega
        tr = integrate(s0, field, p, 3 * period, IntegratorControls(n_samples=601))
        measured = 2 * np.pi / abs(rotation_frequency(tr.t, tr.pi))
        centre = tr.r + p.c / (p.e * B**2) * np.cross(tr.pi, [0, 0, B])
        radius = np.linalg.norm((tr.r - centre.mean(axis=0))[:, :2], axis=1)
        expect_r = cyclotron_radius(q, B, p)
        worst_t = max(worst_t, abs(measured - period) / period)
        worst_r = max(worst_r, np.max(np.abs(radius - expect_r)) / expect_r)
    report(9, worst_t <= 1e-9 and worst_r <= 1e-9, f"period rel err {worst_t:.1e}, radius rel err {worst_r:.1e}")


def test_criterion_10_determinism(report, tmp_path):
    (tmp_path / "c.toml").write_text('task = "check"\nseed = 11\n[check]\nsamples = 5\ndim = 8\n')
    runs = [
        ["check", "--scenario", str(tmp_path / "c.toml"), "--seed", "5"],
        ["transform", "--preset", "free-dirac"],
        ["simulate", "--preset", "cyclotron"],
    ]
    same = []
    for argv in runs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{argv[0]}{k}"
            subprocess.run([sys.executable, "-m", "fwtransform.cli", *argv, "--out", str(out)], check=True,
                           capture_output=True)
            blobs.append((out / "summary.json").read_bytes())
        same.append(blobs[0] == blobs[1])
    report(10, all(same), f"byte-identical summaries: {dict(zip([r[0] for r in runs], same))}")
