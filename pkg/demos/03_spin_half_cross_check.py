"""
Spin-1/2 particle in uniform E and B: numerical transform against the closed form
===================================================================================

The Dirac-Pauli Hamiltonian (anomalous magnetic moment plus electric dipole
moment) is discretized in a Hermite basis along x.  Its general FW transform
is compared with the first-order closed-form FW Hamiltonian.  Agreement
improves like hbar^2; the normalization N = sqrt(2 eps (eps + m c^2)) is what
makes this work, as the second run with the factor 2 dropped shows.
"""

import warnings

from fwtransform import ScalingCase, eval_fw_spin_half_analytic, hbar_scaling_probe
from fwtransform.scenario import probe_case, preset_scenario

scn = preset_scenario("dirac-pauli-uniform-EB")
case = probe_case(scn, scn.fields(), scn.scheme)
hbars = [0.01, 0.02, 0.04, 0.08, 0.16]

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    rep = hbar_scaling_probe(case, hbars, oracle=False)
print("closed form, slope of the gap:", round(rep.slopes["reference_gap"], 4))


def without_factor_two(hbar):
    c = case(hbar)
    _, terms = eval_fw_spin_half_analytic(scn.fields(), scn.particle(hbar), scn.scheme(), terms=True)
    extra = sum(terms[k].matrix for k in ("normal_spin_orbit", "anomalous_helicity", "edm_helicity"))
    return ScalingCase(c.parts, c.state, c.lambda_over_l, c.reference.like(c.reference.matrix + extra))


with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    bad = hbar_scaling_probe(without_factor_two, hbars, oracle=False)
print("N without the 2, slope       :", round(bad.slopes["reference_gap"], 4))
