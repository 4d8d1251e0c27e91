"""
Exact quantum evolution against the classical equations
========================================================

A spinless packet sits on the slope of a Gaussian well.  Its momentum
expectation is evolved exactly under the transformed Hamiltonian and the
rate of change is compared with the classical force at the packet's mean
position and momentum.  The quantum force is the field gradient averaged
over the packet, so the mismatch grows with the packet width roughly as
width^2, while hbar alone barely moves it.
"""

from fwtransform.scenario import preset_scenario, run_ehrenfest, scenario_from_dict

base = preset_scenario("ehrenfest-gaussian-well").data


def run(hbar, width):
    doc = {**base, "particle": {**base["particle"], "hbar": hbar},
           "ehrenfest": {**base["ehrenfest"], "packet_width": width}}
    return run_ehrenfest(scenario_from_dict(doc))


print("fixed hbar = 0.01, varying packet width")
for width in (0.2, 0.4, 0.8, 1.6):
    out = run(0.01, width)
    print(f"  width {width:4.1f}  quantum {out['quantum'][0]: .6f}  "
          f"classical {out['classical'][0]: .6f}  rel dev {out['rel_deviation']:.2e}")

print("fixed width = 0.4, varying hbar")
for hbar in (0.04, 0.02, 0.01):
    out = run(hbar, 0.4)
    print(f"  hbar {hbar:5.2f}  lambda/l {out['lambda_over_l']:.4f}  rel dev {out['rel_deviation']:.2e}")
