"""
Spin precession and the g-2 anomaly from the semiclassical equations
=====================================================================

At rest in a magnetic field the polarization turns at g mu0 B / hbar.  For
a moving particle the spin outruns the momentum by a fraction
a eps'/(m c^2), with a = (g-2)/2.
"""

import numpy as np

from fwtransform import IntegratorControls, ParticleParams, PhaseSpinState, integrate, uniform_magnetic
from fwtransform.semiclassical import (
    cyclotron_frequency,
    rest_precession_frequency,
    rotation_frequency,
)

B = 0.1
field = uniform_magnetic((0.0, 0.0, B))
p = ParticleParams(e=-1.0, g=2.002319)

# At rest
tr = integrate(PhaseSpinState((0, 0, 0), (0, 0, 0), (1, 0, 0)), field, p, 200.0,
               IntegratorControls(n_samples=2001))
# The polarization turns about B at -g mu0 B / hbar
print("rest: measured", rotation_frequency(tr.t, tr.P), "expected", -rest_precession_frequency(B, p))

# Moving transverse to B
for q in (0.5, 2.0):
    s0 = PhaseSpinState((0, 0, 0), (q, 0, 0), (1, 0, 0))
    period = 2 * np.pi / abs(cyclotron_frequency(s0.pi, B, p))
    tr = integrate(s0, field, p, 20 * period, IntegratorControls(n_samples=4001))
    w_s = rotation_frequency(tr.t, tr.P)
    w_c = rotation_frequency(tr.t, tr.pi)
    print(f"|pi| = {q}: (Omega_s - omega_c)/omega_c = {(w_s - w_c) / w_c:.10f}, "
          f"a eps'/mc^2 = {p.anomaly * p.energy(s0.pi) / p.rest_energy:.10f}, "
          f"|P| drift {tr.max_spin_drift():.1e}")
