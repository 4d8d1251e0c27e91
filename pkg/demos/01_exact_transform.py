"""
Exact block-diagonalization when the odd part commutes
=======================================================

Build a random triple (M, E, O) from one odd generator so every pair
commutes, rotate it with the closed-form unitary and compare with the
one-step sign-function oracle.
"""

import numpy as np

from fwtransform import eriksen_fw, exact_fw, general_fw, random_commuting_triple
from fwtransform.algebra import odd_part

rng = np.random.default_rng(1)
parts = random_commuting_triple(rng, 16)
H = parts.total()
print("input odd norm       :", np.linalg.norm(parts.O.matrix))

# Closed-form rotation: U = (eps + M + beta O) / sqrt(2 eps (eps + M))
res = exact_fw(*parts)
print("odd part of U H U^-1 :", np.linalg.norm(odd_part(res.H_prime.matrix, H.beta)))
print("U^dag U - 1          :", res.unitarity_defect)

# The general nested-commutator path reduces to the same answer here
gen = general_fw(*parts)
print("general vs exact     :", np.linalg.norm(gen.H_fw.matrix - res.H_fw.matrix))

# One-step oracle built from the matrix sign function
orc = eriksen_fw(H)
print("oracle vs exact      :", np.linalg.norm(orc.H_diag.matrix - res.H_fw.matrix))

# The even diagonal blocks carry the spectrum: +eps on top, -eps below
w = np.linalg.eigvalsh(res.H_fw.matrix)
print("positive levels      :", np.round(w[w > 0], 6))
