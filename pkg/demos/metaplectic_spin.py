"""Quadratic elements act on the Schrodinger space; spin rotations lift to it."""

import numpy as np

from heisensuper.hilbertsuper import is_superunitary
from heisensuper.meta import (
    SpoAlg, clifford_table, equivariance_check, mu_star_morphism_check, spin_exponential,
)
from heisensuper.schrod import build_schrodinger

for m, p, q in [(0, 2, 0), (0, 2, 2), (1, 2, 0), (1, 1, 1)]:
    alg, rep = SpoAlg(m, p, q), build_schrodinger(m, p, q, 0.7)
    print(f"m={m} ({p},{q}) dim spo={alg.dim}  morphism={mu_star_morphism_check(alg, rep):.1e}  "
          f"equivariance={equivariance_check(alg, rep):.1e}")

alg, rep = SpoAlg(0, 2, 0), build_schrodinger(0, 2, 0, 0.7)
print("\nmu_*(s_12) on (2,0):\n", np.round(clifford_table(alg, rep)["matrices"]["s_12"], 12))
for t in (0.0, np.pi / 2, np.pi):
    S = spin_exponential(alg, rep, [1.0], t)
    print(f"t={t:.3f}  diag={np.round(np.diag(S.matrix), 12)}  "
          f"superunitary={is_superunitary(S.matrix, rep.space, rep.space)}")
