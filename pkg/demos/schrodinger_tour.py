"""Build Schrodinger representations and check their basic structure."""

import numpy as np

from heisensuper.hilbertsuper import exterior_berezin, signature
from heisensuper.schrod import (
    build_schrodinger, clifford_structure, group_homomorphism_check, intertwiner_space,
    normalized_odd_intertwiner,
)

print("Berezin gram on the exterior algebra")
for n in range(1, 6):
    h = exterior_berezin(n)
    print(f"  n={n}  parity={h.parity}  sgn={tuple(int(v) for v in signature(h))}")

hbar = 0.7
print("\np + q even: irreducible, Clifford image is the full matrix algebra")
for p, q in [(1, 1), (2, 0), (2, 2)]:
    rep = build_schrodinger(0, p, q, hbar)
    res, rank, _ = clifford_structure(rep)
    data = rep.rep_data()
    ints = [len(intertwiner_space(data, data, d)) for d in (0, 1)]
    print(f"  ({p},{q})  dim={rep.space.dim}  relations={res:.1e}  rank={rank}  "
          f"intertwiners={ints}  group law={group_homomorphism_check(rep):.1e}")

print("\np + q odd: one extra odd self-intertwiner A")
for p, q in [(1, 0), (0, 1), (2, 1)]:
    for sigma in (0, 1):
        rep = build_schrodinger(0, p, q, hbar, sigma)
        A = normalized_odd_intertwiner(rep)
        print(f"  ({p},{q}) parity {sigma}  A^2 = {np.round((A @ A)[0, 0], 12)} * 1")
