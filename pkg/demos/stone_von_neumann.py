"""Hide a Schrodinger representation inside a tensor product and recover it."""

from heisensuper.hilbertsuper import fundamental_decomposition
from heisensuper.schrod import build_schrodinger
from heisensuper.stonevn import central_hbar, conjugated_copy, dual_classify, svn_decompose

rep = build_schrodinger(0, 2, 2, -0.9)
for dim in (1, 2, 3):
    data, _, HR = conjugated_copy(rep, dim, seed=dim)
    r = svn_decompose(data).report
    print(f"multiplicity space of dim {dim}: recovered {r['multiplicity']}, "
          f"hbar {central_hbar(data):+.12f}, superunitary residual {r['superunitary_residual']:.1e}, "
          f"signature {tuple(r['HR_signature'])} (true {fundamental_decomposition(HR)[1]})")

print("\ndual of H_{0|1,0}: which twisted classes coincide")
rows = dual_classify(0, 1, 0, [(h, s, j) for h in (0.8, -0.8) for s in (0, 1) for j in range(4)])
for r in rows:
    if r["equivalent"] and r["a"] < r["b"]:
        print(f"  {r['a']} ~ {r['b']}")
