"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from fractions import Fraction

import numpy as np

from heisensuper.fourier import (
    group_fourier, inversion_check, parseval_fixed, random_group_function, schrodinger_at,
    supertrace_independence,
)
from heisensuper.gaussfun import GaussPolyPhase
from heisensuper.grassmann import degree, merge_sign
from heisensuper.heisen import bch1_order3
from heisensuper.hilbertsuper import exterior_berezin, signature
from heisensuper.meta import SpoAlg, equivariance_check, mu_star_morphism_check
from heisensuper.schrod import (
    bch_operator_check, build_schrodinger, clifford_structure, intertwiner_space,
    normalized_odd_intertwiner, parity_extension,
)
from heisensuper.stonevn import (
    conjugated_copy, dual_classify, extend_odd_rep, extension_report, superunitary_equivalent,
    svn_decompose, svn_decompose_m,
)
from heisensuper.wigner import resolution_of_identity_check, state


def test_criterion_1_signature_tables(criterion):
    bad = []
    for n in range(1, 6):
        h = exterior_berezin(n)
        want = (2 ** (n - 1), 0, 2 ** (n - 1), 0) if n % 2 else (2 ** (n - 2),) * 4
        got = tuple(int(v) for v in signature(h))
        if h.parity != n % 2 or got != want:
            bad.append((n, h.parity, got))
    assert criterion(1, not bad, f"mismatches={bad}")


def example_matrices(p, q, hbar, sigma=None):
    """Explicit example matrices in the basis (phi_0, phi_1); eps = +1 for (2,0), (1,0)."""
    if (p, q) == (1, 1):
        return {"U10": [[0, -1], [0, 0]], "U01": [[0, 0], [1j * hbar, 0]],
                "U11": np.diag([0.5j * hbar, -0.5j * hbar]), "gram": [[0, 1], [1, 0]]}
    eps = 1 if p else -1
    gram = [[0, 1], [1, 0]] if sigma == 1 else np.diag([eps * hbar, 2j])
    if p + q == 1:
        return {"U1": [[0, -1], [0.5j * hbar * eps, 0]], "gram": gram}
    return {"U10": [[0, -1], [0, 0]], "U01": [[0, 0], [0.5j * hbar * eps, 0]],
            "U11": np.diag([0.25j * hbar * eps, -0.25j * hbar * eps]), "gram": gram}


def generated(rep):
    L, E = rep.layout, rep.expansion.comps
    out = {"gram": rep.space.gram}
    if rep.p + rep.q == 1:
        out["U1"] = E[1 << L.tau_ext]
        return out
    a, b = (L.q(0), L.p(0)) if L.r else (L.zeta(0), L.zbar(0))
    out.update(U10=E[1 << a], U01=E[1 << b], U11=merge_sign(1 << a, 1 << b) * E[(1 << a) | (1 << b)])
    return out


def test_criterion_2_schrodinger_examples(criterion):
    hbar = 0.7
    cases = [(1, 1, None), (2, 0, None), (0, 2, None)] + [(p, q, s) for p, q in [(1, 0), (0, 1)] for s in (0, 1)]
    bad = []
    for p, q, sigma in cases:
        got, want = generated(build_schrodinger(0, p, q, hbar, sigma)), example_matrices(p, q, hbar, sigma)
        for key, M in want.items():
            if np.abs(np.asarray(got[key]) - np.asarray(M)).max() > 1e-14:
                bad.append((p, q, sigma, key))
    assert criterion(2, not bad, f"mismatches={bad}")


def test_criterion_3_clifford(criterion):
    hbar = 0.8
    worst, bad = 0.0, []
    for p, q in [(1, 1), (2, 0), (0, 2), (2, 2), (3, 1), (1, 3), (4, 0), (0, 4)]:
        rep = build_schrodinger(0, p, q, hbar)
        rel, rank, _ = clifford_structure(rep)
        worst = max(worst, rel)
        data = rep.rep_data()
        even, odd = (intertwiner_space(data, data, d) for d in (0, 1))
        ok = rel < 1e-12 and rank == 2 ** (p + q) and len(even) == 1 and not odd
        ok = ok and np.allclose(even[0], even[0][0, 0] * np.eye(rep.space.dim))
        if not ok:
            bad.append((p, q))
    for p, q in [(1, 0), (0, 1), (2, 1), (1, 2), (3, 0), (0, 3)]:
        for sigma in (0, 1):
            rep = build_schrodinger(0, p, q, hbar, sigma)
            data = rep.rep_data()
            even, odd = (intertwiner_space(data, data, d) for d in (0, 1))
            A = normalized_odd_intertwiner(rep)
            ok = len(even) == 1 and len(odd) == 1 and A is not None
            ok = ok and np.abs(A @ A - (-1) ** (sigma + q) * 0.5j * hbar * np.eye(rep.space.dim)).max() < 1e-12
            if not ok:
                bad.append((p, q, sigma))
    assert criterion(3, not bad, f"relations={worst:.1e} mismatches={bad}")


def amplitude(rng, m):
    if m == 0:
        return complex(rng.normal(), rng.normal())
    a = 0.6 + rng.random()
    b = 0.3 * (rng.normal() + 1j * rng.normal())
    f = GaussPolyPhase.gaussian([[a + 0.2j * rng.normal()]], [b], complex(rng.normal(), rng.normal()))
    return f + GaussPolyPhase.gaussian([[a]], [b], complex(rng.normal(), rng.normal()), (1,))


def draw(rng, rep, parity, holomorphic=True):
    comps = {mask: amplitude(rng, rep.m) for mask in range(rep.space.dim)
             if degree(mask) % 2 == parity and (holomorphic or not mask >> rep.layout.r)}
    return state(rep, comps)


def resolution_worst(rep, pairs, rng):
    sigma, worst, done = rep.space.parity, 0.0, 0
    while done < pairs:
        a, c = rng.integers(2, size=2)
        phi = draw(rng, rep, a, holomorphic=False)
        psi = draw(rng, rep, (a + sigma) % 2, holomorphic=False)
        if not (phi.comps and psi.comps):
            continue
        res, _, rhs = resolution_of_identity_check(rep, phi, psi, draw(rng, rep, c), draw(rng, rep, (c + sigma) % 2))
        worst = max(worst, res / max(1, abs(rhs)))
        done += 1
    return worst


def test_criterion_4_resolution_of_identity(criterion):
    rng = np.random.default_rng(4)
    even = max(resolution_worst(build_schrodinger(0, p, q, 0.8), 20, rng)
               for p, q in [(1, 1), (2, 0), (0, 2), (2, 2), (3, 1), (1, 3), (4, 0), (0, 4)])
    m1 = resolution_worst(build_schrodinger(1, 2, 0, 0.8), 20, rng)
    assert criterion(4, even < 1e-12 and m1 < 1e-9, f"m=0 {even:.1e}, m=1 {m1:.1e}")


def test_criterion_5_stone_von_neumann(criterion):
    hbar, rows = 1.1, []
    for m, p, q in [(0, 2, 0), (0, 1, 1), (0, 2, 2), (1, 2, 0)]:
        for dim in (1, 2, 3):
            rep = build_schrodinger(m, p, q, hbar)
            data, _, _ = conjugated_copy(rep, dim, seed=dim)
            r = (svn_decompose_m(m, data) if m else svn_decompose(data)).report
            ok = (r["multiplicity"] == dim and r["superunitary_residual"] < 1e-10
                  and abs(r["hbar"] - hbar) < 1e-12)
            if m:
                ok = ok and max(v for k, v in r["classical"].items() if k != "uR") < 1e-10
            rows.append(ok)
    assert criterion(5, all(rows), f"{sum(rows)}/{len(rows)} roundtrips")


def test_criterion_6_odd_extension(criterion):
    hbar, bad, worst = 0.8, [], 0.0
    for p, q in [(1, 0), (0, 1)]:
        for sigma in (0, 1):
            data = build_schrodinger(0, p, q, hbar, sigma).rep_data()
            ext = extend_odd_rep(data)
            rpt = extension_report(data, ext)
            worst = max(worst, rpt["brackets"])
            target = build_schrodinger(0, *parity_extension(p, q, sigma), hbar).rep_data()
            if rpt["brackets"] >= 1e-12 or not superunitary_equivalent(ext, target)[0]:
                bad.append((p, q, sigma))
    assert criterion(6, not bad, f"brackets={worst:.1e} mismatches={bad}")


def test_criterion_7_dual_table(criterion):
    h = 0.8
    rows = dual_classify(0, 1, 0, [(s * h, sigma, j) for s in (1, -1) for sigma in (0, 1) for j in range(4)])
    bad = sorted({r["a"][1] for r in rows if r["equivalent"] != r["predicted"]})
    even = dual_classify(0, 1, 1, [(s * h, None, j) for s in (1, -1) for j in range(4)])
    distinct = all(r["equivalent"] == (r["a"] == r["b"]) for r in even)
    ok = not bad and distinct
    assert criterion(7, ok, f"predicate fails for parity {bad}; even classes distinct={distinct}")


def test_criterion_8_fourier(criterion):
    rng = np.random.default_rng(8)
    f1, f2 = random_group_function(2, 0, rng), random_group_function(2, 0, rng)
    times = np.round(rng.uniform(-2, 2, size=5), 6)
    inv = inversion_check(f1, times, (0.5, 1.5), nodes=24)["inversion_residual"]
    lhs, rhs = parseval_fixed(f1, f2, 1.0)
    fixed = max(abs(v - rhs) for v in lhs) / max(1, abs(rhs))
    T = group_fourier(f1, 1.0)
    st = supertrace_independence(schrodinger_at(2, 0, -1.0), T, seed=8)["spread"]
    st /= max(1, float(np.abs(np.trace(T)).max()))
    ok = inv < 1e-6 and fixed < 1e-10 and st < 1e-10
    assert criterion(8, ok, f"inversion={inv:.1e} parseval={fixed:.1e} supertrace={st:.1e}")


def test_criterion_9_bch(criterion):
    coeffs = bch1_order3()
    match = coeffs == (Fraction(1, 3), Fraction(1, 6))
    op = bch_operator_check(build_schrodinger(0, 2, 0, 1.0), order=3)
    ok = match and op < 1e-12
    assert criterion(9, ok, f"cubic={tuple(str(c) for c in coeffs)} operator={op:.1e}")


def test_criterion_10_metaplectic(criterion):
    worst = 0.0
    for m in (0, 1):
        for p in range(5):
            for q in range(5 - p):
                if m + p + q == 0:
                    continue
                for sigma in ((0, 1) if (p + q) % 2 else (None,)):
                    alg, rep = SpoAlg(m, p, q), build_schrodinger(m, p, q, 0.7, sigma)
                    worst = max(worst, mu_star_morphism_check(alg, rep), equivariance_check(alg, rep))
    assert criterion(10, worst < 1e-11, f"worst residual {worst:.1e}")
