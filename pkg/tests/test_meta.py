import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from heisensuper.gaussfun import GaussPolyPhase
from heisensuper.hilbertsuper import is_superunitary, superadjoint_matrix
from heisensuper.meta import (
    SpoAlg, U_star, WeylOp, clifford_table, display_residual, equivariance_check, is_compact,
    mu_star, mu_star_morphism_check, preserves_gaussians, rotation, skew_check,
    spin_conjugation_residual, spin_exponential,
)
from heisensuper.schrod import build_schrodinger


def signatures():
    for m in (0, 1):
        for p in range(5):
            for q in range(5 - p):
                if m == 0 and p + q < 2:
                    continue
                for sigma in ((0, 1) if (p + q) % 2 else (None,)):
                    yield m, p, q, sigma


SIGS = list(signatures())


def make(m, p, q, sigma=None, hbar=0.7):
    return SpoAlg(m, p, q), build_schrodinger(m, p, q, hbar, sigma=sigma)


def s_action_oracle(alg, a, b):
    # [e_a e_b - e_b e_a, e_c] = 2 (omega_bc e_a - omega_ac e_b)
    w = alg.heis.omega_odd
    n0, n = alg.n_even, alg.n_odd
    A = np.zeros((n0 + n, n0 + n))
    for c in range(n):
        A[n0 + a, n0 + c] += 2 * w[b, c]
        A[n0 + b, n0 + c] -= 2 * w[a, c]
    return A


def test_basis_size():
    for m, p, q, _ in SIGS:
        alg = SpoAlg(m, p, q)
        n0, n = 2 * m, p + q
        assert alg.dim == n0 * (n0 + 1) // 2 + n * (n - 1) // 2 + n0 * n
        assert sum(alg.parity(k) for k in range(alg.dim)) == n0 * n


def test_s_action_matches_oracle():
    for m, p, q, _ in SIGS:
        alg = SpoAlg(m, p, q)
        for k, (kind, a, b) in enumerate(alg.basis):
            if kind == "s":
                np.testing.assert_allclose(alg.mats[k], s_action_oracle(alg, a, b), atol=1e-14)


def test_act_preserves_form_and_closes():
    for m, p, q, _ in SIGS:
        alg = SpoAlg(m, p, q)
        assert alg.spo_residual() < 1e-12
        assert alg.closure_residual < 1e-12
        assert alg.lie.jacobi_residual() < 1e-11


@pytest.mark.parametrize("m,p,q,sigma", SIGS)
def test_mu_star_residuals(m, p, q, sigma):
    alg, rep = make(m, p, q, sigma)
    assert mu_star_morphism_check(alg, rep) < 1e-11
    assert equivariance_check(alg, rep) < 1e-11
    assert skew_check(alg, rep) < 1e-11
    assert display_residual(alg, rep) < 1e-12


def test_morphism_m1_20_negative_hbar():
    alg, rep = make(1, 2, 0, hbar=-1.3)
    assert mu_star_morphism_check(alg, rep) < 1e-11
    assert equivariance_check(alg, rep) < 1e-11


def test_mu_s_two_by_two_clifford():
    alg, rep = make(0, 2, 0)
    k = alg.index("s", 0, 1)
    M = mu_star(alg, rep, k).terms[((), ())]
    assert M.shape == (2, 2)
    g1, g2 = rep.odd_gens
    np.testing.assert_allclose(M, (g1 @ g2 - g2 @ g1) / (1j * rep.hbar), atol=1e-14)
    # even operator in a compact direction: its square is a negative multiple of 1
    np.testing.assert_allclose(M @ M, -np.eye(2), atol=1e-13)
    assert np.abs(M[0, 1]) + np.abs(M[1, 0]) < 1e-14


def test_mu_m_preserves_gaussians():
    alg, rep = make(1, 0, 0)
    f = GaussPolyPhase.gaussian([[0.9 + 0.3j]], [0.2 - 0.1j], 1.0)
    pts = [np.array([x]) for x in (-0.8, 0.1, 0.7)]
    for i in range(2):
        op = mu_star(alg, rep, alg.index("m", i, i))
        ok, out = preserves_gaussians(op, {0: f})
        assert ok and set(out) == {0}
        # -(2i/hbar) U_*(c_i)^2 with U_*(c_0) = -d, U_*(c_1) = -i hbar x
        h = rep.hbar
        for x in pts:
            if i == 0:
                eps = 1e-4
                d2 = (f(x + eps) - 2 * f(x) + f(x - eps)) / eps ** 2
                want = -2j / h * d2
            else:
                want = -2j / h * (-1j * h * x[0]) ** 2 * f(x)
            assert abs(out[0](x) - want) < 1e-5 * max(1, abs(want))


def test_weyl_ccr():
    g = np.array([0, 1])
    d, x = WeylOp.d_(1, g, 0), WeylOp.x(1, g, 0)
    comm = d @ x - x @ d
    assert (comm - WeylOp.scalar(1, g, 1.0)).norm() < 1e-15
    assert (d @ d @ x).order() == 2


def test_U_star_superadjoint_skew():
    for m, p, q, sigma in [(1, 1, 1, None), (1, 2, 0, None), (1, 0, 1, 1)]:
        _, rep = make(m, p, q, sigma)
        for k in range(2 * m + p + q):
            U = U_star(rep, k)
            assert (U.superadjoint(rep.space) + U).norm() < 1e-13


def test_spin_exponential_identity_at_zero():
    for m, p, q, sigma in [(0, 2, 0, None), (0, 1, 1, None), (1, 2, 2, None), (0, 3, 0, 0)]:
        alg, rep = make(m, p, q, sigma)
        coeffs = [1.0 if kind == "s" else 0.0 for kind, _, _ in alg.basis]
        S = spin_exponential(alg, rep, coeffs, 0.0)
        np.testing.assert_allclose(S.matrix, np.eye(rep.space.dim), atol=1e-15)


@given(st.sampled_from([(0, 2, 0, None), (0, 0, 2, None), (0, 1, 1, None), (0, 3, 1, None),
                        (0, 2, 2, None), (1, 2, 0, None), (0, 3, 0, 1)]),
       st.lists(st.floats(-1.5, 1.5), min_size=6, max_size=6), st.floats(-2, 2))
@example((0, 2, 2, None), [0.0, 0.0, 0.0, 1.0, 1.5, 0.0], 2.0)
def test_spin_exponential_superunitary(sig, raw, t):
    m, p, q, sigma = sig
    alg, rep = make(m, p, q, sigma)
    it = iter(raw)
    coeffs = [next(it) if kind == "s" else 0.0 for kind, _, _ in alg.basis]
    S = spin_exponential(alg, rep, coeffs, t)
    assert S.degree == 0
    assert is_superunitary(S.matrix, rep.space, rep.space, tol=1e-9)
    assert spin_conjugation_residual(alg, rep, coeffs, t, S.matrix) < 1e-10
    # rotation preserves the odd form
    R = rotation(alg, coeffs, t)
    n0 = alg.n_even
    W = alg.heis.omega_odd
    Rodd = R[n0:, n0:]
    scale = max(1.0, float(np.abs(Rodd).max()) ** 2)
    assert np.abs(Rodd.T @ W @ Rodd - W).max() < 1e-12 * scale


def test_compact_directions():
    alg, rep = make(0, 2, 1, 0)
    flags = {alg.labels[k]: is_compact(alg, k) for k in range(alg.dim)}
    assert flags == {"s_12": True, "s_13": False, "s_23": False}
    for k in range(alg.dim):
        coeffs = np.eye(alg.dim)[k]
        S = spin_exponential(alg, rep, coeffs, 0.9).matrix
        Sd = superadjoint_matrix(S, 0, rep.space, rep.space)
        np.testing.assert_allclose(Sd @ S, np.eye(rep.space.dim), atol=1e-12)


def test_spin_exponential_outside_s_span():
    alg, rep = make(1, 2, 0)
    with pytest.raises(ValueError):
        spin_exponential(alg, rep, np.eye(alg.dim)[alg.index("m", 0, 0)], 0.3)
    with pytest.raises(ValueError):
        spin_exponential(alg, rep, np.eye(alg.dim)[alg.index("t", 0, 1)], 0.3)


def test_argument_errors():
    alg = SpoAlg(0, 2, 0)
    rep = build_schrodinger(0, 1, 1, 1.0)
    with pytest.raises(ValueError):
        mu_star(alg, rep, 0)
    _, rep = make(0, 2, 0)
    with pytest.raises(ValueError):
        mu_star(alg, rep, alg.dim)
    with pytest.raises(ValueError):
        alg.index("s", 1, 1)


def test_odd_elements_have_odd_images():
    alg, rep = make(1, 1, 1)
    for k in range(alg.dim):
        assert mu_star(alg, rep, k).parity() == alg.parity(k)


def test_clifford_table():
    alg, rep = make(0, 2, 2)
    tab = clifford_table(alg, rep)
    assert sorted(tab["matrices"]) == ["s_12", "s_13", "s_14", "s_23", "s_24", "s_34"]
    for key in ("morphism", "equivariance", "skew", "jacobi"):
        assert tab[key] < 1e-11
    for M in tab["matrices"].values():
        assert M.shape == (4, 4)
