import numpy as np
import pytest
from scipy import integrate

from heisensuper.fourier import (
    GroupFunction, admissible_pairs, conj_compatibility, delta_pairing, gaussian_profile,
    group_fourier, inversion, inversion_check, left_regular_check, parseval_check,
    parseval_fixed, profile_transform, random_group_function, rank_one, schrodinger_at,
    supertrace, supertrace_graded, supertrace_independence,
)
from heisensuper.gaussfun import GaussPolyPhase, SuperFunction, e0_odd_order
from heisensuper.grassmann import GrassmannElement, dderiv

EVEN = [(1, 1), (2, 0), (0, 2), (2, 2)]


def test_profile_is_shifted_gaussian():
    h0, w = 1.0, 0.1
    g = gaussian_profile(h0, w)
    for hbar in (0.8, 1.0, 1.13):
        want = np.sqrt(2 * np.pi) / w * np.exp(-(hbar - h0) ** 2 / (2 * w ** 2))
        assert abs(profile_transform(g, hbar) - want) < 1e-10 * want
    f = lambda t, part: part(g(np.array([t])) * np.exp(-1.07j * t))
    quad = sum(s * integrate.quad(f, -200, 200, args=(part,), limit=400)[0]
               for s, part in [(1, np.real), (1j, np.imag)])
    assert abs(quad - profile_transform(g, 1.07)) < 1e-8


def termwise_transform(f, hbar):
    """Berezin integral of ``F(x) U(x)`` built from the closed-form expansion."""
    rep = schrodinger_at(f.p, f.q, -hbar)
    lay = rep.layout
    out = 0
    for F, g in f.terms:
        Fc = GrassmannElement({a: h.total() for a, h in F.comps.items()}, rep.expansion.n)
        comps = rep.expansion.lmul(Fc).comps
        for i in e0_odd_order(lay.r, lay.s):
            comps = dderiv(comps, i)
        out = out + profile_transform(g, hbar) * (2j) ** lay.s * comps.get(0, 0)
    return out


@pytest.mark.parametrize("p,q", EVEN)
def test_transform_matches_termwise_berezin(p, q, rng):
    f = random_group_function(p, q, rng)
    for hbar in (0.9, 1.05):
        a, b = group_fourier(f, hbar), termwise_transform(f, hbar)
        assert np.abs(a - b).max() < 1e-12 * max(1, np.abs(b).max())


@pytest.mark.parametrize("p,q", EVEN)
def test_involution_gives_adjoint(p, q, rng):
    f = random_group_function(p, q, rng)
    for hbar in (0.9, 1.1, -0.7):
        assert conj_compatibility(f, hbar) < 1e-12


@pytest.mark.xfail(strict=True, reason="pointwise conjugation moves the profile to -hbar")
def test_pointwise_conjugate_gives_adjoint():
    f = random_group_function(2, 0, np.random.default_rng(2))
    assert conj_compatibility(f, 1.0, pointwise=True) < 1e-6


def test_zero_function():
    f = GroupFunction(2, 0, [])
    assert np.all(group_fourier(f, 1.0) == 0)
    assert all(v == 0 for v in inversion(f, 0.3, nodes=8).values())


def test_transform_errors(rng):
    f = random_group_function(2, 0, rng)
    with pytest.raises(ValueError):
        group_fourier(f, 0.0)
    with pytest.raises(ValueError):
        group_fourier(GroupFunction(1, 0, []), 1.0)
    with pytest.raises(ValueError):
        inversion(f, 0.0, window=(-0.5, 0.5))


@pytest.mark.parametrize("p,q", EVEN)
def test_supertrace_independent_of_pair(p, q, rng):
    rep = schrodinger_at(p, q, 0.8)
    d = rep.space.dim
    for _ in range(3):
        T = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rpt = supertrace_independence(rep, T, count=4, seed=int(rng.integers(1000)))
        assert rpt["spread"] < 1e-10 and rpt["vs_graded"] < 1e-10


@pytest.mark.parametrize("p,q", EVEN)
def test_supertrace_of_identity_and_rank_one(p, q, rng):
    rep = schrodinger_at(p, q, 1.3)
    d0, d1 = rep.space.dims
    phi, psi = admissible_pairs(rep, 1)[0]
    assert abs(supertrace(rep, np.eye(rep.space.dim), phi, psi) - (d0 - d1)) < 1e-12
    for _ in range(3):
        a = rng.normal(size=rep.space.dim) + 1j * rng.normal(size=rep.space.dim)
        b = rng.normal(size=rep.space.dim) + 1j * rng.normal(size=rep.space.dim)
        want = b.conj() @ rep.space.gram @ (rep.space.P @ a)
        assert abs(supertrace_graded(rep, rank_one(rep, a, b)) - want) < 1e-12
        assert abs(supertrace(rep, rank_one(rep, a, b), phi, psi) - want) < 1e-10


def test_supertrace_needs_nonzero_pairing():
    rep = schrodinger_at(1, 1, 1.0)
    with pytest.raises(ValueError):
        supertrace(rep, np.eye(2), np.array([1.0, 0]), np.array([1.0, 0]))


@pytest.mark.parametrize("p,q", EVEN + [(3, 1), (1, 3)])
def test_delta_pairing_sign(p, q, rng):
    rep = schrodinger_at(p, q, 0.9)
    n = rep.layout.n_ext
    F = SuperFunction(0, n, {a: GaussPolyPhase.constant(complex(*rng.normal(size=2)), 0)
                             for a in range(1 << n)})
    lhs, lhs_def, rhs = delta_pairing(rep, F)
    assert abs(lhs - lhs_def) < 1e-10
    assert abs(rhs - (-1) ** rep.r * lhs) < 1e-10 * max(1, abs(lhs))


@pytest.mark.parametrize("p,q", [(2, 0), (1, 1)])
def test_inversion(p, q, rng):
    f = random_group_function(p, q, rng)
    times = np.round(rng.uniform(-2, 2, size=5), 6)
    rpt = inversion_check(f, times, nodes=24)
    assert rpt["inversion_residual"] < 1e-6
    assert rpt["quadrature_change"] < 1e-6


@pytest.mark.xfail(strict=True, reason="the extra |hbar| weight overshoots by the profile mean")
def test_inversion_with_literal_measure():
    f = random_group_function(2, 0, np.random.default_rng(0))
    assert inversion_check(f, [0.3], nodes=24, literal=True)["inversion_residual"] < 1e-6


@pytest.mark.parametrize("p,q", [(2, 0), (1, 1)])
def test_parseval(p, q, rng):
    f1, f2 = random_group_function(p, q, rng), random_group_function(p, q, rng)
    assert parseval_check(f1, f2, nodes=48)["parseval_residual"] < 1e-6


@pytest.mark.parametrize("p,q", EVEN)
def test_parseval_at_fixed_hbar(p, q, rng):
    f1, f2 = random_group_function(p, q, rng), random_group_function(p, q, rng)
    lhs, rhs = parseval_fixed(f1, f2, 1.02)
    assert all(abs(v - rhs) < 1e-10 * max(1, abs(rhs)) for v in lhs)


@pytest.mark.parametrize("p,q", EVEN)
def test_left_regular(p, q, rng):
    f = random_group_function(p, q, rng)
    assert left_regular_check(f, 0.95) < 1e-10
