from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from heisensuper.gaussfun import (
    GaussPolyPhase, SuperFunction, berezin_integrate, dirac_identities_check,
    gaussian_moment, kappa, random_superfunction,
)
from heisensuper.grassmann import merge_sign


def moment_1d(q, b, n):
    """Closed form: shifted Gaussian with mean b/2q and variance 1/2q."""
    mu, var = b / (2 * q), 1 / (2 * q)
    central = lambda k: 0 if k % 2 else var ** (k // 2) * np.prod(np.arange(k - 1, 0, -2), initial=1.0)
    mom = sum(comb(n, k) * mu ** (n - k) * central(k) for k in range(n + 1))
    return np.sqrt(np.pi / q) * np.exp(b * b / (4 * q)) * mom


def quad_1d(q, b, n):
    f = lambda x, part: part(x ** n * np.exp(-q * x * x + b * x))
    re = integrate.quad(f, -np.inf, np.inf, args=(np.real,))[0]
    im = integrate.quad(f, -np.inf, np.inf, args=(np.imag,))[0]
    return re + 1j * im


def test_standard_gaussian():
    assert abs(GaussPolyPhase.gaussian([[1.0]]).total() - sqrt(np.pi)) < 1e-14


def test_closed_form_matches_quadrature():
    for q, b, n in [(1.0, 0.3, 0), (0.7, 0.2 + 0.5j, 3), (1.3 + 0.4j, -0.4 + 0.1j, 4)]:
        assert abs(moment_1d(q, b, n) - quad_1d(q, b, n)) < 1e-8


@given(st.floats(0.3, 3.0), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 6))
def test_moments_1d(qr, qi, br, bi, n):
    q, b = qr + 1j * qi * qr, br + 1j * bi
    got = gaussian_moment([[q]], [b], (n,))
    want = moment_1d(q, b, n)
    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_moment_2d_against_quadrature():
    Q = np.array([[1.2, 0.3], [0.3, 0.8]])
    b = np.array([0.2, -0.4])
    f = lambda y, x: x * y ** 2 * np.exp(-np.array([x, y]) @ Q @ np.array([x, y]) + b @ [x, y])
    want = integrate.dblquad(f, -8, 8, -8, 8, epsabs=1e-12)[0]
    assert abs(gaussian_moment(Q, b, (1, 2)) - want) < 1e-8


def test_non_integrable_raises():
    with pytest.raises(ValueError):
        GaussPolyPhase.gaussian([[-1.0]]).total()


def test_closure_operations(rng):
    f = GaussPolyPhase.gaussian([[1.0 + 0.2j]], [0.3], 2.0, (1,))
    x = np.array([0.37])
    h = 1e-6
    num = (f(x + h) - f(x - h)) / (2 * h)
    assert abs(f.deriv(0)(x) - num) < 1e-7
    assert abs(f.mulcoord(0)(x) - x[0] * f(x)) < 1e-13
    assert abs(f.translate([0.5])(x) - f(x - 0.5)) < 1e-13
    assert abs(f.phase([0.7])(x) - np.exp(0.7j * x[0]) * f(x)) < 1e-13


def test_berezin_top_component():
    f = SuperFunction.generator(0, 0, 2) * SuperFunction.generator(1, 0, 2)
    assert abs(berezin_integrate(f) - 1) < 1e-15


def test_complex_pairs_measure():
    # zeta_a at 2a, zbar_a at 2a+1; measure dzeta^s dzbar^s ... dzeta^1 dzbar^1
    for s in (1, 2, 3):
        n = 2 * s
        f = SuperFunction.constant(1.0, 0, n)
        for a in range(s):
            f = f * SuperFunction.generator(2 * a + 1, 0, n) * SuperFunction.generator(2 * a, 0, n)
        order = [i for a in range(s) for i in (2 * a + 1, 2 * a)]
        assert abs(berezin_integrate(f, order) - 1) < 1e-15


def test_berezin_equals_top_coefficient(rng):
    for m, n in [(0, 3), (1, 2), (2, 3)]:
        f = random_superfunction(rng, m, n)
        top = f.comps[(1 << n) - 1].total()
        assert abs(berezin_integrate(f) - top) < 1e-12 * max(1, abs(top))


def test_product_matches_monomial_expansion(rng):
    m, n = 1, 3
    f, g = random_superfunction(rng, m, n), random_superfunction(rng, m, n)
    x = np.array([0.4])
    prod = (f * g)(x)
    want = {}
    for a, fa in f.comps.items():
        for b, gb in g.comps.items():
            if a & b:
                continue
            want[a | b] = want.get(a | b, 0) + merge_sign(a, b) * fa(x) * gb(x)
    for k in set(prod) | set(want):
        assert abs(prod.get(k, 0) - want.get(k, 0)) < 1e-12


def test_translation_invariance(rng):
    f = random_superfunction(rng, 2, 2)
    g = f.map_even(lambda h: h.translate([0.3, -1.1]))
    assert abs(berezin_integrate(f) - berezin_integrate(g)) < 1e-11


def test_json_roundtrip(rng):
    f = random_superfunction(rng, 1, 2)
    g = SuperFunction.from_json(f.to_json())
    x = np.array([0.2])
    assert all(abs(f(x)[k] - g(x)[k]) < 1e-14 for k in f(x))


def test_kappa_example():
    assert abs(kappa(0, 0, 1, 1, 2) - 2) < 1e-15


def test_dirac_constant_function():
    for s, eps, hbar in [(1, 1, 2.0), (2, -1, 0.7)]:
        assert dirac_identities_check(0, 0, s, eps, hbar)["dirac1"] < 1e-13


def test_dirac_even_pair():
    assert dirac_identities_check(1, 1, 0, 1, 1.3)["dirac0"] < 1e-10


@pytest.mark.parametrize("m,r,s,eps,hbar", [
    (0, 1, 1, 1, 1.0), (1, 0, 1, -1, 0.8), (1, 1, 1, 1, -1.4), (0, 2, 0, 1, 2.0), (1, 0, 2, 1, 1.1),
])
def test_dirac_identities(m, r, s, eps, hbar):
    assert dirac_identities_check(m, r, s, eps, hbar)["max"] < 1e-10


def test_dirac_rejects_zero_hbar():
    with pytest.raises(ValueError):
        dirac_identities_check(0, 0, 1, 1, 0.0)
