import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisensuper.grassmann import (
    BudgetError, GrassmannElement, GrassmannMatrix, berezin, gr_body, gr_conj,
    gr_exp, gr_mul, merge_sign, random_element,
)

N = 6


def xi(i, n=N):
    return GrassmannElement.generator(i, n)


def brute_mul(a, b):
    """Expand term by term and bubble-sort each word, counting swaps."""
    out = {}
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            word = [i for i in range(a.n) if ma >> i & 1] + [i for i in range(b.n) if mb >> i & 1]
            if len(set(word)) < len(word):
                continue
            swaps = 0
            for i in range(len(word)):
                for j in range(len(word) - 1 - i):
                    if word[j] > word[j + 1]:
                        word[j], word[j + 1] = word[j + 1], word[j]
                        swaps += 1
            mask = sum(1 << i for i in word)
            out[mask] = out.get(mask, 0) + (-1) ** swaps * ca * cb
    return GrassmannElement(out, a.n)


def elements(n=N, parity=None):
    return st.integers(0, 2**32 - 1).map(
        lambda s: random_element(np.random.default_rng(s), n, 0.4, parity))


def test_antisymmetry():
    assert gr_mul(xi(0), xi(1)).coeffs == {0b11: 1}
    assert gr_mul(xi(1), xi(0)).coeffs == {0b11: -1}
    assert gr_mul(xi(2), xi(2)).coeffs == {}


def test_square_of_one_plus_generator():
    a = 1 + xi(0)
    assert (a * a).allclose(1 + 2 * xi(0))


def test_mul_matches_brute_force(rng):
    for _ in range(20):
        a = random_element(rng, N, 0.3)
        b = random_element(rng, N, 0.3)
        assert gr_mul(a, b).allclose(brute_mul(a, b), tol=1e-13)


def test_merge_sign_small_cases():
    assert merge_sign(0b1, 0b10) == 1
    assert merge_sign(0b10, 0b1) == -1
    assert merge_sign(0b110, 0b1) == 1


def test_body_conj_exp_examples():
    a = 3 + 5 * xi(0) * xi(1)
    assert gr_body(a) == 3
    assert gr_conj(1j * xi(0)).allclose(-1j * xi(0))
    lhs = gr_conj(xi(0) * xi(1))
    assert lhs.allclose(-(gr_conj(xi(1)) * gr_conj(xi(0))))
    assert lhs.allclose(xi(0) * xi(1))
    assert gr_exp(xi(0) * xi(1)).allclose(1 + xi(0) * xi(1))


def test_exp_needs_order_with_body():
    with pytest.raises(ValueError):
        gr_exp(GrassmannElement.scalar(1.0, N) + xi(0))
    e = gr_exp(GrassmannElement.scalar(0.5, N), order=30)
    assert abs(gr_body(e) - np.exp(0.5)) < 1e-14


def test_generator_count_mismatch():
    with pytest.raises(ValueError):
        gr_mul(xi(0, 3), xi(0, 4))


def test_budget_overflow():
    with pytest.raises(BudgetError):
        GrassmannElement.generator(5, 4)
    with pytest.raises(BudgetError):
        GrassmannElement({1 << 4: 1.0}, 4)
    with pytest.raises(BudgetError):
        GrassmannElement({}, 80)


def test_json_roundtrip_is_canonical():
    a = 2 * xi(3) - 1j * xi(0) * xi(1) + 0.5
    data = a.to_json()
    assert [t["mask"] for t in data["terms"]] == sorted(t["mask"] for t in data["terms"])
    b = GrassmannElement.from_json(json.loads(json.dumps(data)))
    assert b.allclose(a, tol=0)


def test_berezin_picks_top_coefficient():
    a = 4 * xi(0, 2) * xi(1, 2) + 7 * xi(0, 2) + 1
    assert gr_body(berezin(a, [0, 1])) == 4
    assert gr_body(berezin(a, [1, 0])) == -4


@given(elements(parity=0), elements(parity=1), elements(parity=1))
def test_supercommutativity(a, b, c):
    assert (a * b).allclose(b * a, tol=1e-12)
    assert (b * c).allclose(-(c * b), tol=1e-12)


@given(elements(), elements(), elements())
def test_associativity(a, b, c):
    assert ((a * b) * c).allclose(a * (b * c), tol=1e-10)


@given(elements(), elements())
def test_body_is_a_morphism(a, b):
    assert abs(gr_body(a * b) - gr_body(a) * gr_body(b)) < 1e-12
    assert abs(gr_body(a + b) - gr_body(a) - gr_body(b)) < 1e-12


@given(elements(parity=0), elements(parity=1))
def test_conj_reverses_with_sign(a, b):
    for x, y in [(a, b), (b, b), (a, a)]:
        s = (-1) ** (x.parity() * y.parity())
        assert gr_conj(x * y).allclose(s * (gr_conj(y) * gr_conj(x)), tol=1e-12)


@given(elements())
def test_exp_inverse(a):
    x = a - gr_body(a)
    assert (gr_exp(x) * gr_exp(-x)).allclose(GrassmannElement.scalar(1.0, N), tol=1e-10)


def test_matrix_action_is_associative(rng):
    grading = [0, 1, 0]
    n = 4
    mats = [GrassmannMatrix({m: rng.normal(size=(3, 3)) for m in (0, 1, 2, 5)}, grading, n)
            for _ in range(3)]
    a, b, c = mats
    lhs, rhs = (a @ b) @ c, a @ (b @ c)
    assert max(np.abs(lhs.comps[k] - rhs.comps[k]).max() for k in lhs.comps) < 1e-12
