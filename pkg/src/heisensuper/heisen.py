"""Heisenberg Lie superalgebras and supergroups in normal form.

Points of the group and the algebra have Grassmann coordinates: even
coordinates are even Grassmann elements, odd coordinates are odd ones.
Bilinear expressions follow the Koszul sign rule, so on points

    omega(x, x') = sum_ij x^i x'^j w_ij  -  sum_ab x^a x'^b w_ab,

the minus sign coming from moving the odd coordinate ``x'^b`` past the odd
basis vector ``e_a``.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial

import numpy as np

from .grassmann import GrassmannElement, degree


class LieSuper:
    """Real Lie superalgebra given by structure constants.

    The first ``dim0`` basis vectors are even, the remaining ``dim1`` odd.
    ``brackets`` maps ``(i, j)`` to ``{k: c}`` meaning ``[b_i, b_j] = sum c b_k``;
    only one ordering per pair needs to be given.
    """

    def __init__(self, dim0, dim1, brackets, labels=None):
        self.dim0 = dim0
        self.dim1 = dim1
        self.labels = labels or [f"b{i}" for i in range(dim0 + dim1)]
        full = {}
        for (i, j), out in brackets.items():
            out = {k: c for k, c in out.items() if c != 0}
            if not out:
                continue
            full[(i, j)] = dict(out)
            sign = 1 if (self.parity(i) and self.parity(j)) else -1
            mirrored = {k: sign * c for k, c in out.items()}
            if (j, i) in full and full[(j, i)] != mirrored:
                raise ValueError(f"inconsistent brackets for {i}, {j}")
            full[(j, i)] = mirrored
        self.table = full

    @property
    def dim(self):
        return self.dim0 + self.dim1

    def parity(self, i):
        return 0 if i < self.dim0 else 1

    def bracket_basis(self, i, j):
        return self.table.get((i, j), {})

    def structure_tensor(self):
        f = np.zeros((self.dim, self.dim, self.dim))
        for (i, j), out in self.table.items():
            for k, c in out.items():
                f[i, j, k] = c
        return f

    def jacobi_residual(self):
        """Max violation of the graded Jacobi identity over basis triples."""
        f = self.structure_tensor()
        par = np.array([self.parity(i) for i in range(self.dim)])
        worst = 0.0
        for a, b, c in product(range(self.dim), repeat=3):
            # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
            lhs = f[b, c] @ f[a]
            rhs = f[a, b] @ f[:, c] + (-1) ** (par[a] * par[b]) * (f[a, c] @ f[b])
            worst = max(worst, np.abs(lhs - rhs).max())
        return worst

    def bracket(self, u, v):
        """Bracket of points ``u = sum u^i b_i`` with Grassmann coefficients.

        ``[u^i b_i, v^j b_j] = (-1)^{|b_i||v^j|} u^i v^j [b_i, b_j]``.
        """
        n = _common_n(u, v)
        out = [GrassmannElement({}, n) for _ in range(self.dim)]
        for (i, j), res in self.table.items():
            ui, vj = u[i], v[j]
            if not ui.coeffs or not vj.coeffs:
                continue
            if self.parity(i):
                vj = vj.even() - vj.odd()
            coef = ui * vj
            for k, c in res.items():
                out[k] = out[k] + c * coef
        return out

    def to_json(self):
        rows = [[i, j, k, c] for (i, j), out in sorted(self.table.items()) if i <= j
                for k, c in sorted(out.items())]
        return {"dim0": self.dim0, "dim1": self.dim1, "brackets": rows}

    @classmethod
    def from_json(cls, data):
        br = {}
        for i, j, k, c in data["brackets"]:
            br.setdefault((i, j), {})[k] = c
        return cls(data["dim0"], data["dim1"], br)


def _common_n(*vecs):
    for vec in vecs:
        for g in vec:
            return g.n
    raise ValueError("empty vectors")


def normal_form(p, q):
    """``(eps, r, s')`` with ``eps s' = p - q`` and ``2r + s' = p + q``."""
    s_prime = abs(p - q)
    r = min(p, q)
    eps = 1 if p >= q else -1
    return eps, r, s_prime


class HeisAlg(LieSuper):
    """``h_{2m|p,q}`` with basis ``c_1..c_2m, Z, e_1..e_{p+q}``."""

    def __init__(self, m, p, q):
        if min(m, p, q) < 0:
            raise ValueError("dimensions must be nonnegative")
        self.m, self.p, self.q = m, p, q
        self.eps, self.r, self.s_prime = normal_form(p, q)
        z = 2 * m
        br = {}
        for i in range(m):
            br[(i, m + i)] = {z: 1.0}
        for a in range(p + q):
            br[(z + 1 + a, z + 1 + a)] = {z: self.omega_odd[a, a]}
        labels = [f"c{i + 1}" for i in range(2 * m)] + ["Z"] + [f"e{a + 1}" for a in range(p + q)]
        super().__init__(2 * m + 1, p + q, br, labels)

    @property
    def z(self):
        return 2 * self.m

    def c(self, i):
        return i

    def e(self, a):
        return 2 * self.m + 1 + a

    @property
    def omega_even(self):
        m = self.m
        w = np.zeros((2 * m, 2 * m))
        for i in range(m):
            w[i, m + i] = 1.0
            w[m + i, i] = -1.0
        return w

    @property
    def omega_odd(self):
        return np.diag([1.0] * self.p + [-1.0] * self.q)

    def omega(self, x, y):
        """Symplectic form on Grassmann points of ``E`` (lists of coordinates)."""
        n = _common_n(x, y)
        out = GrassmannElement({}, n)
        we, wo = self.omega_even, self.omega_odd
        m2 = 2 * self.m
        for i in range(m2):
            for j in range(m2):
                if we[i, j]:
                    out = out + we[i, j] * (x[i] * y[j])
        for a in range(self.p + self.q):
            out = out - wo[a, a] * (x[m2 + a] * y[m2 + a])
        return out


@dataclass
class HeisElement:
    """Group element ``(x, t)``; ``x`` lists even then odd coordinates."""

    alg: HeisAlg
    x: list
    t: GrassmannElement

    def __post_init__(self):
        m2 = 2 * self.alg.m
        if len(self.x) != m2 + self.alg.p + self.alg.q:
            raise ValueError("wrong number of coordinates")
        for i, c in enumerate(self.x):
            want = 0 if i < m2 else 1
            if c.coeffs and c.parity() != want:
                raise ValueError(f"coordinate {i} must have parity {want}")
        if self.t.coeffs and self.t.parity() != 0:
            raise ValueError("central coordinate must be even")

    @classmethod
    def identity(cls, alg, n):
        zero = GrassmannElement({}, n)
        return cls(alg, [zero] * (2 * alg.m + alg.p + alg.q), zero)

    def allclose(self, other, tol=1e-12):
        return (all(a.allclose(b, tol) for a, b in zip(self.x, other.x))
                and self.t.allclose(other.t, tol))


def group_mul(g, h):
    if g.alg is not h.alg and (g.alg.m, g.alg.p, g.alg.q) != (h.alg.m, h.alg.p, h.alg.q):
        raise ValueError("elements of different groups")
    x = [a + b for a, b in zip(g.x, h.x)]
    return HeisElement(g.alg, x, g.t + h.t + 0.5 * g.alg.omega(g.x, h.x))


def group_inv(g):
    return HeisElement(g.alg, [-a for a in g.x], -g.t)


def adjoint(g, X):
    """``Ad_g`` on an algebra point ``X`` given in the full basis (with ``Z``)."""
    alg = g.alg
    out = list(X)
    E = [X[i] for i in range(alg.dim) if i != alg.z]
    out[alg.z] = X[alg.z] + alg.omega(g.x, E)
    return out


def coadjoint(g, X, a):
    """``Ad*_g`` on the dual point ``flat(X + aZ)``; returns ``(X', a')``."""
    return [xi - a * gi for xi, gi in zip(X, g.x)], a


def split_factorization(g):
    """``g = g0 exp(X)`` with ``g0`` even and ``X`` the odd coordinates."""
    alg = g.alg
    m2 = 2 * alg.m
    n = g.t.n
    zero = GrassmannElement({}, n)
    g0 = HeisElement(alg, g.x[:m2] + [zero] * (alg.p + alg.q), g.t)
    X = [zero] * m2 + g.x[m2:]
    return g0, X


def join_factorization(g0, X):
    alg = g0.alg
    return group_mul(g0, HeisElement(alg, list(X), GrassmannElement({}, g0.t.n)))


# graded BCH ---------------------------------------------------------------

def _word_mul(a, b, order):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            if len(w) <= order:
                out[w] = out.get(w, 0) + ca * cb
    return {w: c for w, c in out.items() if c != 0}


def _word_add(a, b, s=1):
    out = dict(a)
    for w, c in b.items():
        out[w] = out.get(w, 0) + s * c
    return {w: c for w, c in out.items() if c != 0}


def _word_exp(a, order):
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for k in range(1, order + 1):
        power = _word_mul(power, a, order)
        out = _word_add(out, {w: c / factorial(k) for w, c in power.items()})
    return out


def _word_log(a, order):
    """log(1 + u) for a series ``a`` with constant term 1."""
    u = _word_add(a, {(): Fraction(1)}, -1)
    out = {}
    power = {(): Fraction(1)}
    for k in range(1, order + 1):
        power = _word_mul(power, u, order)
        out = _word_add(out, {w: c * Fraction((-1) ** (k + 1), k) for w, c in power.items()})
    return out


def _homogeneous(a, n):
    return {w: c for w, c in a.items() if len(w) == n}


def bch_split_series(order=5):
    """Free-algebra components of the graded split.

    Returns ``(B0, B1)`` as dicts ``word -> Fraction`` over letters 0 (X) and
    1 (Y): ``exp(X) exp(Y) = exp(B0) exp(B1)`` with ``B0`` of even and ``B1``
    of odd total degree.
    """
    if order > 7:
        raise ValueError("order above 7 is not supported")
    X = {(0,): Fraction(1)}
    Y = {(1,): Fraction(1)}
    target = _word_mul(_word_exp(X, order), _word_exp(Y, order), order)
    B0, B1 = {}, {}
    for n in range(1, order + 1):
        current = _word_mul(_word_exp(B0, order), _word_exp(B1, order), order)
        missing = _homogeneous(_word_add(target, current, -1), n)
        # at degree n the correction enters linearly
        if n % 2:
            B1 = _word_add(B1, missing)
        else:
            B0 = _word_add(B0, missing)
    return B0, B1


def lie_coefficients(series):
    """Right-nested bracket coefficients via the Dynkin-Specht-Wever map."""
    out = {}
    for w, c in series.items():
        key = w
        out[key] = out.get(key, 0) + c / len(w)
    return {w: c for w, c in out.items() if c != 0}


def _nested(alg, letters, word):
    acc = letters[word[-1]]
    for l in reversed(word[:-1]):
        acc = alg.bracket(letters[l], acc)
    return acc


def in_odd_part(alg, X):
    """Is ``X`` in A_1 (x) g_1, i.e. odd coefficients on odd basis vectors only?"""
    for i, c in enumerate(X):
        if not c.coeffs:
            continue
        if alg.parity(i) == 0 or c.parity() != 1:
            return False
    return True


def bch_graded(alg, X, Y, order=5):
    """``(BCH0, BCH1)`` with ``exp(X) exp(Y) = exp(BCH0) exp(BCH1)``."""
    if not (in_odd_part(alg, X) and in_odd_part(alg, Y)):
        raise ValueError("arguments must have odd coefficients on odd basis vectors")
    B0, B1 = bch_split_series(order)
    n = _common_n(X, Y)
    letters = {0: X, 1: Y}
    res = []
    for series in (B0, B1):
        acc = [GrassmannElement({}, n) for _ in range(alg.dim)]
        for w, c in lie_coefficients(series).items():
            term = _nested(alg, letters, w)
            acc = [a + float(c) * t for a, t in zip(acc, term)]
        res.append(acc)
    return tuple(res)


def bch1_order3():
    """Coefficients of ``[X,[X,Y]]`` and ``[[X,Y],Y]`` in the cubic term of BCH1."""
    _, B1 = bch_split_series(3)
    cubic = _homogeneous(B1, 3)
    # [X,[X,Y]] = XXY - 2XYX + YXX ; [[X,Y],Y] = XYY - 2YXY + YYX
    a = cubic.get((0, 0, 1), 0)
    b = cubic.get((0, 1, 1), 0)
    rebuilt = {(0, 0, 1): a, (0, 1, 0): -2 * a, (1, 0, 0): a,
               (0, 1, 1): b, (1, 0, 1): -2 * b, (1, 1, 0): b}
    if _word_add(cubic, rebuilt, -1):
        raise ArithmeticError("cubic term is not in the expected span")
    return a, b
