"""Orthosymplectic superalgebra and the infinitesimal metaplectic representation.

Quadratic elements of the enveloping algebra act on the degree one part
``BE = span(c_i, e_alpha)`` by ``A W = [A, W]`` (with ``Z = 1``).  That action
gives each basis element ``m_ij, s_ab, t_ia`` a matrix, and the structure
constants are read off from supercommutators of those matrices.

Operators on the Schrodinger space are kept exact: a :class:`WeylOp` is a
normal ordered polynomial ``sum x^a d^b (x) M_ab`` in the even variables with
matrix coefficients on the odd sector.
"""

from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial

import numpy as np
from scipy.linalg import expm

from .gaussfun import GaussPolyPhase
from .heisen import HeisAlg, LieSuper
from .hilbertsuper import GradedOperator, superadjoint_matrix


class SpoAlg:
    """``spo(E, omega)`` in the basis ``m_ij (i <= j), s_ab (a < b), t_ia``.

    Even basis vectors come first, so the structure constants fit
    :class:`~heisensuper.heisen.LieSuper`.
    """

    def __init__(self, m, p, q):
        self.heis = HeisAlg(m, p, q)
        self.m, self.p, self.q = m, p, q
        m2, n = 2 * m, p + q
        self.n_even, self.n_odd = m2, n
        W = np.zeros((m2 + n, m2 + n))
        W[:m2, :m2] = self.heis.omega_even
        W[m2:, m2:] = self.heis.omega_odd
        self.omega = W                                  # [X, Y] = omega(X, Y) Z
        self.grading = np.array([0] * m2 + [1] * n)
        self.basis = ([("m", i, j) for i, j in combinations_with_replacement(range(m2), 2)]
                      + [("s", a, b) for a, b in combinations(range(n), 2)]
                      + [("t", i, a) for i in range(m2) for a in range(n)])
        self.labels = [f"{k}_{i + 1}{j + 1}" for k, i, j in self.basis]
        self.dim0 = sum(1 for k, _, _ in self.basis if k != "t")
        self.mats = [self._ad(*b) for b in self.basis]
        self.lie, self.closure_residual = self._structure()

    @property
    def dim(self):
        return len(self.basis)

    def parity(self, k):
        return 1 if self.basis[k][0] == "t" else 0

    def index(self, kind, i, j):
        """``(kind, i, j)`` to a basis index; ``s_ba = -s_ab`` is not a basis element."""
        key = (kind, min(i, j), max(i, j)) if kind == "m" else (kind, i, j)
        try:
            return self.basis.index(key)
        except ValueError:
            raise ValueError(f"{kind}_{i + 1}{j + 1} is not a basis element") from None

    def word(self, k):
        """Basis element ``k`` as ``[(coef, X, Y)]`` meaning ``sum coef X Y`` in the enveloping algebra."""
        kind, i, j = self.basis[k]
        if kind == "m":
            return [(1, i, j), (1, j, i)]
        if kind == "s":
            a, b = self.n_even + i, self.n_even + j
            return [(1, a, b), (-1, b, a)]
        return [(1, i, self.n_even + j), (1, self.n_even + j, i)]

    def _ad(self, kind, i, j):
        W, g = self.omega, self.grading
        A = np.zeros_like(W)
        for c, X, Y in self.word(self.index(kind, i, j)):
            # [XY, V] = X [Y, V] + (-1)^{|Y||V|} [X, V] Y
            for V in range(len(g)):
                A[X, V] += c * W[Y, V]
                A[Y, V] += c * (-1) ** (g[Y] * g[V]) * W[X, V]
        return A

    def supercommutator(self, A, B, pa, pb):
        return A @ B - (-1) ** (pa * pb) * B @ A

    def _structure(self):
        flat = np.array([M.ravel() for M in self.mats]).T
        br, worst = {}, 0.0
        for k, l in combinations_with_replacement(range(self.dim), 2):
            C = self.supercommutator(self.mats[k], self.mats[l], self.parity(k), self.parity(l))
            if not C.any():
                continue
            c, *_ = np.linalg.lstsq(flat, C.ravel(), rcond=None)
            c = np.where(np.abs(c) < 1e-12, 0.0, c)
            worst = max(worst, float(np.abs(flat @ c - C.ravel()).max()))
            br[(k, l)] = {r: float(v) for r, v in enumerate(c) if v}
        return LieSuper(self.dim0, self.dim - self.dim0, br, self.labels), worst

    def act(self, k, vec):
        """``A_k X`` for ``X = sum vec_i b_i`` in ``BE``."""
        return self.mats[k] @ np.asarray(vec)

    def spo_residual(self):
        """``omega(AX, Y) + (-1)^{|A||X|} omega(X, AY)`` over basis ``A, X, Y``."""
        W, g = self.omega, self.grading
        worst = 0.0
        for k, A in enumerate(self.mats):
            pa = self.parity(k)
            for X, Y in product(range(len(g)), repeat=2):
                v = A[:, X] @ W[:, Y] + (-1) ** (pa * g[X]) * (W[X, :] @ A[:, Y])
                worst = max(worst, abs(v))
        return float(worst)


class WeylOp:
    """``sum_(a, b) x^a d^b (x) M_ab`` acting on ``L^2(R^m) (x) H_odd``."""

    def __init__(self, m, grading, terms=None):
        self.m = m
        self.grading = np.asarray(grading)
        self.terms = {}
        for key, M in (terms or {}).items():
            self._acc(key, M)

    def _acc(self, key, M):
        M = np.asarray(M, dtype=complex)
        acc = self.terms.get(key)
        self.terms[key] = M.copy() if acc is None else acc + M

    @property
    def d(self):
        return len(self.grading)

    @classmethod
    def matrix(cls, m, grading, M):
        z = (0,) * m
        return cls(m, grading, {(z, z): M})

    @classmethod
    def scalar(cls, m, grading, c):
        return cls.matrix(m, grading, c * np.eye(len(grading)))

    @classmethod
    def x(cls, m, grading, i, c=1.0):
        a = tuple(int(k == i) for k in range(m))
        return cls(m, grading, {(a, (0,) * m): c * np.eye(len(grading))})

    @classmethod
    def d_(cls, m, grading, i, c=1.0):
        b = tuple(int(k == i) for k in range(m))
        return cls(m, grading, {((0,) * m, b): c * np.eye(len(grading))})

    def _like(self, terms):
        return WeylOp(self.m, self.grading, terms)

    def __add__(self, other):
        out = self._like(self.terms)
        for k, M in other.terms.items():
            out._acc(k, M)
        return out

    def __neg__(self):
        return self._like({k: -M for k, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self._like({k: c * M for k, M in self.terms.items()})

    def __matmul__(self, other):
        out = self._like({})
        for (a, b), M in self.terms.items():
            for (c, d), N in other.terms.items():
                MN = M @ N
                if not MN.any():
                    continue
                # d^b x^c = sum_k prod_i C(b_i, k_i) c_i!/(c_i-k_i)! x^{c-k} d^{b-k}
                for ks in product(*(range(min(bi, ci) + 1) for bi, ci in zip(b, c))):
                    w = 1
                    for bi, ci, ki in zip(b, c, ks):
                        w *= comb(bi, ki) * factorial(ci) // factorial(ci - ki)
                    xa = tuple(ai + ci - ki for ai, ci, ki in zip(a, c, ks))
                    db = tuple(bi - ki + di for bi, di, ki in zip(b, d, ks))
                    out._acc((xa, db), w * MN)
        return out

    def parity(self, tol=1e-13):
        """Degree of the operator, or ``None`` when inhomogeneous."""
        g = self.grading
        found = set()
        for M in self.terms.values():
            for deg in (0, 1):
                mask = ((g[:, None] + g[None, :]) % 2) == deg
                if np.abs(np.where(mask, M, 0)).max(initial=0) > tol:
                    found.add(deg)
        if len(found) > 1:
            return None
        return found.pop() if found else 0

    def supercommutator(self, other):
        pa, pb = self.parity(), other.parity()
        if pa is None or pb is None:
            raise ValueError("supercommutator needs homogeneous operators")
        return self @ other - (-1) ** (pa * pb) * (other @ self)

    def norm(self):
        return max((float(np.abs(M).max()) for M in self.terms.values()), default=0.0)

    def order(self):
        """Differential order in ``d``."""
        return max((sum(b) for (_, b), M in self.terms.items() if np.abs(M).max() > 0), default=0)

    def superadjoint(self, space):
        """``(x^a d^b (x) M)^dagger = (-d)^b x^a (x) M^dagger`` on the standard ``L^2`` factor."""
        out = self._like({})
        z = (0,) * self.m
        g = space.grading
        for (a, b), M in self.terms.items():
            Md = np.zeros_like(M)
            for deg in (0, 1):
                mask = ((g[:, None] + g[None, :]) % 2) == deg
                Md = Md + superadjoint_matrix(np.where(mask, M, 0), deg, space, space)
            left = WeylOp(self.m, self.grading, {(z, b): (-1) ** sum(b) * np.eye(self.d)})
            right = WeylOp(self.m, self.grading, {(a, z): Md})
            out = out + left @ right
        return out

    def apply(self, state):
        """Act on ``{basis index: GaussPolyPhase}``."""
        out = {}
        for (a, b), M in self.terms.items():
            for j, f in state.items():
                g = f
                for i, k in enumerate(b):
                    for _ in range(k):
                        g = g.deriv(i)
                for i, k in enumerate(a):
                    for _ in range(k):
                        g = g.mulcoord(i)
                for i in np.flatnonzero(np.abs(M[:, j]) > 0):
                    out[i] = out[i] + M[i, j] * g if i in out else M[i, j] * g
        return out


# Schrodinger generators ------------------------------------------------------------

def U_star(rep, k):
    """``U_*`` of the ``k``-th vector of ``BE = (c_1..c_2m, e_1..e_n)`` as a :class:`WeylOp`.

    ``U(q, p, t) f = exp(i hbar (t + q.p/2)) exp(-i hbar p.x) f(x - q)`` gives
    ``U_*(c_i) = -d_i`` and ``U_*(c_{m+i}) = -i hbar x_i``.
    """
    m, g = rep.m, rep.space.grading
    if k < m:
        return WeylOp.d_(m, g, k, -1.0)
    if k < 2 * m:
        return WeylOp.x(m, g, k - m, -1j * rep.hbar)
    return WeylOp.matrix(m, g, rep.odd_gens[k - 2 * m])


def U_star_vec(rep, vec):
    out = WeylOp(rep.m, rep.space.grading)
    for k, c in enumerate(vec):
        if c:
            out = out + c * U_star(rep, k)
    return out


def _check(alg, rep):
    if (alg.m, alg.p, alg.q) != (rep.m, rep.p, rep.q):
        raise ValueError("algebra and representation have different dimensions")


def mu_star(alg, rep, k, route="display"):
    """``mu_*`` of basis element ``k``.

    ``route="display"`` uses ``-(2i/hbar) U_*(X) U_*(Y) - omega(X, Y)``;
    ``route="definition"`` uses ``(1/(i hbar)) U_*(A)`` on the symmetrised word.
    """
    _check(alg, rep)
    if not 0 <= k < alg.dim:
        raise ValueError("basis element outside spo")
    h = rep.hbar
    if route == "definition":
        out = WeylOp(rep.m, rep.space.grading)
        for c, X, Y in alg.word(k):
            out = out + (c / (1j * h)) * (U_star(rep, X) @ U_star(rep, Y))
        return out
    _, X, Y = alg.word(k)[0]
    prod_ = U_star(rep, X) @ U_star(rep, Y)
    return (-2j / h) * prod_ - WeylOp.scalar(rep.m, rep.space.grading, alg.omega[X, Y])


def mu_star_vec(alg, rep, coeffs):
    out = WeylOp(rep.m, rep.space.grading)
    for k, c in enumerate(coeffs):
        if c:
            out = out + c * mu_star(alg, rep, k)
    return out


def display_residual(alg, rep):
    """Distance between the two expressions of ``mu_*`` over the basis."""
    return max(((mu_star(alg, rep, k) - mu_star(alg, rep, k, "definition")).norm()
                for k in range(alg.dim)), default=0.0)


def mu_star_morphism_check(alg, rep):
    """``max |[mu(X), mu(Y)] - mu([X, Y])|`` over basis pairs."""
    mus = [mu_star(alg, rep, k) for k in range(alg.dim)]
    worst = 0.0
    for k, l in combinations_with_replacement(range(alg.dim), 2):
        rhs = WeylOp(rep.m, rep.space.grading)
        for r, c in alg.lie.bracket_basis(k, l).items():
            rhs = rhs + c * mus[r]
        worst = max(worst, (mus[k].supercommutator(mus[l]) - rhs).norm())
    return worst


def skew_check(alg, rep):
    """``max |mu(X)^dagger + mu(X)|`` over the basis."""
    return max(((mu_star(alg, rep, k).superadjoint(rep.space) + mu_star(alg, rep, k)).norm()
                for k in range(alg.dim)), default=0.0)


def equivariance_check(alg, rep):
    """``max |[mu(A), U_*(X)] - U_*(A X)|`` over basis ``A`` of spo and ``X`` of ``BE``."""
    _check(alg, rep)
    worst = 0.0
    nb = len(alg.grading)
    for k in range(alg.dim):
        mu = mu_star(alg, rep, k)
        for X in range(nb):
            e = np.zeros(nb)
            e[X] = 1.0
            lhs = mu.supercommutator(U_star(rep, X))
            worst = max(worst, (lhs - U_star_vec(rep, alg.act(k, e))).norm())
    return worst


def preserves_gaussians(op, state):
    """Apply ``op`` to a state of Gaussians; closure of the class makes this total."""
    out = op.apply(state)
    return all(isinstance(f, GaussPolyPhase) for f in out.values()), out


def spin_exponential(alg, rep, coeffs, t, tol=1e-10):
    """``exp(t mu_*(X))`` for ``X`` in the span of the ``s_ab``.

    Raises unless it conjugates ``U_*(e_a)`` into ``U_*(exp(t X) e_a)``.
    """
    _check(alg, rep)
    coeffs = np.asarray(coeffs, dtype=float)
    if any(c and alg.basis[k][0] != "s" for k, c in enumerate(coeffs)):
        raise ValueError("spin_exponential needs X in the span of the s_ab")
    mu = mu_star_vec(alg, rep, coeffs)
    z = ((0,) * rep.m, (0,) * rep.m)
    if set(mu.terms) - {z}:
        raise ValueError("mu_*(X) is not a finite matrix")
    S = expm(t * mu.terms.get(z, np.zeros((mu.d, mu.d))))
    res = spin_conjugation_residual(alg, rep, coeffs, t, S)
    if res > tol:
        raise RuntimeError(f"spin exponential fails to cover the rotation: {res:.3g}")
    return GradedOperator(S, 0, rep.space, rep.space)


def rotation(alg, coeffs, t):
    """``exp(t X)`` on ``BE``."""
    A = sum(c * M for c, M in zip(coeffs, alg.mats))
    return expm(t * np.asarray(A, dtype=float))


def spin_conjugation_residual(alg, rep, coeffs, t, S):
    """``max |S U_*(e_a) S^-1 - U_*(R e_a)|``, relative to the size of the rotated generators.

    Boosts in non-compact directions grow like ``e^|t|``, so absolute errors scale with them.
    """
    R = rotation(alg, coeffs, t)
    Sinv = np.linalg.inv(S)
    m2 = alg.n_even
    worst = 0.0
    for a in range(alg.n_odd):
        lhs = S @ rep.odd_gens[a] @ Sinv
        rhs = sum(R[m2 + b, m2 + a] * rep.odd_gens[b] for b in range(alg.n_odd))
        scale = max(1.0, float(np.abs(rhs).max()))
        worst = max(worst, float(np.abs(lhs - rhs).max()) / scale)
    return worst


def is_compact(alg, k):
    """``s_ab`` generates a compact rotation when ``e_a, e_b`` have the same sign."""
    kind, a, b = alg.basis[k]
    w = alg.heis.omega_odd
    return kind == "s" and w[a, a] * w[b, b] > 0


def clifford_table(alg, rep):
    """``mu_*(s_ab)`` matrices and residuals, for reporting."""
    z = ((0,) * rep.m, (0,) * rep.m)
    mats = {}
    for k, (kind, a, b) in enumerate(alg.basis):
        if kind == "s":
            mats[alg.labels[k]] = mu_star(alg, rep, k).terms.get(z)
    return {
        "matrices": mats,
        "morphism": mu_star_morphism_check(alg, rep),
        "equivariance": equivariance_check(alg, rep),
        "skew": skew_check(alg, rep),
        "jacobi": alg.lie.jacobi_residual(),
    }
