"""Schrodinger representations of Heisenberg supergroups.

The odd sector is computed symbolically: states are polynomials in the odd
state variables ``q0`` (real) and ``zeta0`` (holomorphic), the group acts by
substitution times a nilpotent phase, and everything lives in one
Grassmann algebra whose low generators are the odd group coordinates.
Splitting monomials into a coordinate part and a state part gives the
expansion ``U(x) = sum_gamma x^gamma U_gamma``.  The gram matrix comes from
the same algebra through Berezin integration.

The even sector is the classical Schrodinger representation on
``L^2(R^m)`` and factors out as a tensor product; see ``wigner`` for the
Gaussian calculus that handles it.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .grassmann import (DEFAULT_N, BudgetError, GrassmannElement, GrassmannMatrix,
                        bits, dmul, degree, gr_body, gr_conj, gr_exp, merge_sign)
from .heisen import HeisAlg
from .hilbertsuper import (HilbertSuper, fundamental_decomposition, operator_degree,
                           superadjoint_matrix)


@dataclass(frozen=True)
class Layout:
    """Generator bookkeeping for one odd normal form.

    External generators (group coordinates) come first in the order
    ``q_1..q_r, p_1..p_r, zeta_1, zbar_1, ..., zeta_s, zbar_s, tau``; then
    the state variables ``q0_1..q0_r, zeta0_1..zeta0_s, tau0``; then the
    conjugates ``zbar0`` used only inside integrals.
    """

    r: int
    s: int
    tau: str | None = None   # None, "real" or "complex"

    @property
    def n_ext(self):
        return 2 * self.r + 2 * self.s + (self.tau is not None)

    @property
    def n_state(self):
        return self.r + self.s + (self.tau is not None)

    @property
    def n_hol(self):
        return self.s + (self.tau == "complex")

    @property
    def n_total(self):
        return self.n_ext + self.n_state + self.n_hol

    def q(self, i):
        return i

    def p(self, i):
        return self.r + i

    def zeta(self, a):
        return 2 * self.r + 2 * a

    def zbar(self, a):
        return 2 * self.r + 2 * a + 1

    @property
    def tau_ext(self):
        return 2 * self.r + 2 * self.s

    def q0(self, i):
        return self.n_ext + i

    def zeta0(self, a):
        """Holomorphic state variable ``a``; a complex tau0 is the last one."""
        if a < self.s:
            return self.n_ext + self.r + a
        return self.tau0

    @property
    def tau0(self):
        return self.n_ext + self.r + self.s

    def zbar0(self, a):
        return self.n_ext + self.n_state + a

    def swap(self):
        """Generator involution realising complex conjugation."""
        perm = list(range(self.n_total))
        for a in range(self.s):
            perm[self.zeta(a)], perm[self.zbar(a)] = self.zbar(a), self.zeta(a)
        for a in range(self.n_hol):
            perm[self.zeta0(a)], perm[self.zbar0(a)] = self.zbar0(a), self.zeta0(a)
        return perm

    def measure_order(self):
        """Left derivatives for the state integral, first applied first."""
        order = []
        for a in range(self.n_hol):
            order += [self.zbar0(a), self.zeta0(a)]
        order += [self.q0(i) for i in range(self.r)]
        if self.tau == "real":
            order.append(self.tau0)
        return order

    def directions(self):
        """Real odd coordinate directions as ``(label, {ext generator: coefficient})``."""
        out = [(f"q{i + 1}", {self.q(i): 1.0}) for i in range(self.r)]
        out += [(f"p{i + 1}", {self.p(i): 1.0}) for i in range(self.r)]
        out += [(f"xi{a + 1}", {self.zeta(a): 1.0, self.zbar(a): 1.0}) for a in range(self.s)]
        out += [(f"xi{a + 1 + self.s}", {self.zeta(a): 1j, self.zbar(a): -1j})
                for a in range(self.s)]
        if self.tau is not None:
            out.append(("tau", {self.tau_ext: 1.0}))
        return out

    def coordinate_form(self, eps):
        """Gram of the coordinate symplectic form on the real directions.

        For odd coordinates ``x = theta X`` and ``x' = theta' Y`` the group
        law uses ``omega(x, x') = theta theta' W[X, Y]``.
        """
        d = 2 * self.r + 2 * self.s + (self.tau is not None)
        W = np.zeros((d, d))
        for i in range(self.r):
            W[i, self.r + i] = W[self.r + i, i] = 1.0
        for k in range(2 * self.s):
            W[2 * self.r + k, 2 * self.r + k] = eps
        if self.tau is not None:
            W[-1, -1] = eps
        return W


def _gen(i, n):
    return GrassmannElement({1 << i: 1.0}, n)


def _phase_exponent(lay, eps, hbar):
    n = lay.n_total
    E = GrassmannElement({}, n)
    for i in range(lay.r):
        E = E + (0.5 * _gen(lay.q(i), n) - _gen(lay.q0(i), n)) * _gen(lay.p(i), n)
    for a in range(lay.s):
        E = E + (eps / 2) * ((0.5 * _gen(lay.zeta(a), n) - _gen(lay.zeta0(a), n))
                             * _gen(lay.zbar(a), n))
    if lay.tau is not None:
        E = E + (eps / 2) * (_gen(lay.tau_ext, n) * _gen(lay.tau0, n))
    return 1j * hbar * E


def _translation(lay):
    n = lay.n_total
    images = {lay.q0(i): _gen(lay.q0(i), n) - _gen(lay.q(i), n) for i in range(lay.r)}
    for a in range(lay.s):
        images[lay.zeta0(a)] = _gen(lay.zeta0(a), n) - _gen(lay.zeta(a), n)
    if lay.tau is not None:
        images[lay.tau0] = _gen(lay.tau0, n) - _gen(lay.tau_ext, n)
    return images


def state_monomial(lay, beta):
    """Basis state for the state-variable mask ``beta`` inside the big algebra."""
    return GrassmannElement({beta << lay.n_ext: 1.0}, lay.n_total)


def act_symbolic(lay, eps, hbar, phi):
    """``U(x) phi`` at the generic odd point ``x`` (``t = 0``), symbolically."""
    if lay.n_total > 62:
        raise BudgetError("normal form needs too many generators")
    phase = gr_exp(_phase_exponent(lay, eps, hbar))
    return phase * phi.substitute(_translation(lay))


def weight(lay, eps, hbar):
    n = lay.n_total
    w = GrassmannElement({}, n)
    for a in range(lay.n_hol):
        w = w + _gen(lay.zeta0(a), n) * _gen(lay.zbar0(a), n)
    return gr_exp((0.5j * hbar * eps) * w)


def inner_symbolic(lay, eps, hbar, phi, psi):
    """Grassmann-valued inner product by Berezin integration over state variables.

    Coordinates appearing in ``phi`` or ``psi`` stay as scalars, with the
    sign rule of the bilinear extension produced by the left derivatives.
    """
    integrand = gr_conj(phi, lay.swap()) * psi * weight(lay, eps, hbar)
    d = integrand.coeffs
    from .grassmann import dderiv
    for i in lay.measure_order():
        d = dderiv(d, i)
    return GrassmannElement(d, lay.n_total) * ((2j) ** lay.n_hol)


def _restrict_ext(el, lay):
    """Drop the state and conjugate generators from a coefficient-only element."""
    top = (1 << lay.n_ext) - 1
    if any(m & ~top for m in el.coeffs):
        raise ValueError("element still depends on state variables")
    return GrassmannElement(el.coeffs, lay.n_ext)


def state_grading(lay):
    return np.array([degree(b) % 2 for b in range(1 << lay.n_state)])


def gram_from_berezin(lay, eps, hbar):
    d = 1 << lay.n_state
    G = np.zeros((d, d), complex)
    states = [state_monomial(lay, b) for b in range(d)]
    for a in range(d):
        for b in range(d):
            G[a, b] = inner_symbolic(lay, eps, hbar, states[a], states[b])[0]
    return G


def expansion_from_formula(lay, eps, hbar):
    """Components ``U_gamma`` of ``U(x) = sum_gamma x^gamma U_gamma``."""
    d = 1 << lay.n_state
    ext = (1 << lay.n_ext) - 1
    comps = {}
    for beta in range(d):
        img = act_symbolic(lay, eps, hbar, state_monomial(lay, beta))
        for mask, c in img.coeffs.items():
            gamma = mask & ext
            out = mask >> lay.n_ext
            if gamma not in comps:
                comps[gamma] = np.zeros((d, d), complex)
            comps[gamma][out, beta] += c
    return GrassmannMatrix(comps, state_grading(lay), lay.n_ext)


def space_parity(lay):
    return (lay.r + (lay.tau == "real")) % 2


# normal forms ----------------------------------------------------------------

def parity_extension(p, q, sigma):
    """The even signature whose Schrodinger representation restricts to ``(p, q)``.

    Parity 0 takes ``(p, q+1)`` when ``max(p, q+1)`` is even and ``(p+1, q)``
    otherwise; parity 1 takes the other one.
    """
    if (p + q) % 2 == 0:
        raise ValueError("parity extension only applies to p + q odd")
    zero = (p, q + 1) if max(p, q + 1) % 2 == 0 else (p + 1, q)
    if sigma % 2 == 0:
        return zero
    return (p + 1, q) if zero == (p, q + 1) else (p, q + 1)


def formula_eps(p, q):
    """Sign ``eps`` in the phase that realizes ``omega = diag(+1^p, -1^q)``."""
    return 1 if q >= p else -1


def layout_for(p, q, sigma=None):
    """``(eps, Layout)`` for signature ``(p, q)`` and (odd case) parity ``sigma``."""
    eps = formula_eps(p, q)
    r = min(p, q)
    if (p + q) % 2 == 0:
        if sigma is not None:
            raise ValueError("parity is fixed when p + q is even")
        return eps, Layout(r, abs(p - q) // 2)
    if sigma is None:
        raise ValueError("p + q odd needs a parity sigma")
    ext = parity_extension(p, q, sigma)
    majority = ext == ((p + 1, q) if p > q else (p, q + 1))
    lay = Layout(r, (abs(p - q) - 1) // 2, "complex" if majority else "real")
    if space_parity(lay) != sigma % 2:
        raise ArithmeticError("parity table and layout disagree")
    return eps, lay


def orthonormal_basis(lay, eps):
    """Real directions combined into ``e_alpha`` with ``[e_a, e_b] = +-delta_ab Z``.

    Returns ``(M, signs)``: column ``alpha`` of ``M`` gives ``e_alpha`` in the
    direction basis of ``lay.directions()``, positives first.
    """
    dirs = lay.directions()
    nd = len(dirs)
    pos, neg = [], []
    h = 1 / np.sqrt(2)
    for i in range(lay.r):
        v = np.zeros(nd)
        v[i], v[lay.r + i] = h, -h
        pos.append(v)
        w = np.zeros(nd)
        w[i], w[lay.r + i] = h, h
        neg.append(w)
    # pair Re/Im of each zeta so tensor factors stay contiguous
    vdirs = [2 * lay.r + k for a in range(lay.s) for k in (a, a + lay.s)]
    if lay.tau is not None:
        vdirs.append(nd - 1)
    for k in vdirs:
        v = np.zeros(nd)
        v[k] = 1.0
        (pos if eps < 0 else neg).append(v)
    cols = pos + neg
    M = np.array(cols).T if cols else np.zeros((nd, 0))
    return M, [1] * len(pos) + [-1] * len(neg)


# representations -------------------------------------------------------------

@dataclass
class RepData:
    """Finite-dimensional odd-sector data of a representation.

    ``odd_gens[alpha]`` is the matrix of ``pi_*(e_alpha)``; the centre acts by
    ``i hbar``.  ``even_ops`` optionally holds further operators (a finite
    generating family of the body action) that intertwiners must respect.
    """

    space: HilbertSuper
    odd_gens: list
    hbar: float
    omega: np.ndarray = None
    even_ops: list = field(default_factory=list)

    def U0(self, t):
        return np.exp(1j * self.hbar * t) * np.eye(self.space.dim)


@dataclass
class SchrodRep:
    m: int
    p: int
    q: int
    hbar: float
    sigma: int
    eps: int
    layout: Layout
    alg: HeisAlg
    space: HilbertSuper
    expansion: GrassmannMatrix
    basis: np.ndarray

    @property
    def r(self):
        return self.layout.r

    @property
    def s(self):
        return self.layout.s

    def direction_gens(self):
        """``A_k``: coefficient of ``theta`` in ``U(theta f_k)``."""
        d = self.space.dim
        out = []
        for _, coefs in self.layout.directions():
            a = np.zeros((d, d), complex)
            for g, c in coefs.items():
                a = a + c * self.expansion.comps.get(1 << g, 0)
            out.append(a)
        return out

    @property
    def odd_gens(self):
        A = self.direction_gens()
        return [sum(self.basis[k, a] * A[k] for k in range(len(A)))
                for a in range(self.basis.shape[1])]

    def ext_images(self, y):
        """Normal-form external coordinates of the odd point ``sum y^alpha e_alpha``."""
        lay = self.layout
        n = y[0].n if y else 0
        x = [sum((self.basis[k, a] * y[a] for a in range(len(y))), GrassmannElement({}, n))
             for k in range(self.basis.shape[0])]
        img = {}
        for i in range(lay.r):
            img[lay.q(i)] = x[i]
            img[lay.p(i)] = x[lay.r + i]
        for a in range(lay.s):
            re, im = x[2 * lay.r + a], x[2 * lay.r + lay.s + a]
            img[lay.zeta(a)] = re + 1j * im
            img[lay.zbar(a)] = re - 1j * im
        if lay.tau is not None:
            img[lay.tau_ext] = x[-1]
        return img

    def U_odd(self, y, n):
        """``U(y, 0)`` for odd Grassmann coordinates ``y`` in ``n`` generators."""
        if not y:
            return GrassmannMatrix.constant(np.eye(self.space.dim), self.space.grading, n)
        return self.expansion.substitute(self.ext_images(y), n)

    def U(self, g):
        """Operator of a group element with ``m = 0``; Grassmann valued."""
        if self.m:
            raise ValueError("use the classical factor in module wigner for m > 0")
        n = g.t.n
        t0 = gr_body(g.t)
        phase = np.exp(1j * self.hbar * t0) * gr_exp(1j * self.hbar * (g.t - t0))
        return self.U_odd(list(g.x), n).lmul(phase)

    def rep_data(self):
        return RepData(self.space, self.odd_gens, self.hbar, self.alg.omega_odd)


def schrodinger_normal_form(lay, eps, hbar):
    """Space and expansion of the odd-sector formula for an explicit ``eps``."""
    G = gram_from_berezin(lay, eps, hbar)
    space = HilbertSuper(state_grading(lay), space_parity(lay), G)
    return space, expansion_from_formula(lay, eps, hbar)


def build_schrodinger(m, p, q, hbar, sigma=None):
    if hbar == 0:
        raise ValueError("hbar must be nonzero")
    if (p + q) % 2 == 0 and sigma is not None and sigma % 2 != min(p, q) % 2:
        raise ValueError("parity is fixed when p + q is even")
    eps, lay = layout_for(p, q, None if (p + q) % 2 == 0 else sigma)
    space, expn = schrodinger_normal_form(lay, eps, hbar)
    M, _ = orthonormal_basis(lay, eps)
    return SchrodRep(m, p, q, float(hbar), space.parity, eps, lay, HeisAlg(m, p, q),
                     space, expn, M)


# checks -----------------------------------------------------------------------

def _random_odd(rng, n, terms=3):
    out = GrassmannElement({}, n)
    odd = [k for k in range(1, 1 << n) if degree(k) % 2 and degree(k) <= 3]
    for k in rng.choice(odd, size=min(terms, len(odd)), replace=False):
        out = out + GrassmannElement({int(k): complex(rng.normal(), rng.normal())}, n)
    return out


def _random_even(rng, n):
    out = GrassmannElement({0: rng.normal()}, n)
    even = [k for k in range(1, 1 << n) if degree(k) % 2 == 0 and degree(k) <= 2]
    for k in rng.choice(even, size=min(2, len(even)), replace=False):
        out = out + GrassmannElement({int(k): complex(rng.normal(), rng.normal())}, n)
    return out


def random_point(alg, rng, n):
    from .heisen import HeisElement
    if alg.m:
        raise ValueError("random points are for m = 0")
    return HeisElement(alg, [_random_odd(rng, n) for _ in range(alg.p + alg.q)],
                       _random_even(rng, n))


def group_homomorphism_check(rep, trials=5, seed=0):
    """Max of ``|U(g)U(h) - U(gh)|`` over random Grassmann points."""
    from .heisen import group_mul
    rng = np.random.default_rng(seed)
    n = min(2 * (rep.p + rep.q) + 2, 12)
    worst = 0.0
    for _ in range(trials):
        g = random_point(rep.alg, rng, n)
        h = random_point(rep.alg, rng, n)
        lhs = rep.U(g) @ rep.U(h)
        worst = max(worst, (lhs - rep.U(group_mul(g, h))).norm())
    return worst


def exp_route_check(rep, trials=5, seed=0):
    """``U(y) = exp(sum y^alpha pi_*(e_alpha))`` against the closed formula."""
    rng = np.random.default_rng(seed)
    n = min(2 * (rep.p + rep.q), 12)
    gens = rep.odd_gens
    worst = 0.0
    for _ in range(trials):
        y = [_random_odd(rng, n) for _ in gens]
        X = GrassmannMatrix({}, rep.space.grading, n)
        for ya, A in zip(y, gens):
            X = X + GrassmannMatrix.constant(A, rep.space.grading, n).lmul(ya)
        E = GrassmannMatrix.constant(np.eye(rep.space.dim), rep.space.grading, n)
        term = E
        for k in range(1, n + 2):
            term = (term @ X) * (1 / k)
            if term.norm() == 0:
                break
            E = E + term
        worst = max(worst, (E - rep.U_odd(y, n)).norm())
    return worst


def _gexp(X, n):
    E = GrassmannMatrix.constant(np.eye(len(X.grading)), X.grading, n)
    term = E
    for k in range(1, n + 2):
        term = (term @ X) * (1 / k)
        if term.norm() == 0:
            break
        E = E + term
    return E


def algebra_operator(rep, u):
    """``sum u^i pi_*(b_i)`` for a Grassmann point ``u`` of the algebra, ``m = 0``."""
    if rep.m:
        raise ValueError("algebra_operator needs m = 0")
    n = u[0].n
    d = rep.space.dim
    out = GrassmannMatrix({}, rep.space.grading, n)
    for i, ui in enumerate(u):
        if not ui.coeffs:
            continue
        if i == rep.alg.z:
            A = 1j * rep.hbar * np.eye(d)
        else:
            A = rep.odd_gens[i - rep.alg.z - 1]
        out = out + GrassmannMatrix.constant(A, rep.space.grading, n).lmul(ui)
    return out


def bch_operator_check(rep, order=5, trials=3, seed=0):
    """``|exp(X) exp(Y) - exp(BCH0) exp(BCH1)|`` for random odd points ``X, Y``."""
    from .heisen import bch_graded
    rng = np.random.default_rng(seed)
    alg = rep.alg
    n = min(2 * (rep.p + rep.q), 10)
    worst = 0.0
    for _ in range(trials):
        X, Y = ([GrassmannElement({}, n) for _ in range(alg.dim)] for _ in range(2))
        for a in range(rep.p + rep.q):
            X[alg.e(a)] = _random_odd(rng, n)
            Y[alg.e(a)] = _random_odd(rng, n)
        B0, B1 = bch_graded(alg, X, Y, order)
        lhs = _gexp(algebra_operator(rep, X), n) @ _gexp(algebra_operator(rep, Y), n)
        rhs = _gexp(algebra_operator(rep, B0), n) @ _gexp(algebra_operator(rep, B1), n)
        worst = max(worst, (lhs - rhs).norm())
    return worst


def skew_check(rep):
    """Max of ``|pi_*(e)^dagger + pi_*(e)|`` over the odd generators."""
    return max((np.abs(superadjoint_matrix(A, 1, rep.space, rep.space) + A).max()
                for A in rep.odd_gens), default=0.0)


def clifford_structure(rep, tol=1e-9):
    """``(relations residual, span rank, surjective)`` of the Clifford action."""
    k = rep.p + rep.q
    if k % 2:
        raise ValueError("Clifford structure needs p + q even")
    if rep.m:
        raise ValueError("Clifford structure is checked on the odd sector, m = 0")
    A = rep.odd_gens
    w = rep.alg.omega_odd
    d = rep.space.dim
    I = np.eye(d)
    res = 0.0
    for a in range(k):
        for b in range(k):
            anti = A[a] @ A[b] + A[b] @ A[a]
            res = max(res, np.abs(anti - 1j * rep.hbar * w[a, b] * I).max())
    prods = []
    for mask in range(1 << k):
        P = I.astype(complex)
        for a in bits(mask):
            P = P @ A[a]
        prods.append(P.ravel())
    rank = np.linalg.matrix_rank(np.array(prods), tol=tol * abs(rep.hbar) ** (k / 2))
    return res, rank, rank == d * d


def intertwiner_space(rep1, rep2, degree, tol=1e-10):
    """Basis of degree-``degree`` maps ``T`` with ``T pi1(e) = (-1)^degree pi2(e) T``."""
    from scipy.linalg import null_space
    h1, h2 = rep1.space, rep2.space
    if rep1.hbar != rep2.hbar:
        return []
    d1, d2 = h1.dim, h2.dim
    allowed = ((h2.grading[:, None] + h1.grading[None, :]) % 2 == degree % 2).ravel()
    idx = np.flatnonzero(allowed)
    rows = []
    sign = -1.0 if degree % 2 else 1.0
    I1, I2 = np.eye(d1), np.eye(d2)
    ops = list(zip(rep1.odd_gens, rep2.odd_gens))
    if len(rep1.odd_gens) != len(rep2.odd_gens):
        return []
    for A1, A2 in ops:
        # vec(T A1) - sign vec(A2 T), row-major vec
        rows.append(np.kron(I2, A1.T) - sign * np.kron(A2, I1))
    for B1, B2 in zip(rep1.even_ops, rep2.even_ops):
        rows.append(np.kron(I2, B1.T) - np.kron(B2, I1))
    if not rows:
        K = np.eye(len(idx))
    else:
        S = np.vstack(rows)[:, idx]
        K = null_space(S, rcond=tol)
    out = []
    for col in K.T:
        T = np.zeros(d2 * d1, complex)
        T[idx] = col
        T = T.reshape(d2, d1)
        k = np.flatnonzero(np.abs(T.ravel()) > tol)[0]
        out.append(T / T.ravel()[k])
    return out


def tensor_rep(repA, repB):
    """Odd-sector tensor product, generators reordered to ``diag(+1^p, -1^q)``."""
    from .hilbertsuper import tensor, tensor_operator
    if repA.hbar != repB.hbar:
        raise ValueError("tensor product needs equal hbar")
    h = tensor(repA.space, repB.space)
    IA, IB = np.eye(repA.space.dim), np.eye(repB.space.dim)
    ga = repA.space.grading
    ea = [tensor_operator(A, IB, 0, ga) for A in repA.odd_gens]
    eb = [tensor_operator(IA, B, 1, ga) for B in repB.odd_gens]
    gens = (ea[:repA.p] + eb[:repB.p] + ea[repA.p:] + eb[repB.p:])
    p, q = repA.p + repB.p, repA.q + repB.q
    return RepData(h, gens, repA.hbar, np.diag([1.0] * p + [-1.0] * q)), (p, q)


def tensor_descend(repA, repB, tol=1e-10):
    """Compare the tensor product with the Schrodinger representation of the sum.

    ``multiplicity`` is ``(even, odd)`` dimensions of the intertwiners from
    the target into the tensor product.  ``gram_scale`` is ``lam`` in
    ``T^dagger T = lam`` for the even intertwiner when the dimensions agree;
    ``superunitary`` needs ``lam > 0``.
    """
    if repA.hbar != repB.hbar:
        raise ValueError("tensor product needs equal hbar")
    if repA.m or repB.m:
        raise ValueError("tensor_descend works on the odd sector, m = 0")
    data, (p, q) = tensor_rep(repA, repB)
    sigma = (repA.sigma + repB.sigma) % 2
    target = build_schrodinger(0, p, q, repA.hbar, None if (p + q) % 2 == 0 else sigma)
    tdata = target.rep_data()
    # (0, t) x (0, -t) acts by e^{i hbar t} e^{-i hbar t}
    t = 0.731
    report = {"p": p, "q": q, "parity": sigma, "target_parity": target.sigma,
              "dims": [data.space.dim, target.space.dim],
              "central_on_kernel": float(abs(np.exp(1j * repA.hbar * t)
                                             * np.exp(-1j * repB.hbar * t) - 1))}
    w = data.omega
    res = 0.0
    for a, A in enumerate(data.odd_gens):
        for b, B in enumerate(data.odd_gens):
            anti = A @ B + B @ A - 1j * data.hbar * w[a, b] * np.eye(data.space.dim)
            res = max(res, np.abs(anti).max())
    report["relations"] = float(res)
    report["multiplicity"] = [len(intertwiner_space(tdata, data, d, tol)) for d in (0, 1)]
    report["superunitary"] = False
    report["gram_scale"] = None
    Ts = intertwiner_space(data, tdata, 0, tol)
    if (len(Ts) == 1 and target.sigma == sigma
            and data.space.dim == target.space.dim):
        T = Ts[0]
        lam = superadjoint_matrix(T, 0, data.space, target.space) @ T
        c = complex(lam[0, 0])
        scalar = np.abs(lam - c * np.eye(len(lam))).max() <= 1e-8 * abs(c)
        report["gram_scale"] = [c.real, c.imag]
        if scalar and abs(c.imag) < 1e-8 * abs(c) and c.real > 0:
            from .hilbertsuper import is_superunitary
            report["superunitary"] = bool(is_superunitary(T / np.sqrt(c.real), data.space,
                                                          target.space, 1e-9))
    report["equivalent"] = report["superunitary"]
    return report


def normalized_odd_intertwiner(rep, tol=1e-10):
    """The odd self-intertwiner ``A`` scaled so that ``A^dagger = -A`` and ``|A^2| = |hbar|/2``.

    Determined up to a sign; ``None`` if the odd intertwiner space is not
    one-dimensional.
    """
    Ts = intertwiner_space(rep.rep_data(), rep.rep_data(), 1, tol)
    if len(Ts) != 1:
        return None
    A = Ts[0]
    Ad = superadjoint_matrix(A, 1, rep.space, rep.space)
    k = np.unravel_index(np.abs(A).argmax(), A.shape)
    mu = Ad[k] / A[k]
    # (lam A)^dagger = conj(lam) mu A = -lam A  =>  lam^2 / |lam|^2 = -mu
    lam = np.sqrt(-mu + 0j)
    A = lam * A
    c = (A @ A)[0, 0]
    return A * np.sqrt(abs(rep.hbar) / 2 / abs(c))


def invariant_lines(data, tol=1e-9, seed=0):
    """One-dimensional subspaces invariant under every operator of ``data``.

    Returns unit vectors, one per line, and flags each as graded or not.
    Raises if a generic combination has a degenerate eigenspace, since the
    lines then come in a continuous family.
    """
    ops = list(data.odd_gens) + list(data.even_ops)
    d = data.space.dim
    rng = np.random.default_rng(seed)
    C = sum((complex(rng.normal(), rng.normal()) * A for A in ops), np.zeros((d, d), complex))
    w, V = np.linalg.eig(C)
    for i in range(d):
        if np.sum(np.abs(w - w[i]) < tol * max(1.0, np.abs(w).max())) > 1:
            raise ValueError("degenerate eigenspace: invariant lines are not isolated")
    out = []
    for v in V.T:
        v = v / np.linalg.norm(v)
        if all(np.linalg.norm(A @ v - (np.vdot(v, A @ v)) * v) < tol for A in ops):
            g = data.space.grading
            graded = np.linalg.norm(v[g == 0]) < tol or np.linalg.norm(v[g == 1]) < tol
            out.append((v, bool(graded)))
    return out
