"""Gaussian-polynomial-phase functions and super functions built on them.

A ``GaussPolyPhase`` on ``R^m`` is a finite sum of blocks

    poly(x) * exp(-x.Q x + b.x)

with complex symmetric ``Q`` and complex ``b``.  The class is closed under
products, affine changes of variables, derivatives and multiplication by
coordinates, and integrating out any subset of variables with ``Re Q``
positive definite on that subset gives back a member of the class.  So
every integral below is exact up to rounding.
"""

from itertools import product
from math import pi

import numpy as np

from .grassmann import BudgetError, dadd, dderiv, dmul, degree


# polynomials: dict exponent tuple -> complex ---------------------------------

def _padd(a, b, s=1.0):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + s * v
    return out


def _pmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return out


def _pscale(a, s):
    return {k: v * s for k, v in a.items()}


def _pclean(a, tol=0.0):
    return {k: v for k, v in a.items() if abs(v) > tol}


def _pderiv(a, i):
    out = {}
    for k, v in a.items():
        if k[i]:
            kk = list(k)
            kk[i] -= 1
            kk = tuple(kk)
            out[kk] = out.get(kk, 0) + v * k[i]
    return out


def _ppow(lin, n, m):
    out = {(0,) * m: 1.0}
    for _ in range(n):
        out = _pmul(out, lin)
    return out


def _psubst(a, lins, m_new):
    """Substitute variable ``i`` by the polynomial ``lins[i]`` in ``m_new`` variables."""
    out = {}
    cache = {}
    for k, v in a.items():
        term = {(0,) * m_new: v}
        for i, e in enumerate(k):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = _ppow(lins[i], e, m_new)
                term = _pmul(term, cache[key])
        out = _padd(out, term)
    return out


def _peval(a, x):
    x = np.asarray(x, dtype=complex)
    return sum(v * np.prod(x ** np.array(k)) for k, v in a.items()) if a else 0j


def sqrt_det(Q):
    """Square root of ``det Q`` on the branch continuous from ``Re Q``."""
    w = np.linalg.eigvals(np.asarray(Q, dtype=complex))
    return complex(np.prod(np.sqrt(w)))


def _is_integrable(Q):
    if Q.shape[0] == 0:
        return True
    R = (Q.real + Q.real.T) / 2
    return np.linalg.eigvalsh(R).min() > 0


# Gaussian functions ------------------------------------------------------------

class GaussPolyPhase:
    """Sum of blocks ``(poly, Q, b)`` on ``R^m``."""

    __slots__ = ("m", "blocks")

    def __init__(self, m, blocks=()):
        self.m = m
        merged = {}
        for poly, Q, b in blocks:
            Q = np.asarray(Q, dtype=complex).reshape(m, m)
            b = np.asarray(b, dtype=complex).reshape(m)
            Q = (Q + Q.T) / 2
            poly = {tuple(k): complex(v) for k, v in poly.items() if v != 0}
            if not poly:
                continue
            key = (Q.tobytes(), b.tobytes())
            if key in merged:
                merged[key] = (_padd(merged[key][0], poly), Q, b)
            else:
                merged[key] = (poly, Q, b)
        self.blocks = [(p, Q, b) for p, Q, b in merged.values() if p]

    # construction
    @classmethod
    def constant(cls, c, m=0):
        return cls(m, [({(0,) * m: c}, np.zeros((m, m)), np.zeros(m))])

    @classmethod
    def gaussian(cls, Q, b=None, c=1.0, nu=None):
        Q = np.atleast_2d(np.asarray(Q, dtype=complex))
        m = Q.shape[0]
        b = np.zeros(m) if b is None else b
        nu = (0,) * m if nu is None else tuple(nu)
        return cls(m, [({nu: c}, Q, b)])

    @classmethod
    def from_terms(cls, m, terms):
        return cls(m, [({tuple(nu): c}, Q, b) for c, nu, Q, b in terms])

    def terms(self):
        for poly, Q, b in self.blocks:
            for nu, c in sorted(poly.items()):
                yield c, nu, Q, b

    @property
    def is_zero(self):
        return not self.blocks

    # algebra
    def __add__(self, other):
        other = self._coerce(other)
        return GaussPolyPhase(self.m, self.blocks + other.blocks)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def _coerce(self, other):
        if isinstance(other, GaussPolyPhase):
            if other.m != self.m:
                raise ValueError("dimension mismatch")
            return other
        return GaussPolyPhase.constant(complex(other), self.m)

    def __mul__(self, other):
        if not isinstance(other, GaussPolyPhase):
            s = complex(other)
            return GaussPolyPhase(self.m, [(_pscale(p, s), Q, b) for p, Q, b in self.blocks])
        if other.m != self.m:
            raise ValueError("dimension mismatch")
        out = []
        for p1, Q1, b1 in self.blocks:
            for p2, Q2, b2 in other.blocks:
                out.append((_pmul(p1, p2), Q1 + Q2, b1 + b2))
        return GaussPolyPhase(self.m, out)

    __rmul__ = __mul__

    def conj(self):
        return GaussPolyPhase(self.m, [({k: np.conj(v) for k, v in p.items()}, Q.conj(), b.conj())
                                       for p, Q, b in self.blocks])

    def deriv(self, i):
        out = []
        for p, Q, b in self.blocks:
            # d/dx_i exp(-xQx + bx) = (b_i - 2 (Qx)_i) exp(...)
            lin = {tuple(int(j == k) for j in range(self.m)): -2 * Q[i, k] for k in range(self.m)}
            lin[(0,) * self.m] = b[i]
            out.append((_padd(_pderiv(p, i), _pmul(p, lin)), Q, b))
        return GaussPolyPhase(self.m, out)

    def mulcoord(self, i):
        e = tuple(int(j == i) for j in range(self.m))
        return self * GaussPolyPhase(self.m, [({e: 1.0}, np.zeros((self.m, self.m)),
                                               np.zeros(self.m))])

    def phase(self, a):
        """Multiply by ``exp(i a.x)``."""
        a = np.asarray(a, dtype=complex)
        return GaussPolyPhase(self.m, [(p, Q, b + 1j * a) for p, Q, b in self.blocks])

    def pullback(self, L, c=None):
        """``x -> f(L x + c)`` with ``L`` of shape ``(m, m_new)``."""
        L = np.asarray(L, dtype=complex)
        if L.ndim != 2 or L.shape[0] != self.m:
            raise ValueError("L must have shape (m, m_new)")
        m_new = L.shape[1]
        c = np.zeros(self.m, complex) if c is None else np.asarray(c, dtype=complex)
        lins = []
        for i in range(self.m):
            lin = {tuple(int(j == k) for j in range(m_new)): L[i, k] for k in range(m_new)}
            lin[(0,) * m_new] = lin.get((0,) * m_new, 0) + c[i]
            lins.append(_pclean(lin))
        out = []
        for p, Q, b in self.blocks:
            const = np.exp(-c @ Q @ c + b @ c)
            Qn = L.T @ Q @ L
            bn = L.T @ b - 2 * L.T @ Q @ c
            out.append((_pscale(_psubst(p, lins, m_new), const), Qn, bn))
        return GaussPolyPhase(m_new, out)

    def translate(self, q):
        """``x -> f(x - q)``."""
        return self.pullback(np.eye(self.m), -np.asarray(q, dtype=complex))

    def embed(self, m_new, index):
        """View as a function on ``R^m_new``, old variable ``i`` at ``index[i]``."""
        L = np.zeros((self.m, m_new))
        for i, j in enumerate(index):
            L[i, j] = 1.0
        return self.pullback(L)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex).reshape(self.m)
        return complex(sum(_peval(p, x) * np.exp(-x @ Q @ x + b @ x) for p, Q, b in self.blocks))

    # integration
    def integrate(self, idx=None):
        """Integrate out the variables ``idx`` (all by default)."""
        if idx is None:
            idx = list(range(self.m))
        idx = list(idx)
        rest = [j for j in range(self.m) if j not in idx]
        k, mr = len(idx), len(rest)
        out = []
        for p, Q, b in self.blocks:
            Qxx = Q[np.ix_(idx, idx)]
            if not _is_integrable(Qxx):
                raise ValueError("Re Q is not positive definite on the integrated variables")
            A = np.linalg.inv(Qxx)
            Qxy = Q[np.ix_(idx, rest)]
            bx, by = b[idx], b[rest]
            const = pi ** (k / 2) / sqrt_det(Qxx) * np.exp(bx @ A @ bx / 4)
            Qn = Q[np.ix_(rest, rest)] - Qxy.T @ A @ Qxy
            bn = by - Qxy.T @ A @ bx
            # beta_i = bx_i - 2 (Qxy y)_i as linear polynomials in y
            betas = []
            for i in range(k):
                lin = {tuple(int(j == l) for j in range(mr)): -2 * Qxy[i, l] for l in range(mr)}
                lin[(0,) * mr] = lin.get((0,) * mr, 0) + bx[i]
                betas.append(_pclean(lin))
            H = _hermite_table(A)
            acc = {}
            for nu, c in p.items():
                nx = tuple(nu[i] for i in idx)
                ny = tuple(nu[j] for j in rest)
                h = _psubst(H(nx), betas, mr)
                acc = _padd(acc, _pmul(h, {ny: c * const}))
            out.append((acc, Qn, bn))
        res = GaussPolyPhase(mr, out)
        return res

    def total(self):
        """Integral over all of ``R^m``."""
        r = self.integrate() if self.m else self
        return complex(sum(p.get((), 0) for p, _, _ in r.blocks))

    def allclose(self, other, tol=1e-10, points=None, seed=0):
        """Pointwise comparison on a few deterministic sample points."""
        rng = np.random.default_rng(seed)
        pts = points if points is not None else rng.normal(size=(6, self.m))
        return all(abs(self(x) - other(x)) <= tol * max(1.0, abs(self(x))) for x in pts)

    def to_json(self):
        return [{"c": [complex(c).real, complex(c).imag], "nu": list(nu),
                 "Q": [[[z.real, z.imag] for z in row] for row in Q],
                 "b": [[z.real, z.imag] for z in b]} for c, nu, Q, b in self.terms()]

    @classmethod
    def from_json(cls, m, terms):
        def cz(z):
            return complex(*z) if isinstance(z, (list, tuple)) else complex(z)
        return cls.from_terms(m, [(cz(t["c"]), tuple(t["nu"]),
                                   np.array([[cz(z) for z in row] for row in t["Q"]]).reshape(m, m),
                                   np.array([cz(z) for z in t["b"]]).reshape(m))
                                  for t in terms])


def _hermite_table(A):
    """``nu -> H_nu(beta)`` with ``d^nu/dbeta^nu exp(beta A beta / 4) = H_nu exp(...)``."""
    k = A.shape[0]
    half = [{tuple(int(j == l) for j in range(k)): A[i, l] / 2 for l in range(k)} for i in range(k)]
    cache = {(0,) * k: {(0,) * k: 1.0 + 0j}}

    def H(nu):
        nu = tuple(nu)
        if nu in cache:
            return cache[nu]
        i = next(j for j, e in enumerate(nu) if e)
        prev = list(nu)
        prev[i] -= 1
        h = H(tuple(prev))
        res = _padd(_pderiv(h, i), _pmul(h, half[i]))
        cache[nu] = _pclean(res)
        return cache[nu]

    return H


def gaussian_moment(Q, b, nu):
    """``int x^nu exp(-x.Qx + b.x) dx`` by the moment recurrence."""
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    return GaussPolyPhase.gaussian(Q, b, 1.0, nu).total()


# super functions ---------------------------------------------------------------

class SuperFunction:
    """``f(x, xi) = sum_alpha f_alpha(x) xi^alpha`` on ``R^{m|n}``.

    Bit ``i`` of ``alpha`` stands for ``xi^{i+1}``; monomials are ascending.
    """

    __slots__ = ("m", "n", "comps")

    def __init__(self, m, n, comps=None):
        if n > 62:
            raise BudgetError("too many odd variables")
        self.m, self.n = m, n
        self.comps = {int(a): f for a, f in (comps or {}).items()
                      if isinstance(f, GaussPolyPhase) and not f.is_zero}

    @classmethod
    def even(cls, f, n=0):
        return cls(f.m, n, {0: f})

    @classmethod
    def constant(cls, c, m, n):
        return cls(m, n, {0: GaussPolyPhase.constant(c, m)})

    @classmethod
    def generator(cls, i, m, n):
        return cls(m, n, {1 << i: GaussPolyPhase.constant(1.0, m)})

    def _like(self, comps):
        return SuperFunction(self.m, self.n, comps)

    def __add__(self, other):
        if not isinstance(other, SuperFunction):
            other = SuperFunction.constant(complex(other), self.m, self.n)
        return self._like(dadd(self.comps, other.comps))

    __radd__ = __add__

    def __neg__(self):
        return self._like({a: -f for a, f in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SuperFunction):
            if (other.m, other.n) != (self.m, self.n):
                raise ValueError("dimension mismatch")
            return self._like(dmul(self.comps, other.comps))
        if isinstance(other, GaussPolyPhase):
            return self._like({a: f * other for a, f in self.comps.items()})
        return self._like({a: f * other for a, f in self.comps.items()})

    def __rmul__(self, other):
        if isinstance(other, (GaussPolyPhase,)):
            return self * other
        return self._like({a: f * other for a, f in self.comps.items()})

    def deriv_odd(self, i):
        return self._like(dderiv(self.comps, i))

    def berezin_odd(self, order):
        """Apply left derivatives ``order[0]`` first."""
        d = self.comps
        for i in order:
            d = dderiv(d, i)
        return self._like(d)

    def body(self):
        return self.comps.get(0, GaussPolyPhase(self.m))

    def map_even(self, fn):
        return SuperFunction(None, self.n, {})._rebuild(self, fn)

    def _rebuild(self, src, fn):
        comps = {a: fn(f) for a, f in src.comps.items()}
        m = next(iter(comps.values())).m if comps else src.m
        return SuperFunction(m, src.n, comps)

    def odd_exp(self):
        """Exponential of a nilpotent super function (no body in ``comps[0]``)."""
        if 0 in self.comps:
            raise ValueError("odd_exp needs a function without xi-free part")
        out = SuperFunction.constant(1.0, self.m, self.n)
        power = out
        k = 1
        while True:
            power = power * self * (1.0 / k)
            if not power.comps:
                return out
            out = out + power
            k += 1

    def __call__(self, x):
        """Evaluate even coefficients at ``x``; returns ``{alpha: value}``."""
        return {a: f(x) for a, f in self.comps.items()}

    def to_json(self):
        return {"m": self.m, "n": self.n,
                "comps": [{"alpha": a, "terms": f.to_json()} for a, f in sorted(self.comps.items())]}

    @classmethod
    def from_json(cls, data):
        m = data["m"]
        return cls(m, data["n"], {c["alpha"]: GaussPolyPhase.from_json(m, c["terms"])
                                  for c in data["comps"]})


def berezin_integrate(f, order=None):
    """``int dx dxi^n ... dxi^1 f``: top coefficient, then the Gaussian integral.

    ``order`` lists the odd derivatives, first applied first; the default
    ``0, 1, ..., n-1`` extracts the top component of ascending monomials.
    """
    order = list(range(f.n)) if order is None else list(order)
    g = f.berezin_odd(order)
    top = g.comps.get(0)
    if top is None:
        return 0j
    for a in g.comps:
        if a:
            raise ValueError("odd variables remain after integration")
    return top.total()


# Dirac-type identities -----------------------------------------------------------

def kappa(m, r, s, eps, hbar):
    """Normalizing constant of the Wigner calculus, with ``|hbar|`` in the classical factor."""
    return (2 * pi / abs(hbar)) ** m * (1j * hbar) ** r * (eps * hbar) ** s * (-1) ** (r * (r + 1) // 2)


def _random_gauss(rng, m, deg=2):
    if m == 0:
        return GaussPolyPhase.constant(complex(rng.normal(), rng.normal()), 0)
    M = rng.normal(size=(m, m))
    Q = M @ M.T + m * np.eye(m) + 1j * 0.3 * (lambda S: S + S.T)(rng.normal(size=(m, m)))
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    blocks = []
    poly = {}
    for nu in product(range(deg + 1), repeat=m):
        if sum(nu) <= deg:
            poly[nu] = complex(rng.normal(), rng.normal())
    blocks.append((poly, Q, b))
    return GaussPolyPhase(m, blocks)


def random_superfunction(rng, m, n, mask_filter=None, deg=2):
    comps = {}
    for a in range(1 << n):
        if mask_filter is None or mask_filter(a):
            comps[a] = _random_gauss(rng, m, deg)
    return SuperFunction(m, n, comps)


def _bilinear_phase(m_tot, n_tot, pairs_even, pairs_odd, scale):
    """``exp(scale * (sum c x_i x_j + sum c theta_a theta_b))`` as a super function."""
    Q = np.zeros((m_tot, m_tot), complex)
    for i, j, c in pairs_even:
        Q[i, j] -= scale * c / 2
        Q[j, i] -= scale * c / 2
    even = SuperFunction.even(GaussPolyPhase(m_tot, [({(0,) * m_tot: 1.0}, Q, np.zeros(m_tot))]),
                              n_tot)
    odd = SuperFunction(m_tot, n_tot, {})
    for a, b, c in pairs_odd:
        odd = odd + SuperFunction.generator(a, m_tot, n_tot) * SuperFunction.generator(b, m_tot, n_tot) * (scale * c)
    return even * odd.odd_exp() if odd.comps else even


def e0_odd_order(r, s, base=0):
    """Odd derivatives of the phase-space measure for odd coordinates laid out as
    ``q_1..q_r, p_1..p_r, zeta_1, zbar_1, ..., zeta_s, zbar_s`` from ``base``."""
    order = []
    for a in range(s):
        order += [base + 2 * r + 2 * a + 1, base + 2 * r + 2 * a]
    order += [base + r + i for i in range(r)]
    order += [base + i for i in range(r)]
    return order


def dirac_identities_check(m, r, s, eps, hbar, seed=0, trials=3):
    """Max residual over the three Dirac-type identities on random test functions."""
    if hbar == 0:
        raise ValueError("hbar must be nonzero")
    rng = np.random.default_rng(seed)
    k = kappa(m, r, s, eps, hbar)
    worst = {"dirac0": 0.0, "dirac1": 0.0, "dirac2": 0.0}
    for _ in range(trials):
        # int dq dp e^{i hbar q p} phi(q); even q, p at 0..m-1, m..2m-1; odd q, p at 0..r-1, r..2r-1
        phi = random_superfunction(rng, m, r)
        emb = SuperFunction(2 * m, 2 * r, {a: f.embed(2 * m, list(range(m))) for a, f in phi.comps.items()})
        ph = _bilinear_phase(2 * m, 2 * r, [(i, m + i, 1.0) for i in range(m)],
                             [(i, r + i, 1.0) for i in range(r)], 1j * hbar)
        g = (ph * emb).berezin_odd([r + i for i in range(r)] + list(range(r)))
        top = g.body()
        lhs = top.integrate(list(range(m))).total()
        rhs = k / (eps * hbar) ** s * phi.body()(np.zeros(m))
        worst["dirac0"] = max(worst["dirac0"], abs(lhs - rhs) / max(1.0, abs(rhs)))

        # (2i)^s int dzeta dzbar e^{i hbar eps/2 zeta zbar} phi(zeta); zeta_a at 2a, zbar_a at 2a+1
        hol = random_superfunction(rng, 0, 2 * s, lambda a: all(not (a >> (2 * j + 1)) & 1 for j in range(s)))
        ph = _bilinear_phase(0, 2 * s, [], [(2 * a, 2 * a + 1, 1.0) for a in range(s)], 0.5j * hbar * eps)
        order = [i for a in range(s) for i in (2 * a + 1, 2 * a)]
        lhs = (2j) ** s * berezin_integrate(ph * hol, order)
        rhs = (hbar * eps) ** s * hol.body()(np.zeros(0))
        worst["dirac1"] = max(worst["dirac1"], abs(lhs - rhs) / max(1.0, abs(rhs)))

        # int dx dy e^{i hbar omega(x, y)} f(x) on E0 = R^{2m | 2r + 2s}
        no = 2 * r + 2 * s
        f = random_superfunction(rng, 2 * m, no, deg=1)
        femb = SuperFunction(4 * m, 2 * no, {a: h.embed(4 * m, list(range(2 * m)))
                                             for a, h in f.comps.items()})
        ev = [(i, 2 * m + m + i, 1.0) for i in range(m)] + [(m + i, 2 * m + i, -1.0) for i in range(m)]
        od = [(i, no + r + i, 1.0) for i in range(r)] + [(r + i, no + i, 1.0) for i in range(r)]
        for a in range(s):
            z, zb = 2 * r + 2 * a, 2 * r + 2 * a + 1
            od += [(z, no + zb, eps / 2), (zb, no + z, eps / 2)]
        ph = _bilinear_phase(4 * m, 2 * no, ev, od, 1j * hbar)
        order = e0_odd_order(r, s, no) + e0_odd_order(r, s, 0)
        g = (ph * femb).berezin_odd(order)
        top = g.body()
        lhs = top.integrate(list(range(2 * m))).total() * (2j) ** (2 * s)
        rhs = k ** 2 * f.body()(np.zeros(2 * m))
        worst["dirac2"] = max(worst["dirac2"], abs(lhs - rhs) / max(1.0, abs(rhs)))
    worst["kappa"] = [k.real, k.imag]
    worst["max"] = max(worst["dirac0"], worst["dirac1"], worst["dirac2"])
    return worst
