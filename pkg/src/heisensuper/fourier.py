"""Group Fourier transform on ``H_{0|p,q}`` with ``p + q`` even.

Group points are ``(x, t)`` with ``x`` in the odd phase space and ``t``
central; a generic point has free Grassmann generators as coordinates, so
identities between functions of ``g`` are checked coefficient by
coefficient.  Test functions are finite sums ``f(x, t) = sum F_k(x) g_k(t)``
with ``g_k`` Gaussian in ``t``; every integral except the one over ``hbar``
is exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .gaussfun import GaussPolyPhase, SuperFunction, e0_odd_order, kappa
from .grassmann import GrassmannMatrix, degree, dderiv, dmul, gr_conj
from .hilbertsuper import superadjoint_matrix
from .schrod import build_schrodinger
from .stonevn import integrated_rep
from .wigner import _integral


@dataclass
class GroupFunction:
    """``f(x, t) = sum_k F_k(x) g_k(t)`` on ``H_{0|p,q}``."""

    p: int
    q: int
    terms: list = field(default_factory=list)   # [(SuperFunction on E0, GaussPolyPhase on R)]

    def __add__(self, other):
        return GroupFunction(self.p, self.q, self.terms + other.terms)

    def conj(self, lay):
        """Pointwise complex conjugate; odd coordinates follow the layout's conjugation."""
        swap = lay.swap()[:lay.n_ext]
        out = []
        for F, g in self.terms:
            comps = {}
            for a, h in F.comps.items():
                c = gr_conj_mask(a, _integral(h), swap)
                for b, v in c.items():
                    comps[b] = comps.get(b, 0) + v
            out.append((_sf(comps, F.n), g.conj()))
        return GroupFunction(self.p, self.q, out)

    def involution(self, lay):
        """``f*(g) = conj(f(g^{-1}))`` with ``(x, t)^{-1} = (-x, -t)``."""
        out = []
        for F, g in self.conj(lay).terms:
            comps = {a: h * (-1) ** degree(a) for a, h in F.comps.items()}
            out.append((SuperFunction(0, F.n, comps), g.pullback(-np.eye(1))))
        return GroupFunction(self.p, self.q, out)

    def at(self, t):
        """``f(y, t)`` at the generic odd point ``y``: a Grassmann dict in the coordinates."""
        out = {}
        for F, g in self.terms:
            gt = complex(g(np.array([t])))
            for a, h in F.comps.items():
                out[a] = out.get(a, 0) + gt * _integral(h)
        return out


def _sf(comps, n):
    return SuperFunction(0, n, {a: GaussPolyPhase.constant(v, 0) for a, v in comps.items()})


def gr_conj_mask(mask, c, swap):
    from .grassmann import GrassmannElement
    e = GrassmannElement({mask: c}, len(swap))
    return gr_conj(e, swap).coeffs


def profile_transform(g, hbar):
    """``int dt g(t) exp(-i hbar t)``."""
    return g.phase(np.array([-hbar])).total()


def gaussian_profile(h0, width, c=1.0, nu=0):
    """``g(t)`` whose transform is a Gaussian of width ``width`` centred at ``h0``."""
    a = width ** 2 / 2
    return GaussPolyPhase.gaussian(np.array([[a]]), np.array([1j * h0]), c, (nu,))


def schrodinger_at(p, q, hbar):
    return build_schrodinger(0, p, q, hbar)


def group_fourier(f, hbar):
    """``f^(hbar) = int dg f(g) U^{-hbar}(g)`` on the Schrodinger space at ``-hbar``."""
    if hbar == 0:
        raise ValueError("hbar must be nonzero")
    if (f.p + f.q) % 2:
        raise ValueError("the Fourier transform is defined for p + q even")
    rep = schrodinger_at(f.p, f.q, -hbar)
    data = rep.rep_data()
    out = np.zeros((rep.space.dim, rep.space.dim), complex)
    for F, g in f.terms:
        out = out + profile_transform(g, hbar) * integrated_rep(data, F, f.p, f.q)
    return out


# supertrace ----------------------------------------------------------------------

def _right_slot(rep, phi, M, psi):
    """``<phi, M(x) psi>`` for a Grassmann matrix ``M(x)``; ``phi`` homogeneous."""
    G = rep.space.gram
    sigma = rep.space.parity
    dphi = {int(degree(a) % 2) for a in np.flatnonzero(np.abs(phi) > 0)}
    if len(dphi) > 1:
        raise ValueError("phi must be homogeneous")
    dp = dphi.pop() if dphi else 0
    out = {}
    for gam, A in M.comps.items():
        v = phi.conj() @ G @ (A @ psi)
        if v != 0:
            out[gam] = (-1) ** (degree(gam) * (sigma + dp)) * v
    return out


def _e0(rep, comps):
    lay = rep.layout
    for i in e0_odd_order(lay.r, lay.s):
        comps = dderiv(comps, i)
    return (2j) ** lay.s * comps.get(0, 0)


def supertrace(rep, T, phi, psi):
    """``Str(T) = (kappa <phi, psi>)^{-1} int dx <phi, U(-x) T U(x) psi>``.

    ``phi`` and ``psi`` are coefficient vectors in the basis of the odd
    sector and must not involve the holomorphic state variables.
    """
    G = rep.space.gram
    nrm = phi.conj() @ G @ psi
    if abs(nrm) < 1e-14:
        raise ValueError("<phi, psi> = 0")
    U = rep.expansion
    Um = GrassmannMatrix({g: (-1) ** degree(g) * a for g, a in U.comps.items()}, U.grading, U.n)
    M = Um @ GrassmannMatrix.constant(T, U.grading, U.n) @ U
    val = _e0(rep, _right_slot(rep, phi, M, psi))
    k = kappa(0, rep.r, rep.s, rep.eps, rep.hbar)
    return val / (k * nrm)


def supertrace_graded(rep, T):
    """``tr(P T)``: the supertrace read off from rank-one operators."""
    return complex(np.trace(rep.space.P @ T))


def rank_one(rep, psi, phi):
    """Matrix of ``|psi><phi|``: ``v -> psi <phi, v>``."""
    return np.outer(psi, phi.conj() @ rep.space.gram)


def admissible_pairs(rep, count=3, seed=0):
    """Random homogeneous ``(phi, psi)`` without holomorphic dependence and ``<phi, psi> != 0``."""
    from .wigner import depends_on_zeta, state
    rng = np.random.default_rng(seed)
    d = rep.space.dim
    ok = [a for a in range(d) if not depends_on_zeta(rep, state(rep, {a: 1.0}))]
    pairs = []
    while len(pairs) < count:
        par = int(rng.integers(2))
        phi = np.zeros(d, complex)
        psi = np.zeros(d, complex)
        for a in ok:
            if degree(a) % 2 == par:
                phi[a] = complex(*rng.normal(size=2))
        for a in ok:
            psi[a] = complex(*rng.normal(size=2))
        if abs(phi.conj() @ rep.space.gram @ psi) > 1e-3:
            pairs.append((phi, psi))
    return pairs


def supertrace_independence(rep, T, count=3, seed=0):
    """Spread of ``Str(T)`` over admissible pairs, and its distance to ``tr(P T)``."""
    vals = [supertrace(rep, T, a, b) for a, b in admissible_pairs(rep, count, seed)]
    ref = supertrace_graded(rep, T)
    spread = max(abs(v - vals[0]) for v in vals)
    return {"values": vals, "spread": float(spread), "vs_graded": float(max(abs(v - ref) for v in vals))}


def delta_pairing(rep, F):
    """Both sides of ``Str(pi(F)) = kappa int dx F(x) delta(x)`` at ``m = 0``.

    ``delta(x) = q_1..q_r p_1..p_r (2i)^{-s} zbar_1 zeta_1 .. zbar_s zeta_s``.
    """
    lay = rep.layout
    lhs = supertrace_graded(rep, integrated_rep(rep.rep_data(), F, rep.p, rep.q))
    pairs = admissible_pairs(rep, 1)
    lhs_def = supertrace(rep, integrated_rep(rep.rep_data(), F, rep.p, rep.q), *pairs[0])
    delta = {0: 1.0}
    for i in range(lay.r):
        delta = dmul(delta, {1 << lay.q(i): 1.0})
    for i in range(lay.r):
        delta = dmul(delta, {1 << lay.p(i): 1.0})
    for a in range(lay.s):
        delta = dmul(delta, {1 << lay.zbar(a): 1.0})
        delta = dmul(delta, {1 << lay.zeta(a): 1.0})
    delta = {k: v / (2j) ** lay.s for k, v in delta.items()}
    Fc = {a: _integral(h) for a, h in F.comps.items()}
    k = kappa(0, rep.r, rep.s, rep.eps, rep.hbar)
    rhs = k * _e0(rep, dmul(Fc, delta))
    return lhs, lhs_def, rhs


# adjoint and Parseval ------------------------------------------------------------

def superadjoint_any(rep, T):
    """Superadjoint of a possibly inhomogeneous operator, part by part."""
    g = rep.space.grading
    out = np.zeros_like(T)
    for deg in (0, 1):
        mask = ((g[:, None] + g[None, :]) % 2) == deg
        out = out + superadjoint_matrix(np.where(mask, T, 0), deg, rep.space, rep.space)
    return out


def conj_compatibility(f, hbar, pointwise=False):
    """``|(f*)^(hbar) - f^(hbar)^dagger|`` for the involution ``f*(g) = conj f(g^{-1})``.

    ``pointwise=True`` uses the plain conjugate ``conj f(g)`` instead.
    """
    rep = schrodinger_at(f.p, f.q, -hbar)
    fs = f.conj(rep.layout) if pointwise else f.involution(rep.layout)
    lhs = group_fourier(fs, hbar)
    rhs = superadjoint_any(rep, group_fourier(f, hbar))
    return float(np.abs(lhs - rhs).max())


def l2_odd(rep, F1, F2):
    """``int dx conj(F1) F2`` with the phase-space measure."""
    swap = rep.layout.swap()[:rep.layout.n_ext]
    c1 = {}
    for a, h in F1.comps.items():
        for b, v in gr_conj_mask(a, _integral(h), swap).items():
            c1[b] = c1.get(b, 0) + v
    c2 = {a: _integral(h) for a, h in F2.comps.items()}
    return _e0(rep, dmul(c1, c2))


def parseval_fixed(f1, f2, hbar):
    """``Str(f1^ dagger f2^)`` against ``kappa_{-hbar} sum conj(g1^) g2^ int conj(F1) F2``."""
    rep = schrodinger_at(f1.p, f1.q, -hbar)
    A = superadjoint_any(rep, group_fourier(f1, hbar)) @ group_fourier(f2, hbar)
    lhs = [supertrace(rep, A, a, b) for a, b in admissible_pairs(rep, 2, 7)]
    k = kappa(0, rep.r, rep.s, rep.eps, rep.hbar)
    rhs = 0j
    for F1, g1 in f1.terms:
        for F2, g2 in f2.terms:
            rhs += (k * np.conj(profile_transform(g1, hbar)) * profile_transform(g2, hbar)
                    * l2_odd(rep, F1, F2))
    return lhs, rhs


# inversion -------------------------------------------------------------------------

def plancherel_density(p, q, hbar, literal=False):
    """``1 / (2 pi kappa_{-hbar})``; ``literal=True`` adds the extra ``|hbar|`` weight."""
    rep = schrodinger_at(p, q, -hbar)
    w = abs(hbar) if literal else 1.0
    return w / (2 * np.pi * kappa(0, rep.r, rep.s, rep.eps, rep.hbar))


def _legendre(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _inversion_integrand(f, hbar, t, pair=None):
    """``Str(f^(hbar) U^{-hbar}(g^{-1}))`` at ``g = (y, t)``, coefficient-wise in ``y``."""
    rep = schrodinger_at(f.p, f.q, -hbar)
    fh = group_fourier(f, hbar)
    U = rep.expansion
    Uinv = GrassmannMatrix({g: (-1) ** degree(g) * a for g, a in U.comps.items()}, U.grading, U.n)
    T = (GrassmannMatrix.constant(fh, U.grading, U.n) @ Uinv) * np.exp(1j * hbar * t)
    phi, psi = pair if pair is not None else admissible_pairs(rep, 1)[0]
    return {g: supertrace(rep, a, phi, psi) for g, a in T.comps.items()}


def inversion(f, t, window=(0.5, 1.5), nodes=48, literal=False):
    """``int dmu(hbar) Str(f^(hbar) U^{-hbar}(g^{-1}))`` by Gauss-Legendre on ``window``."""
    a, b = window
    if a <= 0 <= b:
        raise ValueError("the hbar window must exclude 0")
    xs, ws = _legendre(a, b, nodes)
    out = {}
    for h, w in zip(xs, ws):
        dens = plancherel_density(f.p, f.q, h, literal)
        for g, v in _inversion_integrand(f, h, t).items():
            out[g] = out.get(g, 0) + w * dens * v
    return out


def _dict_dist(a, b):
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)), default=0.0)


def inversion_check(f, times, window=(0.5, 1.5), nodes=48, literal=False):
    """Max residual of the inversion formula at the sample times, with a node-doubling check."""
    worst, conv = 0.0, 0.0
    for t in times:
        rec = inversion(f, t, window, nodes, literal)
        rec2 = inversion(f, t, window, 2 * nodes, literal)
        worst = max(worst, _dict_dist(rec2, f.at(t)))
        conv = max(conv, _dict_dist(rec, rec2))
    return {"inversion_residual": float(worst), "quadrature_change": float(conv),
            "nodes": 2 * nodes}


def parseval_check(f1, f2, window=(0.5, 1.5), nodes=48, literal=False):
    """``int dg conj(f1) f2`` against ``int dmu(hbar) Str(f1^ dagger f2^)``; relative error."""
    lay = schrodinger_at(f1.p, f1.q, 1.0)
    lhs = 0j
    for F1, g1 in f1.terms:
        for F2, g2 in f2.terms:
            lhs += (g1.conj() * g2).total() * l2_odd(lay, F1, F2)
    xs, ws = _legendre(*window, nodes)
    rhs = 0j
    for h, w in zip(xs, ws):
        rep = schrodinger_at(f1.p, f1.q, -h)
        A = superadjoint_any(rep, group_fourier(f1, h)) @ group_fourier(f2, h)
        rhs += w * plancherel_density(f1.p, f1.q, h, literal) * supertrace(rep, A, *admissible_pairs(rep, 1)[0])
    return {"lhs": complex(lhs), "rhs": complex(rhs),
            "parseval_residual": float(abs(lhs - rhs) / max(1.0, abs(lhs)))}


def left_regular_check(f, hbar, seed=0):
    """``(L(y) f)^(hbar) = U^{-hbar}(y) f^(hbar)`` at a generic odd point ``y`` (``t_y = 0``)."""
    from .stonevn import translation_check
    rep = schrodinger_at(f.p, f.q, -hbar)
    worst = 0.0
    for F, g in f.terms:
        worst = max(worst, abs(profile_transform(g, hbar))
                    * translation_check(rep.rep_data(), F, f.p, f.q, side="left"))
    return worst


def random_group_function(p, q, rng, terms=2, h0=1.0, width=0.07):
    """Random test function with a Gaussian ``hbar``-profile centred at ``h0``."""
    rep = schrodinger_at(p, q, 1.0)
    n = rep.layout.n_ext
    out = []
    for _ in range(terms):
        F = _sf({a: complex(*rng.normal(size=2)) for a in range(1 << n)}, n)
        out.append((F, gaussian_profile(h0 + 0.05 * rng.normal(), width, complex(*rng.normal(size=2)))))
    return GroupFunction(p, q, out)
