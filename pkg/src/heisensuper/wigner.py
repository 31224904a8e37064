"""Wigner functions, twisted convolution and the resolution of the identity.

States of ``L^2(R^m) (x) H_odd`` are ``SuperFunction`` objects whose odd
index is the basis mask of the odd-sector space and whose even
coefficients live on ``R^m``.  Functions on phase space ``E0`` use even
variables ``q_1..q_m, p_1..p_m`` and odd variables in the normal-form order
``q, p, zeta_1, zbar_1, ...`` of the odd sector.
"""

import numpy as np

from .gaussfun import GaussPolyPhase, SuperFunction, _bilinear_phase, e0_odd_order, kappa
from .grassmann import degree, dsubstitute


def _check_even(rep):
    if (rep.p + rep.q) % 2:
        raise ValueError("phase-space calculus is implemented for p + q even")


def n_odd(rep):
    return rep.layout.n_ext


# states ------------------------------------------------------------------------

def state(rep, comps):
    """State from ``{basis mask: GaussPolyPhase on R^m}`` (constants allowed for m = 0)."""
    out = {}
    for a, f in comps.items():
        out[a] = f if isinstance(f, GaussPolyPhase) else GaussPolyPhase.constant(complex(f), rep.m)
    return SuperFunction(rep.m, rep.layout.n_state, out)


def depends_on_zeta(rep, phi):
    lay = rep.layout
    hol = sum(1 << (lay.r + a) for a in range(lay.s))
    return any(a & hol for a in phi.comps)


def parity_of(phi):
    ps = {degree(a) % 2 for a in phi.comps}
    if len(ps) > 1:
        raise ValueError("state is not homogeneous")
    return ps.pop() if ps else 0


def _integral(f):
    return f.total() if f.m else complex(sum(p.get((), 0) for p, _, _ in f.blocks))


def inner(rep, phi, psi):
    G = rep.space.gram
    total = 0j
    for a, fa in phi.comps.items():
        ca = fa.conj()
        for b, fb in psi.comps.items():
            if G[a, b] != 0:
                total += G[a, b] * _integral(ca * fb)
    return total


def apply_matrix(A, psi):
    """``(A psi)_b = sum_c A[b, c] psi_c`` on the odd factor."""
    out = {}
    for c, f in psi.comps.items():
        for b in np.flatnonzero(np.abs(A[:, c]) > 0):
            g = f * A[b, c]
            out[int(b)] = out[int(b)] + g if int(b) in out else g
    return SuperFunction(psi.m, psi.n, out)


def parity_op(phi):
    return SuperFunction(phi.m, phi.n, {a: f * (-1) ** degree(a) for a, f in phi.comps.items()})


def M_op(phi):
    """``(M phi)(q, zeta) = P phi(-q, -zeta)``: reflects the even variables only."""
    m = phi.m
    return SuperFunction(m, phi.n, {a: f.pullback(-np.eye(m)) if m else f
                                    for a, f in phi.comps.items()})


def M_matrix(rep):
    """Matrix of ``M`` on the odd factor (the even factor is reflected separately)."""
    d = rep.space.dim
    P = np.diag([(-1.0) ** degree(a) for a in range(d)])
    R = np.diag([(-1.0) ** degree(a) for a in range(d)])
    return P @ R


# classical action ----------------------------------------------------------------

def classical_kernel(f, hbar):
    """``(y, q, p) -> exp(i hbar (q/2 - y).p) f(y - q)`` as a function on ``R^{3m}``."""
    m = f.m
    L = np.hstack([np.eye(m), -np.eye(m), np.zeros((m, m))])
    g = f.pullback(L)
    Q = np.zeros((3 * m, 3 * m), complex)
    for i in range(m):
        Q[m + i, 2 * m + i] = Q[2 * m + i, m + i] = -1j * hbar / 4
        Q[i, 2 * m + i] = Q[2 * m + i, i] = 1j * hbar / 2
    return g * GaussPolyPhase(3 * m, [({(0,) * (3 * m): 1.0}, Q, np.zeros(3 * m))])


def classical_act(f, q, p, t, hbar):
    """``U_0(q, p, t) f`` at a real point."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    g = f.translate(q).phase(-hbar * p)
    return g * np.exp(1j * hbar * (t + 0.5 * q @ p))


# Wigner functions ----------------------------------------------------------------

def wigner(rep, phi, psi):
    """``V(phi, psi)(x) = <phi, U(x) psi>`` as a super function on ``E0``."""
    _check_even(rep)
    m, lay = rep.m, rep.layout
    G = rep.space.gram
    sigma = rep.space.parity
    nx = n_odd(rep)
    comps = {}
    for gam, Ug in rep.expansion.comps.items():
        chi = apply_matrix(Ug, psi)
        acc = None
        for a, fa in phi.comps.items():
            sign = (-1) ** (degree(gam) * (sigma + degree(a)))
            ca = fa.conj()
            for b, fb in chi.comps.items():
                if G[a, b] == 0:
                    continue
                if m:
                    integrand = ca.embed(3 * m, list(range(m))) * classical_kernel(fb, rep.hbar)
                    val = integrand.integrate(list(range(m))) * (sign * G[a, b])
                else:
                    val = GaussPolyPhase.constant(sign * G[a, b] * _integral(ca * fb), 0)
                acc = val if acc is None else acc + val
        if acc is not None and not acc.is_zero:
            comps[gam] = acc
    return SuperFunction(2 * m, nx, comps)


def reflect(rep, f):
    """``x -> f(-x)`` on ``E0``."""
    m2 = f.m
    return SuperFunction(m2, f.n, {a: (g.pullback(-np.eye(m2)) if m2 else g) * (-1) ** degree(a)
                                   for a, g in f.comps.items()})


def e0_integrate(rep, f):
    """``int dx f`` with the phase-space measure, ``(2i)^s`` included."""
    lay = rep.layout
    g = f.berezin_odd(e0_odd_order(lay.r, lay.s))
    top = g.comps.get(0)
    if top is None:
        return 0j
    return (2j) ** lay.s * _integral(top)


def kappa_of(rep):
    return kappa(rep.m, rep.r, rep.s, rep.eps, rep.hbar)


def resolution_of_identity_check(rep, phi, psi, phi2, psi2):
    """``|int V(phi, phi2)(-x) V(psi2, psi)(x) dx - kappa <phi, psi><psi2, P phi2>|``."""
    if depends_on_zeta(rep, phi) or depends_on_zeta(rep, psi):
        raise ValueError("phi and psi must not depend on the holomorphic variables")
    lhs = e0_integrate(rep, reflect(rep, wigner(rep, phi, phi2)) * wigner(rep, psi2, psi))
    rhs = kappa_of(rep) * inner(rep, phi, psi) * inner(rep, psi2, parity_op(phi2))
    return abs(lhs - rhs), lhs, rhs


# twisted convolution ----------------------------------------------------------------

def _omega_pairs(rep, yo, xo, ye, xe):
    """Index pairs of ``omega(y, x)`` for odd offsets ``yo, xo`` and even offsets ``ye, xe``."""
    m, lay, eps = rep.m, rep.layout, rep.eps
    ev = [(ye + i, xe + m + i, 1.0) for i in range(m)] + [(ye + m + i, xe + i, -1.0) for i in range(m)]
    od = [(yo + lay.q(i), xo + lay.p(i), 1.0) for i in range(lay.r)]
    od += [(yo + lay.p(i), xo + lay.q(i), 1.0) for i in range(lay.r)]
    for a in range(lay.s):
        z, zb = lay.zeta(a), lay.zbar(a)
        od += [(yo + z, xo + zb, eps / 2), (yo + zb, xo + z, eps / 2)]
    return ev, od


def _embed(f, m_tot, n_tot, even_index, odd_images):
    comps = {}
    for a, g in f.comps.items():
        ge = g.embed(m_tot, even_index) if f.m else GaussPolyPhase.constant(
            sum(p.get((), 0) for p, _, _ in g.blocks), m_tot)
        comps[a] = ge
    return SuperFunction(m_tot, n_tot, dsubstitute(comps, odd_images))


def twisted_convolution(rep, f1, f2):
    """``(f1 * f2)(x) = int dy f1(y) f2(x - y) exp(i hbar/2 omega(y, x))``."""
    _check_even(rep)
    m2, n = 2 * rep.m, n_odd(rep)
    # x: even 0..m2-1, odd 0..n-1;  y: even m2..2m2-1, odd n..2n-1
    f1y = _embed(f1, 2 * m2, 2 * n, [m2 + i for i in range(m2)],
                 {i: {1 << (n + i): 1.0} for i in range(n)})
    diff = {i: {1 << i: 1.0, 1 << (n + i): -1.0} for i in range(n)}
    if m2:
        L = np.hstack([np.eye(m2), -np.eye(m2)])
        comps = {a: g.pullback(L) for a, g in f2.comps.items()}
    else:
        comps = {a: GaussPolyPhase.constant(sum(p.get((), 0) for p, _, _ in g.blocks), 0)
                 for a, g in f2.comps.items()}
    f2xy = SuperFunction(2 * m2, 2 * n, dsubstitute(comps, diff))
    ev, od = _omega_pairs(rep, n, 0, m2, 0)
    ph = _bilinear_phase(2 * m2, 2 * n, ev, od, 0.5j * rep.hbar)
    g = (f1y * f2xy * ph).berezin_odd(e0_odd_order(rep.r, rep.s, n))
    out = {}
    for a, h in g.comps.items():
        if a >> n:
            raise ArithmeticError("odd y variables survived the integration")
        hh = h.integrate([m2 + i for i in range(m2)]) if m2 else h
        out[a] = hh * (2j) ** rep.s
    return SuperFunction(m2, n, out)


def composition_sign(phi, psi, phi2, psi2):
    """Koszul sign ``(-1)^{(|phi|+|phi2|+1)(|psi|+|psi2|)}`` of the composition law."""
    a, b, c, d = (parity_of(f) for f in (phi, psi, phi2, psi2))
    return (-1) ** ((a + c + 1) * (b + d))


def composition_check(rep, phi, psi, phi2, psi2, points=None, seed=0, koszul=True):
    """``V(phi2, psi) * V(phi, psi2) = +-kappa <phi2, psi2> V(phi, P psi)``; max residual.

    ``phi`` and ``psi`` must not depend on the holomorphic variables.  With
    ``koszul=False`` the sign is taken to be ``+1``, which is only right
    when the parities make the Koszul sign trivial.
    """
    if depends_on_zeta(rep, phi) or depends_on_zeta(rep, psi):
        raise ValueError("phi and psi must not depend on the holomorphic variables")
    lhs = twisted_convolution(rep, wigner(rep, phi2, psi), wigner(rep, phi, psi2))
    rhs = wigner(rep, phi, parity_op(psi))
    c = kappa_of(rep) * inner(rep, phi2, psi2)
    if koszul:
        c *= composition_sign(phi, psi, phi2, psi2)
    return superfunction_distance(lhs, rhs, c, points, seed)


def superfunction_distance(f, g, c=1.0, points=None, seed=0):
    """Max over odd components and sample points of ``|f - c g|``."""
    rng = np.random.default_rng(seed)
    m = f.m
    pts = points if points is not None else rng.normal(size=(5, m))
    worst = 0.0
    for a in set(f.comps) | set(g.comps):
        fa = f.comps.get(a)
        ga = g.comps.get(a)
        for x in (pts if m else [np.zeros(0)]):
            va = fa(x) if fa is not None else 0j
            vb = ga(x) if ga is not None else 0j
            worst = max(worst, abs(va - c * vb))
    return worst


def delta_surrogate(m2, n, width):
    """Normalized narrow Gaussian in the even variables times the odd top monomial.

    Its phase-space integral against ``f`` tends to ``f(0)`` as ``width -> 0``.
    """
    g = GaussPolyPhase.gaussian(np.eye(m2) / width ** 2, None, (np.pi * width ** 2) ** (-m2 / 2))
    return g


def delta_convolution_check(rep, f, widths=(0.02, 0.01, 0.005), points=None):
    """``f * delta_w -> f`` as ``w -> 0`` for ``m = 1`` and ``p = q = 0``.

    Returns the residuals per width, the last one after Richardson extrapolation.
    """
    if rep.p + rep.q:
        raise ValueError("the delta surrogate check is for the purely even group")
    m2 = 2 * rep.m
    pts = np.array(points if points is not None else [[0.3, -0.2], [0.0, 0.5], [-0.4, 0.1]])
    res = []
    vals = []
    for w in widths:
        d = SuperFunction.even(delta_surrogate(m2, 0, w), 0)
        conv = twisted_convolution(rep, f, d)
        v = np.array([conv.comps[0](x) for x in pts])
        vals.append(v)
        res.append(float(np.max(np.abs(v - np.array([f.comps[0](x) for x in pts])))))
    # error is O(w^2): extrapolate the last two
    w1, w2 = widths[-2], widths[-1]
    ext = (w1 ** 2 * vals[-1] - w2 ** 2 * vals[-2]) / (w1 ** 2 - w2 ** 2)
    res.append(float(np.max(np.abs(ext - np.array([f.comps[0](x) for x in pts])))))
    return res


# faithfulness -----------------------------------------------------------------------

def integrated_matrix(rep, f):
    """``pi(f) = int dx f(x) U(x)`` on the odd factor for ``m = 0``."""
    from .stonevn import integrated_rep
    return integrated_rep(rep.rep_data(), f, rep.p, rep.q)


def faithfulness_rank(rep):
    """Rank of ``f -> pi(f)`` on the monomial basis of functions on ``E0`` (``m = 0``)."""
    if rep.m:
        raise ValueError("faithfulness is checked at m = 0")
    n = n_odd(rep)
    rows = []
    for a in range(1 << n):
        f = SuperFunction(0, n, {a: GaussPolyPhase.constant(1.0, 0)})
        rows.append(integrated_matrix(rep, f).ravel())
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-9)), 1 << n
