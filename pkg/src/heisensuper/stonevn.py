"""A constructive Stone-von Neumann decomposition for finite odd-sector data.

Input is a ``RepData``: a Hilbert superspace with matrices for the odd
generators ``e_alpha`` of ``h_{p,q}`` (``omega = diag(+1^p, -1^q)``) and for
the central generator.  The decomposition projects with the integrated
Wigner function of two reference states, reads off the multiplicity space
with its own inner product, and assembles the intertwiner ``Phi``.  For
``m > 0`` the even sector is the classical Schrodinger factor and is
treated exactly with Gaussian functions (see ``classical_svn``).
"""

from dataclasses import dataclass, field

import numpy as np

from .gaussfun import GaussPolyPhase, SuperFunction, e0_odd_order, kappa
from .grassmann import GrassmannElement, GrassmannMatrix, degree
from .hilbertsuper import (HilbertSuper, fundamental_decomposition, is_superunitary,
                           superadjoint_matrix, tensor, tensor_operator)
from .schrod import (RepData, build_schrodinger, intertwiner_space, layout_for,
                     orthonormal_basis)
from .wigner import (classical_act, classical_kernel, inner, parity_op, reflect, state,
                     wigner, _integral)


def signature_of(data):
    w = np.diag(data.omega) if data.omega is not None else np.zeros(0)
    return int((w > 0).sum()), int((w < 0).sum())


def central_hbar(data, tol=1e-10):
    """``hbar`` from the spectrum of ``-i pi_*(Z)``, which must be a single real value."""
    Z = data.Z if getattr(data, "Z", None) is not None else 1j * data.hbar * np.eye(data.space.dim)
    ev = np.linalg.eigvals(-1j * np.asarray(Z))
    h = ev.mean()
    if np.abs(ev - h).max() > tol * max(1.0, abs(h)) or abs(h.imag) > tol * max(1.0, abs(h)):
        raise ValueError("central character is not a real scalar")
    return float(h.real)


def check_axioms(data, tol=1e-10):
    """Residuals of the infinitesimal axioms: skewness and Clifford brackets."""
    h = data.space
    d = h.dim
    w = data.omega
    skew = max((np.abs(superadjoint_matrix(A, 1, h, h) + A).max() for A in data.odd_gens), default=0.0)
    br = 0.0
    for a, A in enumerate(data.odd_gens):
        for b, B in enumerate(data.odd_gens):
            br = max(br, np.abs(A @ B + B @ A - 1j * data.hbar * w[a, b] * np.eye(d)).max())
    return {"skew": float(skew), "brackets": float(br)}


# integrated representation -----------------------------------------------------

def point_operator(data, p=None, q=None):
    """``pi(x)`` on the odd sector as a Grassmann matrix in normal-form coordinates."""
    if p is None:
        p, q = signature_of(data)
    eps, lay = layout_for(p, q, None if (p + q) % 2 == 0 else data.space.parity)
    M, _ = orthonormal_basis(lay, eps)
    n = lay.n_ext
    A = [sum(M[k, a] * data.odd_gens[a] for a in range(M.shape[1])) for k in range(M.shape[0])]
    grading = data.space.grading
    X = GrassmannMatrix({}, grading, n)

    def add(gen, mat):
        nonlocal X
        X = X + GrassmannMatrix({1 << gen: mat}, grading, n)

    for i in range(lay.r):
        add(lay.q(i), A[i])
        add(lay.p(i), A[lay.r + i])
    for a in range(lay.s):
        re, im = A[2 * lay.r + a], A[2 * lay.r + lay.s + a]
        # xi_a = (zeta + zbar)/2, xi_{a+s} = (zeta - zbar)/(2i)
        add(lay.zeta(a), (re - 1j * im) / 2)
        add(lay.zbar(a), (re + 1j * im) / 2)
    if lay.tau is not None:
        add(lay.tau_ext, A[-1])
    d = data.space.dim
    E = GrassmannMatrix.constant(np.eye(d), grading, n)
    term = E
    for k in range(1, n + 2):
        term = (term @ X) * (1 / k)
        if term.norm() == 0:
            break
        E = E + term
    return E, lay


def integrated_rep(data, f, p=None, q=None):
    """``pi(f) = int dx f(x) pi(x)`` for a function on ``E0`` with ``m = 0``."""
    if f.m:
        raise ValueError("integrated_rep works on the odd sector; use classical_svn for m > 0")
    U, lay = point_operator(data, p, q)
    fe = GrassmannElement({a: _integral(g) for a, g in f.comps.items()}, lay.n_ext)
    comps = U.lmul(fe).comps
    from .grassmann import dderiv
    for i in e0_odd_order(lay.r, lay.s):
        comps = dderiv(comps, i)
    out = comps.get(0, np.zeros((data.space.dim, data.space.dim), complex))
    return (2j) ** lay.s * out


# projector states ----------------------------------------------------------------

def select_projector_states(rep):
    """``(phi_P, psi_P)`` for a Schrodinger representation, built from ``psi_P = 1``.

    ``phi_P = b J psi_P`` with ``conj(b) kappa <J psi_P, psi_P> = 1``; the
    inner product is antilinear in its first slot.
    """
    if (rep.p + rep.q) % 2:
        raise ValueError("projector states need p + q even")
    m = rep.m
    g = GaussPolyPhase.gaussian(np.eye(m) * 0.5) if m else GaussPolyPhase.constant(1.0, 0)
    psi = state(rep, {0: g})
    J = rep.space.J
    Jpsi = state(rep, {int(b): g * J[b, 0] for b in np.flatnonzero(np.abs(J[:, 0]) > 1e-14)})
    k = kappa(rep.m, rep.r, rep.s, rep.eps, rep.hbar)
    norm = k * inner(rep, Jpsi, psi)
    if abs(norm) < 1e-12:
        raise ArithmeticError("degenerate normalization, choose another seed state")
    phi = SuperFunction(m, psi.n, {a: f * (1 / np.conj(norm)) for a, f in Jpsi.comps.items()})
    return phi, psi


def projector_conditions(rep, phi, psi, tol=1e-12):
    """Residuals of the five conditions on ``(phi_P, psi_P)``."""
    from .wigner import M_op, depends_on_zeta, parity_of, superfunction_distance
    k = kappa(rep.m, rep.r, rep.s, rep.eps, rep.hbar)
    out = {
        "M_phi": superfunction_distance(M_op(phi), phi),
        "M_psi": superfunction_distance(M_op(psi), psi),
        "deg_phi": parity_of(phi) == rep.r % 2,
        "deg_psi": parity_of(psi) == 0,
        "norm": abs(k * inner(rep, phi, psi) - 1),
        "no_zeta": not (depends_on_zeta(rep, phi) or depends_on_zeta(rep, psi)),
    }
    return out


# decomposition -------------------------------------------------------------------

@dataclass
class SvnDecomposition:
    ProjP: np.ndarray
    Vop: np.ndarray
    Vop2: np.ndarray
    basis: np.ndarray
    HR: HilbertSuper
    Phi: np.ndarray
    source: HilbertSuper
    schrod: object
    hbar: float
    report: dict = field(default_factory=dict)

    @property
    def multiplicity(self):
        return self.HR.dim


def _graded_image(P, grading, tol=1e-10):
    """Homogeneous basis of the image of a homogeneous operator."""
    cols, grade = [], []
    d = len(grading)
    for g in (0, 1):
        idx = np.flatnonzero(grading == g)
        if len(idx) == 0:
            continue
        u, sv, _ = np.linalg.svd(P[idx, :])
        scale = max(1.0, np.abs(P).max())
        for c in u[:, sv > tol * scale].T:
            v = np.zeros(d, complex)
            v[idx] = c
            cols.append(v)
            grade.append(g)
    if not cols:
        return np.zeros((d, 0), complex), np.zeros(0, int)
    return np.array(cols).T, np.array(grade)


def svn_decompose(data, tol=1e-10, literal=False):
    """Decompose ``data`` (``m = 0`` odd sector, ``p + q`` even) as Schrodinger times ``H_R``.

    The multiplicity space ``H_R = Im P`` carries ``<v, w>_R = s <V v, w>``
    with ``s = (-1)^{r (sigma + 1)}``; this is the sign that makes ``Phi``
    superunitary, and ``Phi(phi (x) v) = pi(f_phi) v`` without a sign.
    ``literal=True`` switches to ``(-1)^{r sigma}`` and to an extra factor
    ``(-1)^{|phi|}`` in ``Phi``; kept for comparison.
    """
    hbar = central_hbar(data)
    if hbar == 0:
        raise ValueError("the centre acts trivially")
    p, q = signature_of(data)
    if (p + q) % 2:
        raise ValueError("odd p + q: apply extend_odd_rep first")
    rep = build_schrodinger(0, p, q, hbar)
    k = kappa(0, rep.r, rep.s, rep.eps, hbar)
    phiP, psiP = select_projector_states(rep)
    h = data.space
    sigma = h.parity
    P = integrated_rep(data, wigner(rep, phiP, psiP), p, q)
    V = k * integrated_rep(data, wigner(rep, phiP, phiP), p, q)
    V2 = -integrated_rep(data, wigner(rep, psiP, psiP), p, q) / k
    B, grade = _graded_image(P, h.grading, tol)
    sR = (-1) ** (rep.r * sigma) if literal else (-1) ** (rep.r * (sigma + 1))
    GR = sR * (V @ B).conj().T @ h.gram @ B
    HR = HilbertSuper(grade, (sigma + rep.r) % 2, GR)
    src = tensor(rep.space, HR, with_J=False)
    # Phi(phi (x) v) = pi(f_phi) v,  f_phi(x) = V(phi_P, phi)(-x)
    dS, dR = rep.space.dim, HR.dim
    Phi = np.zeros((h.dim, dS * dR), complex)
    for i in range(dS):
        phi = state(rep, {i: 1.0})
        f = reflect(rep, wigner(rep, phiP, phi))
        T = integrated_rep(data, f, p, q)
        if literal:
            T = T * (-1) ** degree(i)
        for j in range(dR):
            Phi[:, i * dR + j] = T @ B[:, j]
    dec = SvnDecomposition(P, V, V2, B, HR, Phi, src, rep, hbar)
    dec.report = svn_report(dec, data)
    return dec


def svn_report(dec, data):
    P, V, V2 = dec.ProjP, dec.Vop, dec.Vop2
    h = data.space
    rep = dec.schrod
    Pd = superadjoint_matrix(P, 0, h, h)
    rep_ops = rep.odd_gens
    tens = [tensor_operator(A, np.eye(dec.HR.dim), 0, rep.space.grading) for A in rep_ops]
    inter = max((np.abs(dec.Phi @ T - A @ dec.Phi).max()
                 for T, A in zip(tens, data.odd_gens)), default=0.0)
    out = {"multiplicity": dec.HR.dim, "hbar": dec.hbar,
           "projector": float(np.abs(P @ P - P).max()),
           "intertwining": float(inter)}
    square = dec.Phi.shape[0] == dec.Phi.shape[1]
    if square and dec.HR.dim:
        ad = superadjoint_matrix(dec.Phi, 0, dec.source, h)
        out["superunitary_residual"] = float(max(np.abs(ad @ dec.Phi - np.eye(len(ad))).max(),
                                                 np.abs(dec.Phi @ ad - np.eye(h.dim)).max()))
    else:
        out["superunitary_residual"] = float("inf")
    out["superunitary"] = out["superunitary_residual"] <= 1e-10
    try:
        out["HR_signature"] = list(fundamental_decomposition(dec.HR)[1]) if dec.HR.dim else []
    except ValueError:
        out["HR_signature"] = None
    if rep.r % 2:
        out["odd_r"] = {
            "PPdag": float(max(np.abs(P @ Pd).max(), np.abs(Pd @ P).max())),
            "VV2": float(np.abs(V @ V2 - Pd).max()),
            "V2V": float(np.abs(V2 @ V - P).max()),
            "V_sq": float(max(np.abs(V @ V).max(), np.abs(V2 @ V2).max())),
            "V_dag": float(np.abs(superadjoint_matrix(V, 1, h, h) - V).max()),
            "V2_dag": float(np.abs(superadjoint_matrix(V2, 1, h, h) + V2).max()),
        }
    return out


def projector_identity_check(data, dec):
    """``P pi(y) P = kappa V(phi_P, psi_P)(y) P`` at a generic odd point ``y``.

    The coordinates of ``y`` are free Grassmann generators, so the identity
    is checked coefficient by coefficient.
    """
    rep = dec.schrod
    p, q = signature_of(data)
    phiP, psiP = select_projector_states(rep)
    U, _ = point_operator(data, p, q)
    W = wigner(rep, phiP, psiP)
    k = kappa(0, rep.r, rep.s, rep.eps, rep.hbar)
    P = dec.ProjP
    worst = 0.0
    for g in set(U.comps) | set(W.comps):
        lhs = P @ U.comps.get(g, 0 * P) @ P
        w = _integral(W.comps[g]) if g in W.comps else 0.0
        worst = max(worst, np.abs(lhs - k * w * P).max())
    return float(worst)


def phi_on_psiP(dec):
    """``max |Phi(psi_P (x) v) - v|`` over the basis of ``H_R``."""
    dR = dec.HR.dim
    cols = dec.Phi[:, :dR]   # psi_P is the basis state with mask 0
    return float(np.abs(cols - dec.basis).max()) if dR else 0.0


def translation_check(data, f, p=None, q=None, side="right"):
    """Covariance of the integrated representation at a generic odd point ``y``.

    ``side="right"``: ``pi(f) pi(y) = pi(exp(i hbar/2 omega(., y)) f(. - y))``;
    ``side="left"``:  ``pi(y) pi(f) = pi(exp(i hbar/2 omega(y, .)) f(. - y))``.
    """
    from .grassmann import dderiv, dmul, dsubstitute
    from .wigner import _bilinear_phase
    if p is None:
        p, q = signature_of(data)
    U, lay = point_operator(data, p, q)
    n = lay.n_ext
    grading = data.space.grading
    pf = GrassmannMatrix.constant(integrated_rep(data, f, p, q), grading, 2 * n)
    Uy = GrassmannMatrix({g << n: a for g, a in U.comps.items()}, grading, 2 * n)
    lhs = (pf @ Uy if side == "right" else Uy @ pf).comps
    # g(x, y) on 2n generators: x low, y high
    shift = {i: {1 << i: 1.0, 1 << (n + i): -1.0} for i in range(n)}
    fxy = dsubstitute({a: _integral(h) for a, h in f.comps.items()}, shift)
    eps = formula_eps_of(lay, p, q)
    a_, b_ = (0, n) if side == "right" else (n, 0)
    od = [(a_ + lay.q(i), b_ + lay.p(i), 1.0) for i in range(lay.r)]
    od += [(a_ + lay.p(i), b_ + lay.q(i), 1.0) for i in range(lay.r)]
    for a in range(lay.s):
        od += [(a_ + lay.zeta(a), b_ + lay.zbar(a), eps / 2),
               (a_ + lay.zbar(a), b_ + lay.zeta(a), eps / 2)]
    ph = _bilinear_phase(0, 2 * n, [], od, 0.5j * data.hbar)
    gxy = dmul({a: _integral(h) for a, h in ph.comps.items()}, fxy)
    Ux = GrassmannMatrix(dict(U.comps), grading, 2 * n)
    out = Ux.lmul(GrassmannElement(gxy, 2 * n)).comps
    for i in e0_odd_order(lay.r, lay.s):
        out = dderiv(out, i)
    rhs = {g: (2j) ** lay.s * a for g, a in out.items()}
    worst = 0.0
    for g in set(lhs) | set(rhs):
        worst = max(worst, np.abs(lhs.get(g, 0) - rhs.get(g, 0)).max())
    return float(worst)


def covariance_check(data, f, p=None, q=None):
    return translation_check(data, f, p, q, "right")


def formula_eps_of(lay, p, q):
    from .schrod import formula_eps
    return formula_eps(p, q)


def delta_check(data, p=None, q=None):
    """``pi(delta) = 1`` for the odd delta function at the origin.

    In odd variables the delta at ``0`` is the top monomial scaled to unit
    integral; this is the exact limit of a narrowing bump.
    """
    if p is None:
        p, q = signature_of(data)
    eps, lay = layout_for(p, q, None if (p + q) % 2 == 0 else data.space.parity)
    n = lay.n_ext
    top = (1 << n) - 1
    f = SuperFunction(0, n, {top: GaussPolyPhase.constant(1.0, 0)})
    from .grassmann import dderiv
    c = {top: 1.0}
    for i in e0_odd_order(lay.r, lay.s):
        c = dderiv(c, i)
    norm = (2j) ** lay.s * c.get(0, 0)
    f = SuperFunction(0, n, {top: GaussPolyPhase.constant(1 / norm, 0)})
    return float(np.abs(integrated_rep(data, f, p, q) - np.eye(data.space.dim)).max())


def commutant_check(data, dec, seed=0):
    """A random ``Phi (1 (x) B) Phi^{-1}`` commutes with the action and factors back as ``1 (x) B``."""
    rng = np.random.default_rng(seed)
    dS, dR = dec.schrod.space.dim, dec.HR.dim
    B = np.zeros((dR, dR), complex)
    g = dec.HR.grading
    for a in (0, 1):
        idx = np.flatnonzero(g == a)
        B[np.ix_(idx, idx)] = rng.normal(size=(len(idx), len(idx))) + 1j * rng.normal(size=(len(idx), len(idx)))
    Phi_inv = np.linalg.inv(dec.Phi)
    A = dec.Phi @ np.kron(np.eye(dS), B) @ Phi_inv
    comm = max((np.abs(A @ X - X @ A).max() for X in data.odd_gens), default=0.0)
    # recover A_R from the commutant element alone: blocks of Phi^{-1} A Phi
    Y = Phi_inv @ A @ dec.Phi
    AR = Y[:dR, :dR]
    fact = np.abs(Y - np.kron(np.eye(dS), AR)).max()
    return {"commutes": float(comm), "factorizes": float(fact), "recovered": float(np.abs(AR - B).max())}


def conjugated_copy(rep, HRdim_or_space, seed=0, parity=0):
    """Schrodinger tensor a random ``H_R``, conjugated by a random superunitary.

    Returns ``(RepData, W)``; ``W`` maps ``H_S (x) H_R`` onto the new space.
    """
    rng = np.random.default_rng(seed)
    if isinstance(HRdim_or_space, HilbertSuper):
        HR = HRdim_or_space
    else:
        HR = random_hilbert_super(rng, HRdim_or_space, parity)
    src = tensor(rep.space, HR)
    gens = [tensor_operator(A, np.eye(HR.dim), 0, rep.space.grading) for A in rep.odd_gens]
    # random even invertible W; the target gram makes it superunitary by construction
    d = src.dim
    W = np.zeros((d, d), complex)
    for g in (0, 1):
        idx = np.flatnonzero(src.grading == g)
        W[np.ix_(idx, idx)] = rng.normal(size=(len(idx), len(idx))) + 1j * rng.normal(size=(len(idx), len(idx))) + 2 * np.eye(len(idx))
    Wi = np.linalg.inv(W)
    G = Wi.conj().T @ src.gram @ Wi
    tgt = HilbertSuper(src.grading, src.parity, G)
    new = [W @ A @ Wi for A in gens]
    data = RepData(tgt, new, rep.hbar, rep.alg.omega_odd)
    data.Z = 1j * rep.hbar * np.eye(d)
    return data, W, HR


def random_hilbert_super(rng, dim, parity):
    """Random nondegenerate Hilbert superspace of the given dimension and parity."""
    if parity:
        if dim % 2:
            raise ValueError("parity 1 needs even dimension")
        h = dim // 2
        grading = np.array([0] * h + [1] * h)
        X = rng.normal(size=(h, h)) + 1j * rng.normal(size=(h, h)) + 2 * np.eye(h)
        G = np.zeros((dim, dim), complex)
        G[:h, h:] = X
        # superhermitian: G_10 = conj(G_01)^T  (sign (-1)^{0*1} = +1)
        G[h:, :h] = X.conj().T
        return HilbertSuper(grading, 1, G)
    d1 = int(rng.integers(0, dim + 1))
    grading = np.array([0] * (dim - d1) + [1] * d1)
    G = np.zeros((dim, dim), complex)
    d0 = dim - d1
    if d0:
        X = rng.normal(size=(d0, d0)) + 1j * rng.normal(size=(d0, d0))
        H = X + X.conj().T
        w, v = np.linalg.eigh(H)
        w = np.where(np.abs(w) < 0.5, 0.5 * np.sign(w + 1e-300), w)
        G[:d0, :d0] = v @ np.diag(w) @ v.conj().T
    if d1:
        X = rng.normal(size=(d1, d1)) + 1j * rng.normal(size=(d1, d1))
        H = X + X.conj().T
        w, v = np.linalg.eigh(H)
        w = np.where(np.abs(w) < 0.5, 0.5 * np.sign(w + 1e-300), w)
        G[d0:, d0:] = 1j * (v @ np.diag(w) @ v.conj().T)
    return HilbertSuper(grading, 0, G)


# odd case ----------------------------------------------------------------------------

def extend_odd_rep(data, tol=1e-10):
    """Add one odd generator ``E`` proportional to ``[P, Gamma]``.

    ``Gamma`` is the ordered product of the odd generators and ``P`` the
    parity operator.  ``Gamma`` commutes with every generator (odd count),
    so ``[P, Gamma] = 2 P Gamma`` anticommutes with all of them.  Of
    ``(i/2)[P, Gamma]`` and ``(1/2)[P, Gamma]`` the skew one is kept and
    rescaled by a positive factor to ``|E^2| = |hbar|/2``; the sign of
    ``E^2`` decides whether the new direction is positive or negative.
    """
    p, q = signature_of(data)
    n = p + q
    if n % 2 == 0:
        raise ValueError("extend_odd_rep needs p + q odd")
    h = data.space
    d = h.dim
    Gam = np.eye(d, dtype=complex)
    for A in data.odd_gens:
        Gam = Gam @ A
    C = h.P @ Gam - Gam @ h.P
    # (i/2)[P, Gamma] or (1/2)[P, Gamma], whichever is skew
    cands = [0.5j * C, 0.5 * C]
    skew = [np.abs(superadjoint_matrix(X, 1, h, h) + X).max() for X in cands]
    E = cands[int(np.argmin(skew))]
    if min(skew) > tol * max(1.0, np.abs(E).max()):
        raise ArithmeticError("no skew normalization of the extension generator")
    c = (E @ E)[0, 0]
    E = E * np.sqrt(abs(data.hbar) / 2 / abs(c))
    sign = np.real((E @ E)[0, 0] / (0.5j * data.hbar))
    gens = list(data.odd_gens)
    if sign > 0:
        gens.insert(p, E)
        omega = np.diag([1.0] * (p + 1) + [-1.0] * q)
    else:
        gens.append(E)
        omega = np.diag([1.0] * p + [-1.0] * (q + 1))
    out = RepData(h, gens, data.hbar, omega, list(data.even_ops))
    out.Z = getattr(data, "Z", None)
    return out


def extension_report(data, ext):
    """Bracket and adjointness residuals of an extension, plus the new signature."""
    p, q = signature_of(ext)
    E = ext.odd_gens[signature_of(data)[0]] if p > signature_of(data)[0] else ext.odd_gens[-1]
    h = data.space
    d = h.dim
    comm = max(np.abs(E @ A + A @ E).max() for A in data.odd_gens)
    blocks = {}
    if len(data.odd_gens) == 1:
        A1 = data.odd_gens[0]
        ev = np.flatnonzero(h.grading == 0)
        od = np.flatnonzero(h.grading == 1)
        Ab = A1[np.ix_(ev, od)]
        Bb = A1[np.ix_(od, ev)]
        w = data.omega[0, 0]
        blocks["AB"] = float(np.abs(2 * Ab @ Bb - 1j * data.hbar * w * np.eye(len(ev))).max())
        blocks["BA"] = float(np.abs(2 * Bb @ Ab - 1j * data.hbar * w * np.eye(len(od))).max())
    ax = check_axioms(ext)
    return {"signature": [p, q], "anticommutes": float(comm), **ax, **blocks}


# strong superunitary dual -----------------------------------------------------------------

def C_j(j):
    """One-dimensional Hilbert superspace with ``<e, e> = i^j``."""
    return HilbertSuper([j % 2], 0, np.array([[1j ** j]]))


def schrod_times_Cj(m, p, q, hbar, sigma, j):
    rep = build_schrodinger(m, p, q, hbar, sigma)
    h = tensor(rep.space, C_j(j))
    gens = [tensor_operator(A, np.eye(1), 0, rep.space.grading) for A in rep.odd_gens]
    return RepData(h, gens, hbar, rep.alg.omega_odd)


def superunitary_equivalent(d1, d2, tol=1e-9):
    """Whether a superunitary intertwiner exists, and its witness."""
    if abs(d1.hbar - d2.hbar) > tol or d1.space.dim != d2.space.dim:
        return False, None
    if d1.space.parity != d2.space.parity:
        return False, None
    Ts = intertwiner_space(d1, d2, 0, tol)
    if not Ts:
        return False, None
    n = len(Ts)
    H = np.zeros((n, n), complex)
    for a in range(n):
        Ad = superadjoint_matrix(Ts[a], 0, d1.space, d2.space)
        for b in range(n):
            S = Ad @ Ts[b]
            c = S[0, 0]
            if np.abs(S - c * np.eye(len(S))).max() > 1e-8 * max(1.0, abs(c)):
                raise ArithmeticError("intertwiner product is not scalar")
            H[a, b] = c
    H = (H + H.conj().T) / 2
    w, v = np.linalg.eigh(H)
    if w[-1] <= tol:
        return False, None
    T = sum(v[k, -1] * Ts[k] for k in range(n)) / np.sqrt(w[-1])
    return bool(is_superunitary(T, d1.space, d2.space, 1e-8)), T


def dual_classify(m, p, q, candidates):
    """Equivalence table for ``candidates = [(hbar, sigma, j), ...]`` (Schrodinger times ``C_j``)."""
    if m:
        raise ValueError("the dual table is computed on the odd sector, m = 0")
    reps = [schrod_times_Cj(0, p, q, h, s, j) for h, s, j in candidates]
    table = []
    for a, ca in enumerate(candidates):
        for b, cb in enumerate(candidates):
            eq, T = superunitary_equivalent(reps[a], reps[b])
            scale = None
            if T is not None:
                scale = float(np.abs(T[np.abs(T) > 1e-12]).max())
            table.append({"a": list(ca), "b": list(cb), "equivalent": eq,
                          "predicted": dual_predicate(p, q, ca, cb),
                          "rule": dual_rule(p, q, ca, cb), "scale": scale})
    return table


def dual_predicate(p, q, ca, cb):
    """Predicted equivalence of Schrodinger times ``C_j`` labels ``(hbar, sigma, j)``."""
    h1, s1, j1 = ca
    h2, s2, j2 = cb
    if h1 != h2:
        return False
    if (p + q) % 2 == 0:
        return j1 == j2
    if s1 != s2:
        return False
    if j1 == j2:
        return True
    v = 1j ** (j1 + j2 - 1)
    return abs(v - (-1) ** q * np.sign(h1)) < 1e-12


def dual_rule(p, q, ca, cb):
    """Equivalence rule with the parity made explicit.

    For ``p + q`` odd the solver finds ``i^{j+j'-1} = (-1)^{q+sigma+1} sign(hbar)``;
    this agrees with ``dual_predicate`` for ``sigma = 1`` and is its negation
    for ``sigma = 0``, matching ``A^2 = (-1)^{sigma+q} i hbar/2``.
    """
    h1, s1, j1 = ca
    h2, s2, j2 = cb
    if (p + q) % 2 == 0 or h1 != h2 or s1 != s2 or j1 == j2:
        return dual_predicate(p, q, ca, cb)
    v = 1j ** (j1 + j2 - 1)
    return abs(v - (-1) ** (q + s1 + 1) * np.sign(h1)) < 1e-12


# classical factor (m > 0) -----------------------------------------------------------------

def _cl_wigner(f, g, hbar):
    """``V(f, g)(q, p) = <f, U_0(q, p) g>`` on ``R^{2m}``."""
    m = f.m
    integrand = f.conj().embed(3 * m, list(range(m))) * classical_kernel(g, hbar)
    return integrand.integrate(list(range(m)))


def _cl_integrated(F, g, hbar):
    """``(int dq dp F(q, p) U_0(q, p)) g`` as a function on ``R^m``."""
    m = g.m
    K = classical_kernel(g, hbar)
    Fe = F.embed(3 * m, list(range(m, 3 * m)))
    return (Fe * K).integrate(list(range(m, 3 * m)))


def _l2(f, g):
    return (f.conj() * g).total()


def classical_svn(m, hbar, family):
    """Classical factor of the decomposition, checked exactly on a test family.

    Uses ``psi_P = phi_P`` a normalized Gaussian with ``kappa_cl <phi_P, psi_P> = 1``.
    Returns residuals of ``P^2 = P``, of the rank-one property, and of the
    isometry ``<Phi f, Phi g> = <f, g> <u, u>_R`` with ``u`` spanning ``Im P``.
    """
    kc = (2 * np.pi / abs(hbar)) ** m
    g0 = GaussPolyPhase.gaussian(np.eye(m) * 0.5)
    c = 1 / np.sqrt(kc * _l2(g0, g0).real)
    phiP = g0 * c
    VP = _cl_wigner(phiP, phiP, hbar)
    # P = pi(V); image spanned by P g0
    u = _cl_integrated(VP, g0, hbar)
    Pu = _cl_integrated(VP, u, hbar)
    proj = max(abs(Pu(x) - u(x)) for x in np.random.default_rng(1).normal(size=(5, m)))
    # <u, u>_R = kappa <pi(V(phi_P, phi_P)) u, u>
    uR = kc * _l2(_cl_integrated(VP, u, hbar), u)
    worst = 0.0
    phis = []
    for f in family:
        Ff = reflect_even(_cl_wigner(phiP, f, hbar))
        phis.append(_cl_integrated(Ff, u, hbar))
    for a, fa in enumerate(family):
        for b, fb in enumerate(family):
            lhs = _l2(phis[a], phis[b])
            rhs = _l2(fa, fb) * uR
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    # rank one: P f is proportional to u for each f
    rank = 0.0
    for f in family:
        Pf = _cl_integrated(VP, f, hbar)
        c = _l2(u, Pf) / _l2(u, u)
        rank = max(rank, max(abs(Pf(x) - c * u(x)) for x in np.random.default_rng(2).normal(size=(4, m))))
    return {"projector": float(proj), "rank_one": float(rank), "isometry": float(worst),
            "uR": [complex(uR).real, complex(uR).imag]}


def reflect_even(F):
    return F.pullback(-np.eye(F.m))


def hermite_family(m, count=3):
    """Gaussian-Hermite test states on ``R^m``."""
    out = []
    for k in range(count):
        nu = tuple([k] + [0] * (m - 1))
        out.append(GaussPolyPhase.gaussian(np.eye(m) * 0.5, None, 1.0, nu))
    out.append(GaussPolyPhase.gaussian(np.eye(m) * 0.7, np.full(m, 0.3 + 0.2j)))
    return out


def svn_decompose_m(m, data, family=None):
    """Decomposition of ``U_0 (x) data`` for ``m > 0``: odd factor plus classical factor."""
    dec = svn_decompose(data)
    fam = family if family is not None else hermite_family(m)
    cl = classical_svn(m, dec.hbar, fam)
    dec.report["classical"] = cl
    return dec
