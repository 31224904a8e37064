"""Finite-dimensional Hilbert superspaces.

A space is a graded basis (a parity per basis vector), a parity ``sigma``
of the inner product and its gram matrix ``G[i, j] = <e_i, e_j>``, which is
antilinear in the first slot.  The fundamental symmetry ``J`` is built from
eigenprojectors, so it is canonical and reruns agree bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

EIG_TOL = 1e-10


class DegenerateError(ValueError):
    """Gram matrix is singular within tolerance."""


def parity_matrix(grading):
    return np.diag(1.0 - 2.0 * np.asarray(grading)).astype(complex)


def operator_degree(a, grading_dom, grading_cod, tol=1e-13):
    """Degree of a homogeneous matrix, or None if it mixes degrees."""
    a = np.asarray(a)
    gd = np.asarray(grading_dom)
    gc = np.asarray(grading_cod)
    flip = (gc[:, None] + gd[None, :]) % 2
    scale = max(np.abs(a).max(), 1.0)
    even = np.abs(a[flip == 0]).max(initial=0) > tol * scale
    odd = np.abs(a[flip == 1]).max(initial=0) > tol * scale
    if even and odd:
        return None
    return 1 if odd else 0


@dataclass
class HilbertSuper:
    """Graded space with a homogeneous superhermitian inner product."""

    grading: np.ndarray
    parity: int
    gram: np.ndarray
    _J: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.grading = np.asarray(self.grading, dtype=int)
        self.gram = np.asarray(self.gram, dtype=complex)
        self.parity = int(self.parity) % 2

    @property
    def dim(self):
        return len(self.grading)

    @property
    def dims(self):
        d1 = int(self.grading.sum())
        return (self.dim - d1, d1)

    @property
    def P(self):
        return parity_matrix(self.grading)

    @property
    def J(self):
        if self._J is None:
            self._J, _ = fundamental_decomposition(self)
        return self._J

    def inner(self, x, y):
        return np.conj(x) @ self.gram @ y

    def check(self, tol=1e-10):
        """Raise if the gram is not superhermitian, homogeneous and invertible."""
        g = self.grading
        G = self.gram
        scale = max(np.abs(G).max(), 1.0)
        signs = (-1.0) ** np.outer(g, g)
        if np.abs(G.conj() - signs * G.T).max() > tol * scale:
            raise ValueError("gram is not superhermitian")
        wrong = (g[:, None] + g[None, :]) % 2 != self.parity
        if np.abs(G[wrong]).max(initial=0) > tol * scale:
            raise ValueError("gram is not homogeneous of the stated parity")
        sv = np.linalg.svd(G, compute_uv=False)
        if sv.min() <= EIG_TOL * sv.max():
            raise DegenerateError("gram is degenerate")

    def to_json(self):
        return {"dims": list(self.dims), "parity": self.parity,
                "grading": self.grading.tolist(),
                "gram": [[[z.real, z.imag] for z in row] for row in self.gram]}

    @classmethod
    def from_json(cls, data):
        rows = data["gram"]
        gram = np.array([[complex(*z) if isinstance(z, (list, tuple)) else complex(z)
                          for z in row] for row in rows])
        if "grading" in data:
            grading = data["grading"]
        else:
            d0, d1 = data["dims"]
            grading = [0] * d0 + [1] * d1
        return cls(grading, data["parity"], gram)


@dataclass
class GradedOperator:
    matrix: np.ndarray
    degree: int
    domain: HilbertSuper
    codomain: HilbertSuper

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        found = operator_degree(self.matrix, self.domain.grading, self.codomain.grading)
        if found is None or (found != self.degree and np.abs(self.matrix).max() > 0):
            raise ValueError("matrix blocks do not match the declared degree")

    def __matmul__(self, other):
        return GradedOperator(self.matrix @ other.matrix, (self.degree + other.degree) % 2,
                              other.domain, self.codomain)


def _hermitian_split(form, tol):
    """Eigenvectors of a Hermitian form, split by sign of eigenvalue."""
    form = (form + form.conj().T) / 2
    w, v = np.linalg.eigh(form)
    scale = np.abs(w).max(initial=0.0)
    if len(w) and np.abs(w).min() <= tol * max(scale, 1e-300):
        raise DegenerateError("inner product is degenerate")
    return v[:, w > 0], v[:, w < 0]


def _projector(vectors, dim, embed):
    if vectors.shape[1] == 0:
        return np.zeros((dim, dim), complex)
    full = embed @ vectors
    return full @ full.conj().T


def fundamental_decomposition(h, tol=EIG_TOL):
    """Canonical fundamental symmetry ``J`` and signature of ``h``.

    Returns ``(J, sgn)`` with ``sgn = (dim H[1], dim H[i], dim H[-1], dim H[-i])``.
    """
    h.check()
    G = h.gram
    d = h.dim
    g = h.grading
    if h.parity == 0:
        ev = np.flatnonzero(g == 0)
        od = np.flatnonzero(g == 1)
        E0 = np.eye(d, dtype=complex)[:, ev]
        E1 = np.eye(d, dtype=complex)[:, od]
        pos0, neg0 = _hermitian_split(G[np.ix_(ev, ev)], tol)
        # <x,x> in i R_+  <=>  -i<x,x> > 0
        pos1, neg1 = _hermitian_split(-1j * G[np.ix_(od, od)], tol)
        P1 = _projector(pos0, d, E0)
        Pm1 = _projector(neg0, d, E0)
        Pi = _projector(pos1, d, E1)
        Pmi = _projector(neg1, d, E1)
        J = P1 - 1j * Pi - Pm1 + 1j * Pmi
        sgn = (pos0.shape[1], pos1.shape[1], neg0.shape[1], neg1.shape[1])
    else:
        if h.dims[0] != h.dims[1]:
            raise ValueError("parity-1 space needs equal even and odd dimensions")
        pos, neg = _hermitian_split(G, tol)
        I = np.eye(d, dtype=complex)
        J = _projector(pos, d, I) - _projector(neg, d, I)
        sgn = (pos.shape[1], 0, neg.shape[1], 0)
    _check_fundamental(h, J)
    h._J = J
    return J, sgn


def _check_fundamental(h, J, tol=1e-9):
    G = h.gram
    scale = max(np.abs(G).max(), 1.0)
    I = np.eye(h.dim)
    P = h.P
    if np.abs(np.linalg.matrix_power(J, 4) - I).max() > tol:
        raise ArithmeticError("J^4 != 1")
    if np.abs(J.conj().T @ G @ J - G).max() > tol * scale:
        raise ArithmeticError("J is not an isometry")
    GJ = G @ J
    if np.abs(GJ - GJ.conj().T).max() > tol * scale or np.linalg.eigvalsh((GJ + GJ.conj().T) / 2).min() <= 0:
        raise ArithmeticError("<-,J-> is not positive definite")
    target = I if h.parity == 1 else P
    if np.abs(J @ J - target).max() > tol:
        raise ArithmeticError("J^2 != P^(sigma+1)")
    if np.abs(superadjoint_matrix(J, h.parity, h, h) - J @ P).max() > tol:
        raise ArithmeticError("J^dagger != J P")


def signature(h):
    return fundamental_decomposition(h)[1]


def superadjoint_matrix(a, degree, dom, cod):
    """Matrix of ``T^dagger`` for ``T: dom -> cod`` of the given degree.

    Defined by ``<T^dagger x, y> = (-1)^(|T||x|) <x, T y>``.
    """
    D = np.diag((-1.0) ** (degree * cod.grading))
    lhs = D @ cod.gram @ np.asarray(a) @ np.linalg.inv(dom.gram)
    return lhs.conj().T


def superadjoint(T):
    if not isinstance(T, GradedOperator):
        raise TypeError("superadjoint expects a GradedOperator")
    m = superadjoint_matrix(T.matrix, T.degree, T.domain, T.codomain)
    return GradedOperator(m, T.degree, T.codomain, T.domain)


def is_superunitary(phi, dom, cod, tol=1e-10):
    a = np.asarray(phi, dtype=complex)
    if operator_degree(a, dom.grading, cod.grading, tol) != 0:
        return False
    if a.shape[0] != a.shape[1]:
        return False
    ad = superadjoint_matrix(a, 0, dom, cod)
    return (np.abs(ad @ a - np.eye(dom.dim)).max() <= tol
            and np.abs(a @ ad - np.eye(cod.dim)).max() <= tol)


def tensor_grading(g1, g2):
    return ((np.asarray(g1)[:, None] + np.asarray(g2)[None, :]) % 2).ravel()


def tensor(h1, h2, with_J=True):
    """Graded tensor product with its sign-twisted inner product.

    Basis vector ``e_i (x) f_j`` sits at index ``i * dim(h2) + j``.
    """
    s1, s2 = h1.parity, h2.parity
    g1, g2 = h1.grading, h2.grading
    # sign (-1)^(s1 s2 + |x2||y1|) with x2 = f_j, y1 = e_k
    sign = (-1.0) ** (s1 * s2 + np.outer(g2, g1))        # [j, k]
    G = np.einsum("ik,jl,jk->ijkl", h1.gram, h2.gram, sign)
    d = h1.dim * h2.dim
    h = HilbertSuper(tensor_grading(g1, g2), s1 + s2, G.reshape(d, d))
    if with_J:
        # J(x1 (x) x2) = (-1)^(s1 s2 + (s1+|x1|)|x2|) J1 x1 (x) J2 x2
        sgn = (-1.0) ** (s1 * s2 + np.outer(s1 + g1, g2).ravel())
        h._J = np.kron(h1.J, h2.J) @ np.diag(sgn)
    return h


def tensor_operator(a, b, deg_b, grading_a_dom):
    """Matrix of ``A (x) B`` with the Koszul rule ``(A(x)B)(x(x)y) = (-1)^{|B||x|} Ax (x) By``."""
    sign = (-1.0) ** (deg_b * np.asarray(grading_a_dom))
    return np.kron(np.asarray(a) @ np.diag(sign), b)


def direct_sum(h1, h2):
    if h1.parity != h2.parity:
        raise ValueError("direct sum needs equal parities")
    d1, d2 = h1.dim, h2.dim
    G = np.zeros((d1 + d2, d1 + d2), complex)
    G[:d1, :d1] = h1.gram
    G[d1:, d1:] = h2.gram
    h = HilbertSuper(np.concatenate([h1.grading, h2.grading]), h1.parity, G)
    J = np.zeros_like(G)
    J[:d1, :d1] = h1.J
    J[d1:, d1:] = h2.J
    h._J = J
    return h


def dual(h):
    """Antidual space; the functional ``<x, ->`` has degree ``sigma + |x|``."""
    return HilbertSuper((h.grading + h.parity) % 2, h.parity, h.gram.copy())


def exterior_berezin(n):
    """The Berezin inner product on ``wedge C^n`` in the monomial basis."""
    from .grassmann import merge_sign

    full = (1 << n) - 1
    d = 1 << n
    G = np.zeros((d, d), complex)
    for a in range(d):
        b = full ^ a
        G[a, b] = merge_sign(a, b)
    grading = [bin(a).count("1") % 2 for a in range(d)]
    return HilbertSuper(grading, n % 2, G)


def hodge(n):
    """Hodge-like ``J(xi^a) = eps(a) xi^(complement a)`` on ``wedge C^n``."""
    from .grassmann import merge_sign

    full = (1 << n) - 1
    d = 1 << n
    J = np.zeros((d, d), complex)
    for a in range(d):
        J[full ^ a, a] = merge_sign(a, full ^ a)
    return J
