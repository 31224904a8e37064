"""Complex Grassmann algebras on a fixed, finite set of generators.

An element is a dict ``mask -> coefficient`` where bit ``i`` of ``mask``
marks the generator ``xi_i``; monomials are stored in ascending generator
order.  The dict helpers at module level work for any coefficient type
that supports ``+``, ``*`` and multiplication by complex scalars, so the
same sign bookkeeping serves plain complex elements and super functions
with Gaussian coefficients.
"""

from math import factorial

import numpy as np

DEFAULT_N = 16
TOL = 1e-15


class BudgetError(ValueError):
    """Raised when a computation needs more generators than allowed."""


def degree(mask):
    return mask.bit_count()


def merge_sign(a, b):
    """Sign of sorting the monomial ``xi^a xi^b`` (disjoint masks)."""
    n = 0
    while b:
        low = b & -b
        n += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if n & 1 else 1


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# dict-level kernels -------------------------------------------------------

def dmul(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            if ma & mb:
                continue
            m = ma | mb
            v = ca * cb if merge_sign(ma, mb) > 0 else -(ca * cb)
            out[m] = out[m] + v if m in out else v
    return out


def dadd(a, b, sb=1):
    out = dict(a)
    for m, c in b.items():
        c = c if sb == 1 else sb * c
        out[m] = out[m] + c if m in out else c
    return out


def dscale(a, s):
    return {m: c * s for m, c in a.items()}


def dderiv(a, i):
    """Left derivative with respect to generator ``i``."""
    bit = 1 << i
    out = {}
    for m, c in a.items():
        if m & bit:
            below = (m & (bit - 1)).bit_count()
            out[m ^ bit] = c if below % 2 == 0 else -c
    return out


def dsubstitute(a, images):
    """Algebra homomorphism sending ``xi_i`` to ``images[i]``.

    ``images`` maps generator index to a complex dict; generators absent
    from it are fixed.  Coefficients of ``a`` multiply from the right.
    """
    out = {}
    cache = {}
    for m, c in a.items():
        if m not in cache:
            prod = {0: 1.0}
            for i in bits(m):
                prod = dmul(prod, images.get(i, {1 << i: 1.0}))
            cache[m] = prod
        for mm, v in cache[m].items():
            t = c * v
            out[mm] = out[mm] + t if mm in out else t
    return out


def dpermute(a, perm):
    """Relabel generators ``i -> perm[i]`` with the reordering sign."""
    out = {}
    for m, c in a.items():
        new = 0
        sign = 1
        for i in bits(m):
            j = perm[i]
            if (new >> (j + 1)).bit_count() % 2:
                sign = -sign
            new |= 1 << j
        out[new] = c if sign > 0 else -c
    return out


# complex elements ---------------------------------------------------------

class GrassmannElement:
    """Element of the complex Grassmann algebra on ``n`` generators."""

    __slots__ = ("coeffs", "n")

    def __init__(self, coeffs=None, n=DEFAULT_N):
        if n > 62:
            raise BudgetError(f"{n} generators exceed the supported budget")
        self.n = n
        top = 1 << n
        clean = {}
        for m, c in (coeffs or {}).items():
            m = int(m)
            if m >= top or m < 0:
                raise BudgetError(f"monomial {m:b} outside {n} generators")
            c = complex(c)
            if c != 0:
                clean[m] = c
        self.coeffs = clean

    @classmethod
    def scalar(cls, c, n=DEFAULT_N):
        return cls({0: c}, n)

    @classmethod
    def generator(cls, i, n=DEFAULT_N):
        if not 0 <= i < n:
            raise BudgetError(f"generator {i} outside budget {n}")
        return cls({1 << i: 1.0}, n)

    def _wrap(self, d):
        return GrassmannElement(d, self.n)

    def _coerce(self, other):
        if isinstance(other, GrassmannElement):
            if other.n != self.n:
                raise ValueError("generator counts differ")
            return other.coeffs
        return {0: complex(other)}

    def __add__(self, other):
        return self._wrap(dadd(self.coeffs, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(dadd(self.coeffs, self._coerce(other), -1))

    def __rsub__(self, other):
        return self._wrap(dadd(self._coerce(other), self.coeffs, -1))

    def __neg__(self):
        return self._wrap(dscale(self.coeffs, -1))

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return gr_mul(self, other)
        return self._wrap(dscale(self.coeffs, complex(other)))

    def __rmul__(self, other):
        return self._wrap(dscale(self.coeffs, complex(other)))

    def __truediv__(self, s):
        return self._wrap(dscale(self.coeffs, 1 / complex(s)))

    def __getitem__(self, mask):
        return self.coeffs.get(mask, 0j)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs):
            mono = "".join(f"x{i}" for i in bits(m)) or "1"
            parts.append(f"({self.coeffs[m]:.6g}){mono}")
        return " + ".join(parts)

    @property
    def max_degree(self):
        return max((degree(m) for m in self.coeffs), default=0)

    def even(self):
        return self._wrap({m: c for m, c in self.coeffs.items() if degree(m) % 2 == 0})

    def odd(self):
        return self._wrap({m: c for m, c in self.coeffs.items() if degree(m) % 2})

    def parity(self):
        """0 or 1 for homogeneous elements, None otherwise."""
        ps = {degree(m) % 2 for m in self.coeffs}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def deriv(self, i):
        return self._wrap(dderiv(self.coeffs, i))

    def substitute(self, images):
        return self._wrap(dsubstitute(self.coeffs, {i: g.coeffs for i, g in images.items()}))

    def norm(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def allclose(self, other, tol=1e-12):
        return (self - other).norm() <= tol

    def chop(self, tol=TOL):
        scale = max(self.norm(), 1.0)
        return self._wrap({m: c for m, c in self.coeffs.items() if abs(c) > tol * scale})

    def to_json(self):
        terms = [{"mask": m, "re": c.real, "im": c.imag}
                 for m, c in sorted(self.coeffs.items()) if c != 0]
        return {"n": self.n, "terms": terms}

    @classmethod
    def from_json(cls, data):
        return cls({t["mask"]: complex(t["re"], t["im"]) for t in data["terms"]}, data["n"])


def gr_mul(a, b):
    if a.n != b.n:
        raise ValueError("generator counts differ")
    return GrassmannElement(dmul(a.coeffs, b.coeffs), a.n)


def gr_body(a):
    return a.coeffs.get(0, 0j)


def gr_conj(a, swap=None):
    """Antilinear, order-preserving conjugation.

    Coefficients are conjugated and generator ``i`` goes to ``swap[i]``
    (identity by default, i.e. all generators real).
    """
    d = {m: c.conjugate() for m, c in a.coeffs.items()}
    if swap is not None:
        d = dpermute(d, swap)
    return GrassmannElement(d, a.n)


def gr_exp(a, order=None):
    """Exponential of ``a``.

    A nilpotent argument (zero body) gives the exact finite series.  With
    a nonzero body the series is truncated at ``order``, which must then
    be supplied.
    """
    if abs(gr_body(a)) > 0 and order is None:
        raise ValueError("gr_exp needs a nilpotent argument or an explicit order")
    limit = order if order is not None else a.n + 1
    out = {0: 1.0 + 0j}
    power = {0: 1.0 + 0j}
    for k in range(1, limit + 1):
        power = dmul(power, a.coeffs)
        if not power:
            break
        out = dadd(out, dscale(power, 1 / factorial(k)))
    return GrassmannElement(out, a.n)


def berezin(a, order):
    """Apply left derivatives, ``order[0]`` first."""
    d = a.coeffs
    for i in order:
        d = dderiv(d, i)
    return GrassmannElement(d, a.n)


def random_element(rng, n, density=0.5, parity=None):
    coeffs = {}
    for m in range(1 << n):
        if parity is not None and degree(m) % 2 != parity:
            continue
        if rng.random() < density:
            coeffs[m] = complex(rng.normal(), rng.normal())
    return GrassmannElement(coeffs, n)


# operators with Grassmann coefficients --------------------------------------

class GrassmannMatrix:
    """Operator ``sum_gamma x^gamma A_gamma`` on a graded space ``C^d``.

    ``grading`` holds the parity of each basis vector.  Matrices act on
    vectors from the left and commute with the external generators up to
    the Koszul sign of their odd part.
    """

    def __init__(self, comps, grading, n):
        self.grading = np.asarray(grading, dtype=int)
        self.n = n
        d = len(self.grading)
        self.comps = {int(m): np.asarray(a, dtype=complex).reshape(d, d)
                      for m, a in comps.items()}
        self._P = np.diag(1 - 2 * self.grading).astype(complex)

    @property
    def dim(self):
        return len(self.grading)

    @classmethod
    def constant(cls, a, grading, n):
        return cls({0: a}, grading, n)

    def _like(self, comps):
        return GrassmannMatrix(comps, self.grading, self.n)

    def twist(self, a):
        return self._P @ a @ self._P

    def __matmul__(self, other):
        if not isinstance(other, GrassmannMatrix):
            return NotImplemented
        out = {}
        for ga, a in self.comps.items():
            at = self.twist(a)
            for gb, b in other.comps.items():
                if ga & gb:
                    continue
                lhs = at if degree(gb) % 2 else a
                v = merge_sign(ga, gb) * (lhs @ b)
                g = ga | gb
                out[g] = out[g] + v if g in out else v
        return self._like(out)

    def __add__(self, other):
        out = {m: a.copy() for m, a in self.comps.items()}
        for m, b in other.comps.items():
            out[m] = out[m] + b if m in out else b.copy()
        return self._like(out)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, s):
        return self._like({m: a * s for m, a in self.comps.items()})

    __rmul__ = __mul__

    def lmul(self, g):
        """Left multiplication by a scalar Grassmann element."""
        out = {}
        for gm, c in g.coeffs.items():
            for m, a in self.comps.items():
                if gm & m:
                    continue
                v = (merge_sign(gm, m) * c) * a
                k = gm | m
                out[k] = out[k] + v if k in out else v
        return self._like(out)

    def body(self):
        return self.comps.get(0, np.zeros((self.dim, self.dim), complex))

    def norm(self):
        return max((np.abs(a).max() for a in self.comps.values()), default=0.0)

    def substitute(self, images, n_new):
        """Evaluate at new odd coordinates: ``x_i -> images[i]``."""
        out = {}
        for m, a in self.comps.items():
            prod = {0: 1.0}
            for i in bits(m):
                prod = dmul(prod, images[i].coeffs)
            for mm, c in prod.items():
                out[mm] = out[mm] + c * a if mm in out else c * a
        return GrassmannMatrix(out, self.grading, n_new)

    def apply(self, vec):
        """Act on a Grassmann vector ``{mask: array}``."""
        out = {}
        for ga, a in self.comps.items():
            at = self.twist(a)
            for gb, v in vec.items():
                if ga & gb:
                    continue
                lhs = at if degree(gb) % 2 else a
                w = merge_sign(ga, gb) * (lhs @ v)
                g = ga | gb
                out[g] = out[g] + w if g in out else w
        return out
