"""Exact Lie-algebraic core.

Holds integral Lie algebra bases with their structure constants, adjoint
actions, nilpotent exponentials and cached one-parameter unipotent subgroups.
Group and algebra elements are rational matrices; identities asserted on them
hold exactly.  Norms are evaluated in double precision from exact data.

The matrix norm used throughout is twice the Frobenius norm.  Frobenius is
submultiplicative, so this scaling gives ||[X,Y]|| <= ||X|| ||Y||.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotNilpotent, SingularMatrix
from .linalg import (
    Mat,
    Vec,
    frac,
    integer_kernel,
    rref,
    vec,
)

NORM_SCALE = 2  # ||X|| := 2 ||X||_F


def matrix_inner(x: Mat, y: Mat) -> Fraction:
    """Exact inner product <X,Y> = 4 tr(X^T Y) inducing the scaled norm."""
    return NORM_SCALE**2 * (x.transpose() * y).trace()


def matrix_norm(x: Mat) -> float:
    return NORM_SCALE * math.sqrt(float(x.frobenius_sq()))


def matrix_norm_float(x: np.ndarray) -> float:
    return NORM_SCALE * float(np.linalg.norm(x))


def bracket(x: Mat, y: Mat) -> Mat:
    if x.nrows != y.nrows or x.ncols != y.ncols or x.nrows != x.ncols:
        raise DimensionMismatch("bracket needs square matrices of equal size")
    return x * y - y * x


def adjoint(g: Mat, x: Mat) -> Mat:
    """Ad_g X = g X g^{-1}, exact; raises SingularMatrix for singular g."""
    return g * x * g.inverse()


def operator_size(g: Mat) -> float:
    """min of the sup norms of g and g^{-1} (the |g| of reduction theory)."""
    return float(min(g.max_abs(), g.inverse().max_abs()))


def operator_size_float(g: np.ndarray) -> float:
    return float(min(np.abs(g).max(), np.abs(np.linalg.inv(g)).max()))


def exp_nilpotent(x: Mat) -> Mat:
    """exp of a nilpotent matrix as the exact finite sum."""
    n = x.nrows
    out = Mat.identity(n)
    term = Mat.identity(n)
    for k in range(1, n + 1):
        term = term * x * Fraction(1, k)
        if term.is_zero():
            return out
        out = out + term
    raise NotNilpotent("matrix power did not vanish before dimension")


class LieAlgebraData:
    """Integral basis of a matrix Lie algebra with exact structure constants.

    The basis matrices have integer entries and span the algebra over Q; their
    Z-span is the full integral lattice (saturated) whenever constructed by
    build_so_q.  Structure constants satisfy antisymmetry and Jacobi exactly.
    """

    def __init__(self, basis, name="g", validate=True):
        self.basis = tuple(basis)
        self.name = name
        if not self.basis:
            raise ValueError("empty basis")
        self.matrix_size = self.basis[0].nrows
        self.dim = len(self.basis)
        for b in self.basis:
            if b.nrows != self.matrix_size or b.ncols != self.matrix_size:
                raise DimensionMismatch("basis matrices of unequal size")
            if any(x.denominator != 1 for x in b.flat()):
                raise ValueError("basis matrices must be integral")
        # exact coordinate transform: coords(X) = T @ flat(X)
        flat_rows = [list(b.flat()) for b in self.basis]
        red, pivots = rref(flat_rows)
        if len(red) != self.dim:
            raise ValueError("basis matrices are linearly dependent")
        self._pivots = pivots
        # solve for T via the pivot columns: X = sum c_i B_i  =>  c = T flat(X)
        a = [[flat_rows[i][p] for i in range(self.dim)] for p in pivots]
        self._coord_solver = Mat(a).inverse()
        self.structure = self._structure_constants()
        self.gram = tuple(
            tuple(matrix_inner(bi, bj) for bj in self.basis) for bi in self.basis
        )
        if validate:
            self.check_jacobi()
        self._chol = None
        self._ortho = None

    # -- coordinates ---------------------------------------------------------

    def to_coords(self, x: Mat) -> Vec:
        flat = x.flat()
        c = self._coord_solver.apply([flat[p] for p in self._pivots])
        if self.to_matrix(c) != x:
            raise ValueError("matrix does not lie in the algebra span")
        return c

    def to_matrix(self, coords) -> Mat:
        out = Mat.zeros(self.matrix_size)
        for ci, b in zip(coords, self.basis):
            ci = frac(ci)
            if ci:
                out = out + ci * b
        return out

    def contains_matrix(self, x: Mat) -> bool:
        try:
            self.to_coords(x)
            return True
        except ValueError:
            return False

    def _structure_constants(self):
        table = []
        for i, bi in enumerate(self.basis):
            row = []
            for j, bj in enumerate(self.basis):
                if j < i:
                    row.append(tuple(-c for c in table[j][i]))
                elif j == i:
                    row.append(tuple(Fraction(0) for _ in range(self.dim)))
                else:
                    try:
                        row.append(self.to_coords(bracket(bi, bj)))
                    except ValueError as exc:
                        raise ValueError("basis is not bracket closed") from exc
            table.append(row)
        return tuple(tuple(r) for r in table)

    def bracket_coords(self, u, v) -> Vec:
        u = vec(u)
        v = vec(v)
        out = [Fraction(0)] * self.dim
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                cij = self.structure[i][j]
                f = ui * vj
                for k, ck in enumerate(cij):
                    if ck:
                        out[k] += f * ck
        return tuple(out)

    def ad_matrix(self, z_coords) -> Mat:
        """Matrix of ad_z on basis coordinates."""
        cols = [self.bracket_coords(z_coords, self._unit(j)) for j in range(self.dim)]
        return Mat(list(zip(*cols)))

    def _unit(self, j):
        return tuple(Fraction(int(i == j)) for i in range(self.dim))

    def check_jacobi(self):
        for i in range(self.dim):
            ei = self._unit(i)
            for j in range(i + 1, self.dim):
                ej = self._unit(j)
                bij = self.bracket_coords(ei, ej)
                for k in range(j + 1, self.dim):
                    ek = self._unit(k)
                    s1 = self.bracket_coords(bij, ek)
                    s2 = self.bracket_coords(self.bracket_coords(ej, ek), ei)
                    s3 = self.bracket_coords(self.bracket_coords(ek, ei), ej)
                    if any(a + b + c != 0 for a, b, c in zip(s1, s2, s3)):
                        raise ValueError(f"Jacobi identity fails on triple {(i, j, k)}")

    # -- metric data ---------------------------------------------------------

    def inner(self, u, v) -> Fraction:
        u = vec(u)
        v = vec(v)
        g = self.gram
        return sum(u[i] * sum(g[i][j] * v[j] for j in range(self.dim) if v[j]) for i in range(self.dim) if u[i])

    def norm_sq(self, v) -> Fraction:
        return self.inner(v, v)

    def norm(self, v) -> float:
        return math.sqrt(float(self.norm_sq(v)))

    @property
    def chol(self) -> np.ndarray:
        """L with G = L L^T; ||v|| equals the 2-norm of L^T v."""
        if self._chol is None:
            g = np.array([[float(x) for x in row] for row in self.gram])
            self._chol = np.linalg.cholesky(g)
        return self._chol

    @property
    def orthonormal_directions(self) -> np.ndarray:
        """Columns are coordinate vectors of an orthonormal basis (float)."""
        if self._ortho is None:
            self._ortho = np.linalg.inv(self.chol.T)
        return self._ortho

    def coords_norm_float(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(self.chol.T @ v))

    def adjoint_coords_matrix(self, g: Mat) -> Mat:
        """Matrix of Ad_g on basis coordinates, exact."""
        ginv = g.inverse()
        cols = [self.to_coords(g * b * ginv) for b in self.basis]
        return Mat(list(zip(*cols)))

    def basis_floats(self) -> np.ndarray:
        return np.stack([b.to_float() for b in self.basis])

    def coords_to_float_matrix(self, v: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(v, dtype=float), self.basis_floats_cached(), axes=1)

    def basis_floats_cached(self) -> np.ndarray:
        if not hasattr(self, "_basis_f"):
            self._basis_f = self.basis_floats()
        return self._basis_f

    def float_coords(self, x: np.ndarray) -> np.ndarray:
        """Least-squares coordinates of a float matrix (projection onto g)."""
        if not hasattr(self, "_flat_pinv"):
            flats = np.stack([b.to_float().ravel() for b in self.basis], axis=1)
            self._flat_pinv = np.linalg.pinv(flats)
        return self._flat_pinv @ np.asarray(x, dtype=float).ravel()

    def __repr__(self):
        return f"LieAlgebraData({self.name}, dim={self.dim}, N={self.matrix_size})"


class NilpotentDirection:
    """A nilpotent algebra element z with the cached flow u_t = exp(t z).

    The entries of u_t are polynomials in t of degree below the matrix
    nilpotency order; the coefficient matrices are computed once and evaluated
    exactly for rational t (or in floats via at_float).
    """

    def __init__(self, algebra: LieAlgebraData, coords, unit_scale=False):
        self.algebra = algebra
        coords = vec(coords)
        if unit_scale:
            nsq = algebra.norm_sq(coords)
            if nsq == 0:
                raise ValueError("zero direction")
            r = Fraction(1 / math.sqrt(float(nsq))).limit_denominator(10**12)
            coords = tuple(r * c for c in coords)
        self.coords = coords
        self.matrix = algebra.to_matrix(coords)
        n = self.matrix.nrows
        powers = [Mat.identity(n)]
        term = Mat.identity(n)
        for k in range(1, n + 1):
            term = term * self.matrix * Fraction(1, k)
            if term.is_zero():
                break
            powers.append(term)
        else:
            raise NotNilpotent("direction is not nilpotent as a matrix")
        self.poly = tuple(powers)  # u_t = sum_k t^k poly[k]
        self.matrix_order = len(powers)
        ad = algebra.ad_matrix(coords)
        order = 1
        p = ad
        while not p.is_zero():
            p = p * ad
            order += 1
            if order > 2 * n + 1:
                raise NotNilpotent("ad_z is not nilpotent")
        self.ad_order = order
        self.nilpotency_order = max(self.matrix_order, self.ad_order)
        self.norm = algebra.norm(coords)
        self._poly_f = np.stack([m.to_float() for m in self.poly])

    def at(self, t) -> Mat:
        t = frac(t)
        out = self.poly[0]
        tk = Fraction(1)
        for k in range(1, len(self.poly)):
            tk *= t
            out = out + tk * self.poly[k]
        return out

    def at_float(self, t: float) -> np.ndarray:
        out = self._poly_f[-1].copy()
        for k in range(len(self.poly) - 2, -1, -1):
            out *= t
            out += self._poly_f[k]
        return out

    def __repr__(self):
        return f"NilpotentDirection(order={self.matrix_order}, norm={self.norm:.3g})"


def build_so_q(q: Mat, name=None) -> LieAlgebraData:
    """Integral basis of so_Q = {X : X^T Q + Q X = 0} for nondegenerate Q.

    The basis spans the saturated integral lattice so_Q ∩ Mat(Z); dimension is
    d(d-1)/2.
    """
    d = q.nrows
    if q.ncols != d:
        raise DimensionMismatch("Q must be square")
    if q != q.transpose():
        raise ValueError("Q must be symmetric")
    if q.det() == 0:
        raise SingularMatrix("Q is degenerate")
    if any(x.denominator != 1 for x in q.flat()):
        raise ValueError("Q must be integral")
    # constraint rows indexed by (i<=j): sum_a X[a,i] Q[a,j] + Q[i,a] X[a,j] = 0
    rows = []
    for i in range(d):
        for j in range(i, d):
            row = [0] * (d * d)
            for a in range(d):
                row[a * d + i] += int(q[a, j])
                row[a * d + j] += int(q[i, a])
            rows.append(row)
    kernel = integer_kernel(rows, d * d)
    expected = d * (d - 1) // 2
    if len(kernel) != expected:
        raise ValueError(f"so_Q dimension {len(kernel)} != {expected}")
    basis = [Mat.from_flat(v, d, d) for v in kernel]
    label = name or f"so_Q{d}"
    return LieAlgebraData(basis, name=label)


def so_q_element(q: Mat, a, b) -> Mat:
    """X_{a,b} = a b^T Q - b a^T Q, an element of so_Q killing Q-orthogonal vectors."""
    a = vec(a)
    b = vec(b)
    d = q.nrows
    qb = q.apply(b)
    qa = q.apply(a)
    return Mat([[a[i] * qb[j] - b[i] * qa[j] for j in range(d)] for i in range(d)])


@lru_cache(maxsize=None)
def sl2() -> LieAlgebraData:
    """sl_2 with basis (E, F, H); the Z-span is sl_2(Z)."""
    e = Mat([[0, 1], [0, 0]])
    f = Mat([[0, 0], [1, 0]])
    h = Mat([[1, 0], [0, -1]])
    return LieAlgebraData([e, f, h], name="sl2")


def quadratic_form_value(q: Mat, v) -> Fraction:
    v = vec(v)
    return sum(frac(q[i, j]) * v[i] * v[j] for i in range(q.nrows) for j in range(q.ncols))


def bilinear_form(q: Mat, u, v) -> Fraction:
    u = vec(u)
    v = vec(v)
    return sum(frac(q[i, j]) * u[i] * v[j] for i in range(q.nrows) for j in range(q.ncols))


def isotropic_vectors(q: Mat, entry_bound=2):
    """Primitive integral isotropic vectors with entries in [-bound, bound].

    Canonical sign (first nonzero entry positive); deterministic order.
    """
    import itertools as _it

    d = q.nrows
    seen = []
    for v in _it.product(range(-entry_bound, entry_bound + 1), repeat=d):
        if not any(v):
            continue
        lead = next(x for x in v if x)
        if lead < 0:
            continue
        g = 0
        for x in v:
            g = math.gcd(g, abs(x))
        if g != 1:
            continue
        if quadratic_form_value(q, v) == 0:
            seen.append(tuple(Fraction(x) for x in v))
    return seen


def so_q_nilpotents(q: Mat, entry_bound=2, limit=None):
    """Nilpotent integral elements X_{w,u} of so_Q (u isotropic, B(u,w)=0).

    These have matrix order at most 3 and generate unipotent one-parameter
    subgroups with polynomial entries; used for sampling, reduction pools and
    flow directions.
    """
    import itertools as _it

    d = q.nrows
    out = []
    for u in isotropic_vectors(q, entry_bound):
        for w in _it.product(range(-entry_bound, entry_bound + 1), repeat=d):
            if not any(w):
                continue
            wf = tuple(Fraction(x) for x in w)
            if bilinear_form(q, u, wf) != 0:
                continue
            x = so_q_element(q, wf, u)
            if x.is_zero():
                continue
            out.append(x)
            if limit is not None and len(out) >= limit:
                return out
    return out
