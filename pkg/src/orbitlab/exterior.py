"""Exterior powers of the Lie algebra: primitive wedge vectors, orbit maps,
subgroup heights and orbit discriminants.

Wedge coordinates are stored sparsely, keyed by k-element subsets of the
algebra basis in lexicographic order.  Exact rational coordinates carry all
equality and vanishing statements; norms are evaluated in double precision
through the inner product induced by the scaled norm on the algebra.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import LieAlgebraData
from .errors import DimensionMismatch, OrbitLabError
from .linalg import Mat, Vec, frac, rank, rref, vec

MAX_WEDGE_DEGREE = 12


@lru_cache(maxsize=None)
def subsets(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(m), k))


@lru_cache(maxsize=None)
def subset_index(m: int, k: int) -> dict:
    return {s: i for i, s in enumerate(subsets(m, k))}


def _check_degree(k):
    if k > MAX_WEDGE_DEGREE:
        raise OrbitLabError(f"wedge degree {k} exceeds the supported cap {MAX_WEDGE_DEGREE}")


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    a = [list(r) for r in rows]
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            d = -d
        d *= a[col][col]
        inv = Fraction(1) / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return d


class WedgeVector:
    """Sparse exact element of the k-th exterior power of the algebra."""

    __slots__ = ("algebra", "k", "coords")

    def __init__(self, algebra: LieAlgebraData, k: int, coords: dict):
        _check_degree(k)
        self.algebra = algebra
        self.k = k
        self.coords = {s: frac(c) for s, c in coords.items() if c}

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other):
        return (
            isinstance(other, WedgeVector)
            and self.k == other.k
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.k, tuple(sorted(self.coords.items()))))

    def scaled(self, s):
        s = frac(s)
        return WedgeVector(self.algebra, self.k, {t: s * c for t, c in self.coords.items()})

    def same_line(self, other) -> bool:
        """True when self and other span the same line (up to sign and scale)."""
        if self.k != other.k or self.is_zero() != other.is_zero():
            return False
        if self.is_zero():
            return True
        s, c0 = next(iter(sorted(self.coords.items())))
        if s not in other.coords:
            return False
        ratio = other.coords[s] / c0
        return other.coords == {t: ratio * c for t, c in self.coords.items()}

    def dense(self) -> np.ndarray:
        idx = subset_index(self.algebra.dim, self.k)
        out = np.zeros(len(idx))
        for s, c in self.coords.items():
            out[idx[s]] = float(c)
        return out

    def norm(self) -> float:
        chol = wedge_chol(self.algebra, self.k)
        return float(np.linalg.norm(chol @ self.dense()))

    def is_integral_primitive(self) -> bool:
        if self.is_zero():
            return False
        vals = list(self.coords.values())
        if any(c.denominator != 1 for c in vals):
            return False
        g = 0
        for c in vals:
            g = math.gcd(g, abs(c.numerator))
        return g == 1

    def primitive(self) -> "WedgeVector":
        """Integral coordinates of content one; first nonzero coordinate
        (lexicographic subset order) positive."""
        if self.is_zero():
            raise ValueError("zero wedge vector has no primitive form")
        items = sorted(self.coords.items())
        den = 1
        for _, c in items:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [(s, c.numerator * (den // c.denominator)) for s, c in items]
        g = 0
        for _, c in ints:
            g = math.gcd(g, abs(c))
        sign = 1 if ints[0][1] > 0 else -1
        return WedgeVector(self.algebra, self.k, {s: Fraction(sign * c, g) for s, c in ints})

    def content(self) -> Fraction:
        """Positive scalar with self = (+/- content) * self.primitive()."""
        items = sorted(self.coords.items())
        den = 1
        for _, c in items:
            den = den * c.denominator // math.gcd(den, c.denominator)
        g = 0
        for _, c in items:
            g = math.gcd(g, abs(c.numerator * (den // c.denominator)))
        return Fraction(g, den)

    def __repr__(self):
        return f"WedgeVector(k={self.k}, nnz={len(self.coords)})"


_WEDGE_CHOL = {}


def wedge_chol(algebra: LieAlgebraData, k: int) -> np.ndarray:
    """Compound matrix of the Cholesky transpose of the algebra Gram matrix;
    maps dense wedge coordinates to an orthonormal wedge frame."""
    key = (id(algebra), k)
    if key not in _WEDGE_CHOL:
        l_t = np.linalg.cholesky(
            np.array([[float(x) for x in row] for row in algebra.gram])
        ).T
        _WEDGE_CHOL[key] = compound_matrix_float(l_t, k)
    return _WEDGE_CHOL[key]


def compound_matrix_float(a: np.ndarray, k: int) -> np.ndarray:
    m = a.shape[0]
    ss = subsets(m, k)
    out = np.empty((len(ss), len(ss)))
    for i, rows_idx in enumerate(ss):
        sub = a[np.ix_(rows_idx, range(m))]
        for j, cols_idx in enumerate(ss):
            out[i, j] = np.linalg.det(sub[:, cols_idx])
    return out


def wedge_of_vectors(algebra: LieAlgebraData, vectors) -> WedgeVector:
    """w_1 ∧ ... ∧ w_k from coordinate vectors, exact."""
    rows = [vec(v) for v in vectors]
    k = len(rows)
    _check_degree(k)
    m = algebra.dim
    coords = {}
    for s in subsets(m, k):
        d = _det([[row[c] for c in s] for row in rows])
        if d:
            coords[s] = d
    return WedgeVector(algebra, k, coords)


def wedge_with_vector(z, w: WedgeVector) -> WedgeVector:
    """z ∧ w for an algebra coordinate vector z, exact."""
    z = vec(z)
    m = w.algebra.dim
    k = w.k + 1
    _check_degree(k)
    out = {}
    for s, c in w.coords.items():
        sset = set(s)
        for i in range(m):
            if i in sset or not z[i]:
                continue
            t = tuple(sorted(sset | {i}))
            pos = t.index(i)
            sign = -1 if pos % 2 else 1
            out[t] = out.get(t, Fraction(0)) + sign * z[i] * c
    return WedgeVector(w.algebra, k, out)


class SubgroupData:
    """Rational subalgebra data for a Q-subgroup: spanning coordinate vectors
    of its Lie algebra plus a provenance label."""

    __slots__ = ("algebra", "vectors", "label", "_wedge", "_content")

    def __init__(self, algebra: LieAlgebraData, vectors, label="custom", validate=True):
        self.algebra = algebra
        self.vectors = tuple(vec(v) for v in vectors)
        self.label = label
        if validate:
            if rank(self.vectors) != len(self.vectors):
                raise ValueError("spanning set is linearly dependent")
            self._check_bracket_closed()
        self._wedge = None
        self._content = None

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def _check_bracket_closed(self):
        base = list(self.vectors)
        for i in range(len(base)):
            for j in range(i + 1, len(base)):
                b = self.algebra.bracket_coords(base[i], base[j])
                if any(b) and rank(base + [b]) != len(base):
                    raise ValueError("spanning set is not bracket closed")

    def contains_vector(self, v) -> bool:
        return rank(list(self.vectors) + [vec(v)]) == self.dim

    def contains_subgroup(self, other: "SubgroupData") -> bool:
        return rank(list(self.vectors) + list(other.vectors)) == self.dim

    def conjugated(self, gamma: Mat, label=None) -> "SubgroupData":
        ad = self.algebra.adjoint_coords_matrix(gamma)
        return SubgroupData(
            self.algebra,
            [ad.apply(v) for v in self.vectors],
            label=label or f"{self.label}^conj",
            validate=False,
        )

    def basis_hash(self) -> str:
        w = wedge_basis_vector(self)
        payload = ";".join(f"{s}:{c}" for s, c in sorted(w.coords.items()))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __repr__(self):
        return f"SubgroupData({self.label}, dim={self.dim})"


def wedge_basis_vector(m: SubgroupData) -> WedgeVector:
    """Primitive integral wedge vector spanning ∧^dim Lie(M).

    Depends only on the rational span: denominators cleared by the lcm,
    divided by the gcd, sign fixed on the first nonzero coordinate.
    """
    if m._wedge is None:
        raw = wedge_of_vectors(m.algebra, m.vectors)
        if raw.is_zero():
            raise ValueError("spanning set is linearly dependent")
        m._wedge = raw.primitive()
        # raw = sign * content * primitive; keep signed content for orbit maps
        s0, c0 = next(iter(sorted(raw.coords.items())))
        m._content = c0 / m._wedge.coords[s0]
    return m._wedge


def _signed_content(m: SubgroupData) -> Fraction:
    wedge_basis_vector(m)
    return m._content


def subgroup_height(m: SubgroupData) -> float:
    return wedge_basis_vector(m).norm()


def induced_action(g: Mat, w: WedgeVector) -> WedgeVector:
    """Action of g on ∧^k induced by the adjoint representation, exact."""
    ad = w.algebra.adjoint_coords_matrix(g)
    return induced_action_coords(ad, w)


def induced_action_coords(ad: Mat, w: WedgeVector) -> WedgeVector:
    m = w.algebra.dim
    out = {}
    for t in subsets(m, w.k):
        acc = Fraction(0)
        for s, c in w.coords.items():
            d = _det([[ad[i, j] for j in s] for i in t])
            if d:
                acc += d * c
        if acc:
            out[t] = acc
    return WedgeVector(w.algebra, w.k, out)


def orbit_map(m: SubgroupData, g: Mat) -> WedgeVector:
    """The orbit-map value at g: the induced action of g^{-1} on the primitive
    wedge vector of M.  Computed by transporting the spanning set."""
    ad = m.algebra.adjoint_coords_matrix(g.inverse())
    moved = [ad.apply(v) for v in m.vectors]
    raw = wedge_of_vectors(m.algebra, moved)
    c = _signed_content(m)
    return raw.scaled(Fraction(1) / c)


def discriminant(m: SubgroupData, g: Mat) -> float:
    """disc of the orbit through g: the norm of the orbit map."""
    return orbit_map(m, g).norm()


def transversal_norm(m: SubgroupData, g: Mat, z_coords) -> float:
    """Norm of z ∧ orbit_map(M, g) for a unit flow direction z.

    z is passed as exact coordinates; the result is scaled by 1/||z|| so the
    value refers to the unit vector along z.  Zero iff z lies in Ad(g^{-1})
    Lie(M), which is decided exactly.
    """
    eta = orbit_map(m, g)
    if eta.k >= m.algebra.dim:
        raise DimensionMismatch("top-degree wedge has no transversal complement")
    w = wedge_with_vector(z_coords, eta)
    zn = m.algebra.norm(z_coords)
    return w.norm() / zn


def transversal_vanishes(m: SubgroupData, g: Mat, z_coords) -> bool:
    """Exact test: z ∈ Ad(g^{-1}) Lie(M)."""
    ad = m.algebra.adjoint_coords_matrix(g.inverse())
    moved = [ad.apply(v) for v in m.vectors]
    return rank(list(moved) + [vec(z_coords)]) == len(moved)
