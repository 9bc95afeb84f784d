"""Exact rational linear algebra used everywhere else in the package.

Matrices are immutable tuples of Fractions; all routines here are pure and
never round.  Floating point appears only in the explicit ``to_float``
conversions.  Integer lattice routines (Hermite form kernels, LLL on a
rational Gram matrix, Fincke-Pohst enumeration) live here as well since
several modules share them.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExhausted, DimensionMismatch, SingularMatrix

Vec = tuple  # tuple of Fraction


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def vec(xs) -> Vec:
    return tuple(frac(x) for x in xs)


class Mat:
    """Immutable matrix over the rationals."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(frac(x) for x in row) for row in rows)
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise DimensionMismatch("ragged rows")

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n, m=None):
        m = n if m is None else m
        return cls([[0] * m for _ in range(n)])

    @classmethod
    def from_flat(cls, flat, n, m):
        it = iter(flat)
        return cls([[next(it) for _ in range(m)] for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise DimensionMismatch("matrix addition shape mismatch")
        return Mat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return Mat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return Mat([[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise DimensionMismatch("matrix product shape mismatch")
            cols = list(zip(*other.rows))
            return Mat(
                [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
            )
        return Mat([[a * frac(other) for a in r] for r in self.rows])

    def __rmul__(self, other):
        return Mat([[frac(other) * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        return self.__mul__(other)

    def apply(self, v: Sequence) -> Vec:
        if self.ncols != len(v):
            raise DimensionMismatch("matrix/vector shape mismatch")
        return tuple(sum(a * frac(x) for a, x in zip(row, v)) for row in self.rows)

    def transpose(self):
        return Mat(list(zip(*self.rows)))

    def trace(self) -> Fraction:
        return sum(self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def frobenius_sq(self) -> Fraction:
        return sum(x * x for r in self.rows for x in r)

    def max_abs(self) -> Fraction:
        return max(abs(x) for r in self.rows for x in r)

    def flat(self) -> Vec:
        return tuple(x for r in self.rows for x in r)

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of non-square matrix")
        a = [list(r) for r in self.rows]
        n = self.nrows
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

    def inverse(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.nrows
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = Fraction(1) / a[col][col]
            a[col] = [x * inv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return Mat([row[n:] for row in a])

    def pow_int(self, k: int):
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of non-square matrix")
        if k < 0:
            return self.inverse().pow_int(-k)
        out = Mat.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)

    def __repr__(self):
        return f"Mat({[[str(x) for x in r] for r in self.rows]})"


def mat_from_float(arr, max_den=10**12) -> Mat:
    return Mat([[Fraction(float(x)).limit_denominator(max_den) for x in row] for row in arr])


# ---------------------------------------------------------------------------
# Gaussian elimination over Q
# ---------------------------------------------------------------------------


def rref(rows: Iterable[Sequence]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    a = [list(map(frac, r)) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return [tuple(row) for row in a[:r]], pivots


def rank(rows) -> int:
    return len(rref(rows)[0])


def nullspace(rows, ncols=None) -> list[Vec]:
    """Basis of the rational kernel {x : A x = 0} of the row matrix A."""
    a = [list(map(frac, r)) for r in rows]
    if ncols is None:
        if not a:
            raise ValueError("ncols required for empty matrix")
        ncols = len(a[0])
    red, pivots = rref(a) if a else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for rrow, pcol in zip(red, pivots):
            v[pcol] = -rrow[fcol]
        basis.append(tuple(v))
    return basis


def solve(rows, b) -> Vec | None:
    """One solution x of A x = b, or None if inconsistent."""
    a = [list(map(frac, r)) + [frac(bi)] for r, bi in zip(rows, b)]
    ncols = len(a[0]) - 1
    red, pivots = rref(a)
    x = [Fraction(0)] * ncols
    for rrow, pcol in zip(red, pivots):
        if pcol == ncols:
            return None
        x[pcol] = rrow[-1]
    return tuple(x)


def in_span(vectors: Sequence[Sequence], v) -> bool:
    vs = [tuple(map(frac, w)) for w in vectors]
    base_rank = rank(vs)
    return rank(vs + [vec(v)]) == base_rank


def span_contains_all(vectors, others) -> bool:
    vs = [tuple(map(frac, w)) for w in vectors]
    base_rank = rank(vs)
    return rank(vs + [tuple(map(frac, o)) for o in others]) == base_rank


def clear_denominators(v: Sequence) -> tuple[tuple[int, ...], Fraction]:
    """Write v = s * w with w integral of content 1; returns (w, s).

    The sign of w matches v (s > 0).  Zero vectors return (0, 1).
    """
    fv = [frac(x) for x in v]
    if all(x == 0 for x in fv):
        return tuple(0 for _ in fv), Fraction(1)
    den = 1
    for x in fv:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fv]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints), Fraction(g, den)


def primitive_integer_vector(v: Sequence, canonical_sign=False) -> tuple[int, ...]:
    w, _ = clear_denominators(v)
    if canonical_sign:
        lead = next((x for x in w if x != 0), 0)
        if lead < 0:
            w = tuple(-x for x in w)
    return w


# ---------------------------------------------------------------------------
# Integer lattice kernels (saturated) via unimodular row reduction
# ---------------------------------------------------------------------------


def integer_kernel(rows: Sequence[Sequence[int]], ncols=None) -> list[tuple[int, ...]]:
    """Basis of {x in Z^n : A x = 0} for an integer matrix A.

    The returned basis spans the full (saturated) kernel lattice, i.e. the
    intersection of the rational kernel with Z^n.
    """
    a = [list(r) for r in rows]
    if ncols is None:
        if not a:
            raise ValueError("ncols required for empty matrix")
        ncols = len(a[0])
    nrows = len(a)
    # augmented rows (A^T | I): row j carries column j of A plus tracking e_j
    work = [[a[i][j] for i in range(nrows)] + [int(i == j) for i in range(ncols)] for j in range(ncols)]
    top = 0
    for p in range(nrows):
        while True:
            nz = [k for k in range(top, len(work)) if work[k][p] != 0]
            if not nz:
                break
            if len(nz) == 1:
                k = nz[0]
                work[top], work[k] = work[k], work[top]
                top += 1
                break
            nz.sort(key=lambda k: abs(work[k][p]))
            k0 = nz[0]
            for k in nz[1:]:
                q = work[k][p] // work[k0][p]
                if q:
                    work[k] = [x - q * y for x, y in zip(work[k], work[k0])]
    kernel = []
    for row in work[top:]:
        assert all(x == 0 for x in row[:nrows])
        kernel.append(tuple(row[nrows:]))
    return kernel


def saturate_span(vectors: Sequence[Sequence], ncols=None) -> list[tuple[int, ...]]:
    """Integral basis of span_Q(vectors) ∩ Z^n."""
    vs = [tuple(map(frac, v)) for v in vectors]
    if ncols is None:
        ncols = len(vs[0])
    constraints = nullspace(vs, ncols) if vs else []
    if not constraints:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    int_constraints = [primitive_integer_vector(c) for c in constraints]
    return integer_kernel(int_constraints, ncols)


# ---------------------------------------------------------------------------
# Gram matrices, LLL, and certified shortest vectors
# ---------------------------------------------------------------------------


def gram_matrix(vectors: Sequence[Sequence], inner) -> list[list[Fraction]]:
    vs = [tuple(map(frac, v)) for v in vectors]
    return [[inner(u, w) for w in vs] for u in vs]


def dot_with_gram(u, v, gram) -> Fraction:
    return sum(frac(u[i]) * sum(frac(gram[i][j]) * frac(v[j]) for j in range(len(v))) for i in range(len(u)))


def _gram_schmidt_data(g):
    """Gram-Schmidt norms B* and coefficients mu from a Gram matrix."""
    n = len(g)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j] - sum(mu[i][l] * mu[j][l] * bstar[l] for l in range(j))
            mu[i][j] = s / bstar[j] if bstar[j] != 0 else Fraction(0)
        bstar[i] = g[i][i] - sum(mu[i][l] ** 2 * bstar[l] for l in range(i))
    return mu, bstar


def lll_transform(gram, delta=Fraction(3, 4)) -> list[list[int]]:
    """LLL reduction working purely on a rational Gram matrix.

    Returns an integer transform C with unimodular rows; the reduced basis is
    c_i = sum_j C[i][j] b_j.
    """
    n = len(gram)
    g = [[frac(x) for x in row] for row in gram]
    c = [[int(i == j) for j in range(n)] for i in range(n)]
    delta = frac(delta)

    def do_combine(i, q, j):
        # b_i <- b_i - q b_j, updating Gram exactly
        if q == 0:
            return
        c[i] = [x - q * y for x, y in zip(c[i], c[j])]
        for k in range(n):
            g[i][k] = g[i][k] - q * g[j][k]
        for k in range(n):
            g[k][i] = g[k][i] - q * g[k][j]

    def do_swap(i, j):
        c[i], c[j] = c[j], c[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 100000:
            raise BudgetExhausted("LLL failed to terminate within its loop guard")
        mu, bstar = _gram_schmidt_data(g)
        for j in range(k - 1, -1, -1):
            q = _nearest_int(mu[k][j])
            if q:
                do_combine(k, q, j)
                mu, bstar = _gram_schmidt_data(g)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            do_swap(k, k - 1)
            k = max(k - 1, 1)
    return c


def _nearest_int(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0."""
    if x < 0:
        raise ValueError("negative argument")
    return isqrt(x.numerator * x.denominator) // x.denominator


def _ldl(gram):
    """Q(x) = sum_i d_i (x_i + sum_{j>i} u[i][j] x_j)^2 for PD rational Gram."""
    n = len(gram)
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    a = [[frac(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise SingularMatrix("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = a[i][j] / d[i]
        for r in range(i + 1, n):
            for s in range(r, n):
                a[r][s] = a[r][s] - d[i] * u[i][r] * u[i][s]
                a[s][r] = a[r][s]
    return d, u


class ShortestVector:
    __slots__ = ("min_sq", "coeffs", "certified", "lower_sq", "nodes")

    def __init__(self, min_sq, coeffs, certified, lower_sq, nodes):
        self.min_sq = min_sq
        self.coeffs = coeffs
        self.certified = certified
        self.lower_sq = lower_sq
        self.nodes = nodes


def shortest_vector_gram(gram, node_budget=2_000_000) -> ShortestVector:
    """Certified shortest nonzero vector of a lattice given by its Gram matrix.

    LLL first, then complete Fincke-Pohst enumeration below the best reduced
    basis norm.  Exact rational arithmetic throughout; on budget exhaustion the
    result is uncertified and carries a valid two-sided bound.
    """
    n = len(gram)
    c = lll_transform(gram)
    red = [[dot_with_gram(c[i], c[j], gram) for j in range(n)] for i in range(n)]
    best_sq = min(red[i][i] for i in range(n))
    best_idx = min(range(n), key=lambda i: red[i][i])
    best_coeffs = list(c[best_idx])
    d, u = _ldl(red)
    # lower bound: any nonzero vector has Q(x) >= min_i B*_i
    _, bstar = _gram_schmidt_data(red)
    lower = min(b for b in bstar if b > 0)

    best_sq, best_coeffs, nodes, exhausted = _fp_enumerate(
        d, u, best_sq, best_coeffs, node_budget
    )

    coeffs = tuple(sum(best_coeffs[i] * c[i][j] for i in range(n)) for j in range(n))
    return ShortestVector(best_sq, coeffs, not exhausted, lower, nodes)


def _ceil_frac(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def _floor_frac(f: Fraction) -> int:
    return f.numerator // f.denominator


def _fp_enumerate(d, u, bound_sq, best_coeffs, node_budget):
    """Depth-first Fincke-Pohst: all x != 0 with Q(x) <= bound_sq."""
    n = len(d)
    best_sq = bound_sq
    best = list(best_coeffs)
    nodes = 0
    exhausted = False

    x = [0] * n
    # partial[i] = sum_{j > i} contributions, shift[i] = sum_{j>i} u[i][j] x_j
    def shift_at(i):
        return sum(u[i][j] * x[j] for j in range(i + 1, n))

    def walk(i, partial):
        nonlocal best_sq, best, nodes, exhausted
        if exhausted:
            return
        rem = best_sq - partial
        if rem < 0:
            return
        sh = shift_at(i)
        rad = floor_sqrt(rem / d[i]) + 1
        center = -sh
        lo = _ceil_frac(center) - rad
        hi = _floor_frac(center) + rad
        for xi in range(lo, hi + 1):
            t = xi + sh
            contrib = d[i] * t * t
            if partial + contrib > best_sq:
                continue
            nodes += 1
            if nodes > node_budget:
                exhausted = True
                return
            x[i] = xi
            if i == 0:
                if any(x) and partial + contrib < best_sq:
                    best_sq = partial + contrib
                    best = list(x)
            else:
                walk(i - 1, partial + contrib)
        x[i] = 0

    walk(n - 1, Fraction(0))
    return best_sq, best, nodes, exhausted


# ---------------------------------------------------------------------------
# Brute-force oracle (independent of LLL path, used by tests)
# ---------------------------------------------------------------------------


def shortest_vector_boxscan(gram, radius_hint=None) -> tuple[Fraction, tuple[int, ...]]:
    """Exhaustive box scan for the shortest vector; independent test oracle.

    Scans all integer coefficient vectors in a box certified to contain a
    shortest vector via the dual-basis coordinate bound.
    """
    n = len(gram)
    g = Mat(gram)
    bound_sq = min(frac(gram[i][i]) for i in range(n))
    ginv = g.inverse()
    best_sq = bound_sq
    best = tuple(int(i == 0) for i in range(n))
    # |x_i| = |<x, dual_i>| <= ||x|| * sqrt((G^-1)_ii)
    radii = [floor_sqrt(bound_sq * ginv[i, i]) + 1 for i in range(n)]
    if radius_hint is not None:
        radii = [min(r, radius_hint) for r in radii]
    for coeffs in itertools.product(*[range(-r, r + 1) for r in radii]):
        if not any(coeffs):
            continue
        q = dot_with_gram(coeffs, coeffs, gram)
        if q < best_sq or (q == best_sq and coeffs < best):
            best_sq = q
            best = coeffs
    return best_sq, best
