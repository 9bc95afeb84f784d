"""Height in the cusp and representative reduction.

The height of a point is the reciprocal of the shortest vector of the
adjoint-transported integral Lie algebra lattice.  Shortest vectors are
certified: LLL reduction on the exact rational Gram matrix followed by
complete Fincke-Pohst enumeration, so compact-part membership carries no
floating-point doubt.  A float fast path exists for Sobolev weights only.

Representative reduction is exact for SL2(Z) (fundamental-domain algorithm on
rational data) and best-effort for SO_Q(Z) via a greedy descent over a pool of
integral transvections; the pool is not claimed to generate the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import (
    LieAlgebraData,
    bilinear_form,
    build_so_q,
    exp_nilpotent,
    operator_size,
    operator_size_float,
    quadratic_form_value,
    sl2,
    so_q_nilpotents,
)
from .errors import BudgetExhausted, OrbitLabError, SingularMatrix
from .linalg import (
    Mat,
    Vec,
    dot_with_gram,
    frac,
    lll_transform,
    shortest_vector_gram,
    vec,
)


# ---------------------------------------------------------------------------
# Quotient descriptors
# ---------------------------------------------------------------------------


class Quotient:
    """An arithmetic quotient: the group, its integral lattice and reduction
    machinery.  Supported kinds: "sl2" (exact reduction) and "so_q"
    (greedy best-effort reduction over a transvection pool)."""

    def __init__(self, kind, algebra: LieAlgebraData, q: Optional[Mat] = None, level=1):
        self.kind = kind
        self.algebra = algebra
        self.q = q
        self.level = level
        self._pool: Optional[tuple[Mat, ...]] = None
        self._pool_f = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def sl2_z(cls):
        return cls("sl2", sl2())

    @classmethod
    def so_q_z(cls, q: Mat, level=1, algebra=None):
        return cls("so_q", algebra or build_so_q(q), q=q, level=level)

    # -- lattice elements ----------------------------------------------------

    @property
    def reduction_pool(self) -> tuple[Mat, ...]:
        if self._pool is None:
            if self.kind == "sl2":
                t = Mat([[1, self.level], [0, 1]])
                s = Mat([[0, -1], [1, 0]])
                pool = [t, t.inverse(), s, s.inverse(), -Mat.identity(2)]
                if self.level > 1:
                    pool = [t, t.inverse()]
                self._pool = tuple(pool)
            else:
                self._pool = tuple(self._so_q_pool())
        return self._pool

    def _so_q_pool(self):
        pool = {}
        d = self.q.nrows
        for x in so_q_nilpotents(self.q, entry_bound=1, limit=None):
            # exp(k x) is integral once k x^2 / 2 is; k=2 always works
            for k in (1, 2):
                k = k * self.level
                g = exp_nilpotent(k * x)
                if all(e.denominator == 1 for e in g.flat()):
                    for m in (g, g.inverse()):
                        pool.setdefault(m.rows, m)
                    break
        # signed permutation elements (level 1 only)
        if self.level == 1:
            import itertools as _it

            for perm in _it.permutations(range(d)):
                for signs in _it.product((1, -1), repeat=d):
                    g = Mat(
                        [
                            [signs[i] if perm[i] == j else 0 for j in range(d)]
                            for i in range(d)
                        ]
                    )
                    if g.det() == 1 and g.transpose() * self.q * g == self.q:
                        pool.setdefault(g.rows, g)
        members = sorted(pool.values(), key=lambda m: (float(m.frobenius_sq()), m.rows))
        return members[:240]

    def pool_floats(self):
        if self._pool_f is None:
            ms = self.reduction_pool
            self._pool_f = (
                np.stack([m.to_float() for m in ms]),
                np.stack([m.inverse().to_float() for m in ms]),
            )
        return self._pool_f

    def random_lattice_element(self, rng, length=6) -> Mat:
        pool = self.reduction_pool
        out = Mat.identity(self.algebra.matrix_size)
        for _ in range(length):
            out = out * pool[rng.randrange(len(pool))]
        return out

    def contains_lattice_element(self, gamma: Mat) -> bool:
        if any(x.denominator != 1 for x in gamma.flat()):
            return False
        if self.kind == "sl2":
            return gamma.det() == 1
        return gamma.det() == 1 and gamma.transpose() * self.q * gamma == self.q

    # -- reduction -----------------------------------------------------------

    def reduce(self, g):
        """Canonical (sl2) or best-effort (so_q) reduced representative.

        Returns (reduced, gamma) with reduced = gamma * g and gamma integral.
        Accepts exact matrices or float arrays; the return type matches.
        """
        if self.kind == "sl2":
            if isinstance(g, Mat):
                return _reduce_sl2_exact(g)
            return _reduce_sl2_float(np.asarray(g, dtype=float))
        if isinstance(g, Mat):
            red_f, gamma = self._reduce_so_q(g.to_float())
            return gamma * g, gamma
        red, gamma = self._reduce_so_q(np.asarray(g, dtype=float))
        return red, gamma

    def _reduce_so_q(self, g: np.ndarray, max_steps=60):
        pool_f, pool_inv_f = self.pool_floats()
        pool = self.reduction_pool
        gamma = Mat.identity(g.shape[0])
        cur = g.copy()
        cur_inv = np.linalg.inv(cur)
        score = min(np.abs(cur).max(), np.abs(cur_inv).max())
        for _ in range(max_steps):
            cand = pool_f @ cur
            cand_inv = cur_inv @ pool_inv_f
            scores = np.minimum(
                np.abs(cand).max(axis=(1, 2)), np.abs(cand_inv).max(axis=(1, 2))
            )
            best = int(np.argmin(scores))
            if scores[best] >= score * (1 - 1e-12):
                break
            score = scores[best]
            cur = cand[best]
            cur_inv = cand_inv[best]
            gamma = pool[best] * gamma
        return cur, gamma


def _nearest_int_frac(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def _reduce_sl2_exact(g: Mat, max_steps=10000):
    """Fundamental-domain reduction of the point g.i in the upper half plane,
    exact on rational matrices.  Returns (gamma * g, gamma)."""
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    det = a * d - b * c
    if det <= 0:
        raise SingularMatrix("sl2 reduction needs positive determinant")
    # z = g.i = x + iy
    den = c * c + d * d
    x = (a * c + b * d) / den
    y = det / den
    gamma = Mat.identity(2)
    for _ in range(max_steps):
        n = _nearest_int_frac(x)
        if n:
            gamma = Mat([[1, -n], [0, 1]]) * gamma
            x = x - n
        norm_sq = x * x + y * y
        if norm_sq >= 1:
            break
        gamma = Mat([[0, -1], [1, 0]]) * gamma
        x, y = -x / norm_sq, y / norm_sq
    else:
        raise BudgetExhausted("sl2 reduction did not terminate")
    red = gamma * g
    red, gamma = _canonical_sign(red, gamma)
    return red, gamma


def _reduce_sl2_float(g: np.ndarray, max_steps=10000):
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    det = a * d - b * c
    den = c * c + d * d
    x = (a * c + b * d) / den
    y = det / den
    gamma = np.eye(2)
    for _ in range(max_steps):
        n = math.floor(x + 0.5)
        if n:
            gamma = np.array([[1.0, -n], [0.0, 1.0]]) @ gamma
            x -= n
        nsq = x * x + y * y
        if nsq >= 1 - 1e-15:
            break
        gamma = np.array([[0.0, -1.0], [1.0, 0.0]]) @ gamma
        x, y = -x / nsq, y / nsq
    red = gamma @ g
    flat = red.ravel()
    lead = flat[np.argmax(np.abs(flat) > 1e-12)]
    if lead < 0:
        red = -red
        gamma = -gamma
    return red, gamma


def _canonical_sign(red: Mat, gamma: Mat):
    lead = next((e for e in red.flat() if e != 0), None)
    if lead is not None and lead < 0:
        return -red, -gamma
    return red, gamma


# ---------------------------------------------------------------------------
# Adjoint lattices and heights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeBasis:
    algebra: LieAlgebraData
    vectors: tuple  # exact coordinate vectors spanning Ad(g^-1) g_Z

    def gram(self):
        inner = self.algebra.inner
        return [[inner(u, v) for v in self.vectors] for u in self.vectors]


def adjoint_lattice(algebra: LieAlgebraData, g: Mat) -> LatticeBasis:
    """Exact images Ad(g^-1) X_i of the integral basis."""
    ad = algebra.adjoint_coords_matrix(g.inverse())
    cols = tuple(ad.apply(algebra._unit(j)) for j in range(algebra.dim))
    return LatticeBasis(algebra, cols)


@dataclass
class HeightReport:
    height: float
    shortest_vector: Vec
    certified: bool
    lambda1_sq: Fraction
    lower_sq: Fraction
    nodes: int

    @property
    def lambda1(self) -> float:
        return math.sqrt(float(self.lambda1_sq))

    def height_bounds(self) -> tuple[float, float]:
        """(lower, upper) bounds for the height; equal when certified."""
        hi = 1.0 / math.sqrt(float(self.lower_sq))
        lo = 1.0 / math.sqrt(float(self.lambda1_sq))
        return (lo, hi) if not self.certified else (lo, lo)


def height_in_cusp(algebra: LieAlgebraData, g: Mat, node_budget=2_000_000) -> HeightReport:
    """Height 1/lambda_1 of the adjoint-transported integral lattice."""
    basis = adjoint_lattice(algebra, g)
    gram = basis.gram()
    res = shortest_vector_gram(gram, node_budget=node_budget)
    coords = tuple(
        sum(frac(res.coeffs[i]) * basis.vectors[i][j] for i in range(algebra.dim))
        for j in range(algebra.dim)
    )
    return HeightReport(
        height=1.0 / math.sqrt(float(res.min_sq)),
        shortest_vector=coords,
        certified=res.certified,
        lambda1_sq=res.min_sq,
        lower_sq=res.lower_sq,
        nodes=res.nodes,
    )


def in_compact_part(algebra: LieAlgebraData, g: Mat, eta) -> bool:
    """Membership in the compact part (height at most 1/eta), decided exactly.

    Raises on an uncertified borderline report rather than guessing.
    """
    eta = frac(eta)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0,1)")
    rep = height_in_cusp(algebra, g)
    # ht <= 1/eta  <=>  lambda1 >= eta  <=>  lambda1^2 >= eta^2
    if rep.certified:
        return rep.lambda1_sq >= eta * eta
    if rep.lambda1_sq < eta * eta:
        return False  # found vector already too short
    if rep.lower_sq >= eta * eta:
        return True
    raise BudgetExhausted("height certification budget exceeded on a borderline point")


def minht_estimate(algebra: LieAlgebraData, samples) -> float:
    """Minimum cusp height over orbit samples; an upper bound for the true
    infimum over the orbit."""
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample")
    return min(height_in_cusp(algebra, g).height for g in samples)


# float fast path, for Sobolev weights only ---------------------------------


def height_float(algebra: LieAlgebraData, g: np.ndarray) -> float:
    """Uncertified height of a float point; used for integral weights where
    certification is not required."""
    gf = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(gf)
    basis_f = algebra.basis_floats_cached()
    moved = ginv @ basis_f @ gf
    coords = np.stack([algebra.float_coords(m) for m in moved])
    lt = algebra.chol.T
    vecs = coords @ lt.T
    gram = vecs @ vecs.T
    red = _lll_float(gram)
    rg = red @ gram @ red.T
    lam_sq = _enumerate_float(rg)
    return 1.0 / math.sqrt(lam_sq)


def _lll_float(gram, delta=0.75):
    n = gram.shape[0]
    c = np.eye(n, dtype=float)
    g = gram.copy()

    def gs():
        mu = np.zeros((n, n))
        bs = np.zeros(n)
        for i in range(n):
            for j in range(i):
                mu[i, j] = (g[i, j] - (mu[i, :j] * mu[j, :j] * bs[:j]).sum()) / bs[j]
            bs[i] = g[i, i] - (mu[i, :i] ** 2 * bs[:i]).sum()
        return mu, bs

    k = 1
    it = 0
    while k < n and it < 1000:
        it += 1
        mu, bs = gs()
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                c[k] -= q * c[j]
                g[k, :] -= q * g[j, :]
                g[:, k] -= q * g[:, j]
                mu, bs = gs()
        if bs[k] >= (delta - mu[k, k - 1] ** 2) * bs[k - 1]:
            k += 1
        else:
            c[[k, k - 1]] = c[[k - 1, k]]
            g[[k, k - 1]] = g[[k - 1, k]]
            g[:, [k, k - 1]] = g[:, [k - 1, k]]
            k = max(k - 1, 1)
    return c


def _enumerate_float(gram, slack=1.000001):
    n = gram.shape[0]
    best = gram.diagonal().min() * slack
    # enumerate |x_i| small via simple box from dual bound
    ginv = np.linalg.inv(gram)
    radii = [int(math.floor(math.sqrt(best * ginv[i, i]))) + 1 for i in range(n)]
    import itertools as _it

    out = best
    for xs in _it.product(*[range(-r, r + 1) for r in radii]):
        if not any(xs):
            continue
        v = np.array(xs, dtype=float)
        q = float(v @ gram @ v)
        if q < out:
            out = q
    return out


# ---------------------------------------------------------------------------
# Representative reduction with the operator-size guarantee
# ---------------------------------------------------------------------------


def reduce_representative(quotient: Quotient, g: Mat):
    """Representative gamma*g with operator size not above that of g.

    Exact for sl2; greedy pool descent for so_q; identity with a warning for
    unsupported quotients.  Returns (representative, gamma, diagnostics); the
    diagnostics dict carries (size, height) pairs for empirical constant fits.
    """
    if quotient.kind == "sl2" and quotient.level > 1:
        ht = height_in_cusp(quotient.algebra, g).height
        return g, Mat.identity(g.nrows), {
            "size": operator_size(g),
            "height": ht,
            "warning": "no reduction for congruence levels above one",
        }
    red, gamma = quotient.reduce(g)
    if operator_size(red) > operator_size(g):
        red, gamma = g, Mat.identity(g.nrows)
    ht = height_in_cusp(quotient.algebra, red).height
    return red, gamma, {"size": operator_size(red), "height": ht}


def reduction_fit(pairs):
    """Least-squares fit log|g_red| ~ log C + A log ht over recorded pairs."""
    import numpy as _np

    xs = _np.log([max(h, 1e-12) for _, h in pairs])
    ys = _np.log([max(s, 1e-12) for s, _ in pairs])
    a = _np.vstack([xs, _np.ones_like(xs)]).T
    sol, *_ = _np.linalg.lstsq(a, ys, rcond=None)
    slope, intercept = sol
    resid = ys - a @ sol
    return float(slope), float(math.exp(intercept)), float(_np.abs(resid).max())
