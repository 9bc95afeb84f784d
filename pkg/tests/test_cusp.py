import random
from fractions import Fraction

import pytest

from orbitlab.cusp import (
    Quotient,
    adjoint_lattice,
    height_float,
    height_in_cusp,
    in_compact_part,
    minht_estimate,
    reduce_representative,
    reduction_fit,
)
from orbitlab.errors import BudgetExhausted
from orbitlab.linalg import Mat, integer_kernel, shortest_vector_boxscan
from orbitlab.algebra import operator_size

from conftest import group_element_sampler


def exhaustive_shortest_oracle(gram):
    """Independent exhaustive enumeration (fresh complete-the-square recursion,
    exact fractions); returns the minimal nonzero lattice norm squared."""
    import math
    from math import isqrt

    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    diag = [Fraction(0)] * n
    coef = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        diag[i] = a[i][i]
        for j in range(i + 1, n):
            coef[i][j] = a[i][j] / diag[i]
        for r in range(i + 1, n):
            for s in range(r, n):
                a[r][s] -= diag[i] * coef[i][r] * coef[i][s]
                a[s][r] = a[r][s]
    best = [min(Fraction(gram[i][i]) for i in range(n))]

    def fsq(f):
        return isqrt(f.numerator * f.denominator) // f.denominator

    x = [0] * n

    def rec(i, partial):
        if partial > best[0]:
            return
        if i < 0:
            if any(x) and partial < best[0]:
                best[0] = partial
            return
        sh = sum(coef[i][j] * x[j] for j in range(i + 1, n))
        rad = fsq((best[0] - partial) / diag[i]) + 1
        for xi in range(math.floor(-sh) - rad, math.ceil(-sh) + rad + 1):
            t = xi + sh
            c = diag[i] * t * t
            if partial + c <= best[0]:
                x[i] = xi
                rec(i - 1, partial + c)
        x[i] = 0

    rec(n - 1, Fraction(0))
    return best[0]


@pytest.fixture(scope="module")
def sl2_quot():
    return Quotient.sl2_z()


@pytest.fixture(scope="module")
def so22_quot(q22, so22):
    return Quotient.so_q_z(q22, algebra=so22)


def test_adjoint_lattice_identity(sl2_quot):
    basis = adjoint_lattice(sl2_quot.algebra, Mat.identity(2))
    expected = [tuple(int(i == j) for j in range(3)) for i in range(3)]
    assert [tuple(v) for v in basis.vectors] == expected


def test_adjoint_lattice_unimodular(sl2_quot, rng):
    # Ad has determinant one on the algebra: Gram determinant is preserved
    sample = group_element_sampler(sl2_quot.algebra)
    base = adjoint_lattice(sl2_quot.algebra, Mat.identity(2))
    det0 = Mat(base.gram()).det()
    for _ in range(10):
        g = sample(rng)
        det1 = Mat(adjoint_lattice(sl2_quot.algebra, g).gram()).det()
        assert det1 == det0


def test_adjoint_lattice_gamma_same_set(sl2_quot, rng):
    # lattices for g and gamma*g agree as sets: change of basis is integral
    g = Mat([[1, Fraction(2, 3)], [Fraction(1, 5), Fraction(16, 15)]])
    for _ in range(10):
        gamma = sl2_quot.random_lattice_element(rng)
        b1 = adjoint_lattice(sl2_quot.algebra, g).vectors
        b2 = adjoint_lattice(sl2_quot.algebra, gamma * g).vectors
        m1 = Mat(b1)
        m2 = Mat(b2)
        change = m2 * m1.inverse()
        assert all(x.denominator == 1 for x in change.flat())
        assert abs(change.det()) == 1


def test_height_certified_vs_enumeration(sl2_quot, rng):
    sample = group_element_sampler(sl2_quot.algebra)
    for _ in range(15):
        g = sample(rng, steps=3)
        basis = adjoint_lattice(sl2_quot.algebra, g)
        rep = height_in_cusp(sl2_quot.algebra, g)
        assert rep.certified
        assert rep.lambda1_sq == exhaustive_shortest_oracle(basis.gram())


def test_height_certified_vs_enumeration_so22(so22_quot, q22, rng):
    sample = group_element_sampler(so22_quot.algebra, q22)
    for _ in range(6):
        g = sample(rng, steps=2)
        rep = height_in_cusp(so22_quot.algebra, g)
        basis = adjoint_lattice(so22_quot.algebra, g)
        assert rep.certified
        assert rep.lambda1_sq == exhaustive_shortest_oracle(basis.gram())


def test_boxscan_agrees_on_small_instances(sl2_quot):
    basis = adjoint_lattice(sl2_quot.algebra, Mat.identity(2))
    gram = basis.gram()
    box_sq, _ = shortest_vector_boxscan(gram)
    assert box_sq == exhaustive_shortest_oracle(gram) == 4


def test_height_gamma_invariance(sl2_quot, rng):
    g = Mat([[1, Fraction(1, 3)], [Fraction(1, 4), Fraction(13, 12)]])
    h0 = height_in_cusp(sl2_quot.algebra, g)
    for _ in range(50):
        gamma = sl2_quot.random_lattice_element(rng)
        h1 = height_in_cusp(sl2_quot.algebra, gamma * g)
        assert h1.lambda1_sq == h0.lambda1_sq


def test_height_diverges_along_diagonal(sl2_quot):
    values = []
    for s in range(1, 11):
        g = Mat([[2**s, 0], [0, Fraction(1, 2**s)]])
        values.append(height_in_cusp(sl2_quot.algebra, g).height)
    assert values == sorted(values)
    assert values[-1] > 1000


def test_shortest_vector_consistency(sl2_quot):
    rep = height_in_cusp(sl2_quot.algebra, Mat.identity(2))
    norm = sl2_quot.algebra.norm(rep.shortest_vector)
    assert abs(norm * rep.height - 1.0) < 1e-12


def test_in_compact_part_thresholds(sl2_quot):
    # identity has height 1/2: inside X_eta iff 1/2 <= 1/eta
    assert in_compact_part(sl2_quot.algebra, Mat.identity(2), Fraction(1, 5))
    g = Mat([[8, 0], [0, Fraction(1, 8)]])  # height 32
    assert not in_compact_part(sl2_quot.algebra, g, Fraction(1, 2))
    assert in_compact_part(sl2_quot.algebra, g, Fraction(1, 33))
    # indicator is nonincreasing in eta
    flags = [
        in_compact_part(sl2_quot.algebra, g, Fraction(1, d)) for d in (40, 33, 20, 10)
    ]
    assert flags == sorted(flags, reverse=True)


def test_minht_estimate_monotone(sl2_quot):
    gs = [Mat([[2**s, 0], [0, Fraction(1, 2**s)]]) for s in range(4)]
    vals = [minht_estimate(sl2_quot.algebra, gs[: k + 1]) for k in range(4)]
    assert all(vals[i + 1] <= vals[i] + 1e-15 for i in range(3))
    assert minht_estimate(sl2_quot.algebra, gs[:1]) == height_in_cusp(sl2_quot.algebra, gs[0]).height
    with pytest.raises(ValueError):
        minht_estimate(sl2_quot.algebra, [])


def test_reduce_representative_sl2(sl2_quot):
    g = Mat([[1, 10**6], [0, 1]])
    red, gamma, diag = reduce_representative(sl2_quot, g)
    assert diag["size"] <= 1.0 + 1e-12
    assert gamma * g == red
    # already reduced points stay put
    red2, gamma2, _ = reduce_representative(sl2_quot, red)
    assert red2 == red


def test_reduce_representative_guard(sl2_quot, rng):
    sample = group_element_sampler(sl2_quot.algebra)
    for _ in range(25):
        g = sample(rng)
        red, gamma, diag = reduce_representative(sl2_quot, g)
        assert operator_size(red) <= operator_size(g) + 1e-12
        assert sl2_quot.contains_lattice_element(gamma)


def test_reduction_fit_finite(sl2_quot, rng):
    pairs = []
    for s in range(1, 7):
        g = Mat([[2**s, Fraction(1, 3)], [0, Fraction(1, 2**s)]])
        _, _, diag = reduce_representative(sl2_quot, g)
        pairs.append((max(diag["size"], 1.0), diag["height"]))
    slope, coeff, resid = reduction_fit(pairs)
    assert slope == slope and coeff > 0  # finite fitted values


def test_reduce_so_q_improves(so22_quot, rng):
    for _ in range(5):
        gamma = so22_quot.random_lattice_element(rng, length=5)
        red, back, diag = reduce_representative(so22_quot, gamma)
        assert diag["size"] <= operator_size(gamma) + 1e-9


def test_unsupported_level_reduction_warns():
    qt = Quotient("sl2", Quotient.sl2_z().algebra, level=2)
    g = Mat([[1, 7], [0, 1]])
    red, gamma, diag = reduce_representative(qt, g)
    assert red == g and "warning" in diag


def test_height_float_close_to_exact(sl2_quot, rng):
    sample = group_element_sampler(sl2_quot.algebra)
    for _ in range(10):
        g = sample(rng, steps=3)
        exact = height_in_cusp(sl2_quot.algebra, g).height
        approx = height_float(sl2_quot.algebra, g.to_float())
        assert abs(exact - approx) < 1e-6 * max(1.0, exact)
