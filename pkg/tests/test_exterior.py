import math
import random
from fractions import Fraction

import pytest

from orbitlab.errors import DimensionMismatch, OrbitLabError
from orbitlab.exterior import (
    SubgroupData,
    WedgeVector,
    discriminant,
    induced_action,
    orbit_map,
    subgroup_height,
    transversal_norm,
    transversal_vanishes,
    wedge_basis_vector,
    wedge_of_vectors,
    wedge_with_vector,
)
from orbitlab.linalg import Mat, rank

from conftest import group_element_sampler, random_coords, random_int_coords


def unipotent_line(algebra):
    return SubgroupData(algebra, [(1, 0, 0)], label="upper-unipotent")


def torus_line(algebra):
    return SubgroupData(algebra, [(0, 0, 1)], label="diag-torus")


def test_wedge_basis_vector_line(sl2_algebra):
    m = unipotent_line(sl2_algebra)
    v = wedge_basis_vector(m)
    assert v.coords == {(0,): 1}
    assert v.is_integral_primitive()


def test_wedge_basis_vector_gcd_normalization(sl2_algebra):
    m = SubgroupData(sl2_algebra, [(0, 0, Fraction(6, 10))], label="torus-scaled")
    v = wedge_basis_vector(m)
    assert v.coords == {(2,): 1}


def test_wedge_scaling_invariance(sl2_algebra):
    m1 = torus_line(sl2_algebra)
    m2 = SubgroupData(sl2_algebra, [(0, 0, Fraction(7, 3))], label="torus-rescaled")
    assert wedge_basis_vector(m1) == wedge_basis_vector(m2)


def test_wedge_depends_only_on_span(so22, rng):
    # different spanning sets of one plane give one primitive vector
    for _ in range(25):
        a = random_coords(rng, 6, max_num=3)
        b = random_coords(rng, 6, max_num=3)
        if rank([a, b]) != 2:
            continue
        m1 = SubgroupData(so22, [a, b], label="p", validate=False)
        c = tuple(x + 2 * y for x, y in zip(a, b))
        d = tuple(3 * y for y in b)
        m2 = SubgroupData(so22, [c, d], label="p2", validate=False)
        assert wedge_basis_vector(m1) == wedge_basis_vector(m2)


def test_induced_action_identity_and_degree_one(sl2_algebra, rng):
    sample = group_element_sampler(sl2_algebra)
    g = sample(rng)
    w = wedge_of_vectors(sl2_algebra, [random_coords(rng, 3)])
    assert induced_action(Mat.identity(2), w) == w
    moved = induced_action(g, w)
    # degree 1 reduces to the adjoint action on coordinates
    ad = sl2_algebra.adjoint_coords_matrix(g)
    direct = ad.apply([w.coords.get((j,), 0) for j in range(3)])
    assert moved.coords == {(j,): c for j, c in enumerate(direct) if c}


def test_induced_action_homomorphism(sl2_algebra, rng):
    sample = group_element_sampler(sl2_algebra)
    for _ in range(30):
        g = sample(rng)
        h = sample(rng)
        w = wedge_of_vectors(
            sl2_algebra, [random_coords(rng, 3), random_coords(rng, 3)]
        )
        if w.is_zero():
            continue
        assert induced_action(g, induced_action(h, w)) == induced_action(g * h, w)


def test_orbit_map_identity_and_torus_action(sl2_algebra):
    m = unipotent_line(sl2_algebra)
    assert orbit_map(m, Mat.identity(2)) == wedge_basis_vector(m)
    lam = Fraction(3)
    g = Mat([[lam, 0], [0, 1 / lam]])
    eta = orbit_map(m, g)
    assert eta.coords == {(0,): Fraction(1, 9)}


def test_orbit_map_gamma_invariance(sl2_algebra, rng):
    sample = group_element_sampler(sl2_algebra)
    m = torus_line(sl2_algebra)
    for _ in range(50):
        # integral gamma: word in the standard shears
        gamma = Mat.identity(2)
        for _ in range(4):
            k = rng.randint(-3, 3)
            shear = Mat([[1, k], [0, 1]]) if rng.random() < 0.5 else Mat([[1, 0], [k, 1]])
            gamma = gamma * shear
        g = sample(rng)
        mg = m.conjugated(gamma)
        lhs = orbit_map(mg, gamma * g)
        rhs = orbit_map(m, g)
        assert lhs == rhs or lhs == rhs.scaled(-1)


def test_discriminant_grows_polynomially_along_flow(sl2_algebra):
    from orbitlab.algebra import NilpotentDirection

    m = torus_line(sl2_algebra)
    z = NilpotentDirection(sl2_algebra, (1, 0, 0))
    values = [discriminant(m, z.at(s)) for s in range(0, 12, 2)]
    assert values == sorted(values)
    # degree check: disc^2 is a polynomial in s of degree <= 2*(ad order - 1)
    s = Fraction(10)
    big = discriminant(m, z.at(s))
    assert big <= subgroup_height(m) * (1 + float(s)) ** (z.ad_order - 1) * 4


def test_subgroup_height_and_gram_oracle(so22, rng):
    # height agrees with the Gram-determinant covolume of the primitive vector
    for _ in range(20):
        vecs = [random_int_coords(rng, 6, 3) for _ in range(2)]
        if rank(vecs) != 2:
            continue
        m = SubgroupData(so22, vecs, label="plane", validate=False)
        w = wedge_basis_vector(m)
        # Gram determinant of the primitively scaled spanning pair
        content = wedge_of_vectors(so22, vecs).content()
        gram = [[float(so22.inner(u, v)) for v in vecs] for u in vecs]
        det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
        oracle = math.sqrt(abs(det)) / float(content)
        assert abs(subgroup_height(m) - oracle) < 1e-7 * max(1.0, oracle)


def test_transversal_norm_zero_iff_membership(sl2_algebra, rng):
    m = torus_line(sl2_algebra)
    e_coords = (1, 0, 0)
    h_coords = (0, 0, 1)
    assert transversal_norm(m, Mat.identity(2), h_coords) == 0
    assert transversal_norm(m, Mat.identity(2), e_coords) > 0
    sample = group_element_sampler(sl2_algebra)
    for _ in range(50):
        g = sample(rng)
        z = random_coords(rng, 3, max_num=2)
        if not any(z):
            continue
        vanishes = transversal_norm(m, g, z) < 1e-12
        assert vanishes == transversal_vanishes(m, g, z)


def test_transversal_norm_top_degree_guard(sl2_algebra):
    full = SubgroupData(
        sl2_algebra, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], label="everything"
    )
    with pytest.raises(DimensionMismatch):
        transversal_norm(full, Mat.identity(2), (1, 0, 0))


def test_wedge_with_vector_antisymmetry(so22, rng):
    for _ in range(20):
        a = random_coords(rng, 6)
        w = wedge_of_vectors(so22, [a])
        assert wedge_with_vector(a, w).is_zero()


def test_degree_cap():
    from orbitlab.exterior import subsets

    with pytest.raises(OrbitLabError):
        WedgeVector.__new__(WedgeVector).__init__(None, 13, {})


def test_projectivized_equality_helper(sl2_algebra):
    w = wedge_of_vectors(sl2_algebra, [(1, 2, 3)])
    assert w.same_line(w.scaled(-5))
    v = wedge_of_vectors(sl2_algebra, [(1, 2, 4)])
    assert not w.same_line(v)
