import random
from fractions import Fraction

import pytest

from orbitlab.algebra import build_so_q, sl2
from orbitlab.linalg import Mat


@pytest.fixture(scope="session")
def sl2_algebra():
    return sl2()


@pytest.fixture(scope="session")
def q22():
    return Mat([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])


@pytest.fixture(scope="session")
def so22(q22):
    return build_so_q(q22, name="so22")


@pytest.fixture(scope="session")
def q32():
    return Mat(
        [
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [0, 0, 0, -1, 0],
            [0, 0, 0, 0, -1],
        ]
    )


@pytest.fixture(scope="session")
def so32(q32):
    return build_so_q(q32, name="so32")


def random_fraction(rng, max_num=6, max_den=4):
    return Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))


def random_coords(rng, dim, max_num=6, max_den=4):
    return tuple(random_fraction(rng, max_num, max_den) for _ in range(dim))


def random_int_coords(rng, dim, bound=3):
    return tuple(rng.randint(-bound, bound) for _ in range(dim))


def group_element_sampler(algebra, q=None, entry_bound=1):
    """Returns rng -> exact rational element of the group (SL2 or SO_Q),
    built as a product of exponentials of nilpotent directions."""
    from orbitlab.algebra import exp_nilpotent, so_q_nilpotents

    if q is None:
        nilpotents = [algebra.basis[0], algebra.basis[1]]  # E, F in sl2
    else:
        nilpotents = so_q_nilpotents(q, entry_bound=entry_bound, limit=24)

    def sample(rng, steps=4, max_num=2, max_den=3):
        out = Mat.identity(algebra.matrix_size)
        for _ in range(steps):
            x = nilpotents[rng.randrange(len(nilpotents))]
            t = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
            if t:
                out = out * exp_nilpotent(t * x)
        return out

    return sample


@pytest.fixture
def rng():
    return random.Random(20260810)

