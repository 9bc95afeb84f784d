"""orbitlab: a desk-scale laboratory for effective equidistribution
experiments on arithmetic quotients.

Exact rational cores (Lie algebra arithmetic, exterior powers, lattice
heights) feed floating-point experiment drivers (windowed Birkhoff averages,
polynomial divergence, near-return detection).
"""

from .algebra import (
    LieAlgebraData,
    NilpotentDirection,
    adjoint,
    bracket,
    build_so_q,
    exp_nilpotent,
    operator_size,
    sl2,
)
from .linalg import Mat

__all__ = [
    "LieAlgebraData",
    "Mat",
    "NilpotentDirection",
    "adjoint",
    "bracket",
    "build_so_q",
    "exp_nilpotent",
    "operator_size",
    "sl2",
]

__version__ = "0.1.0"
