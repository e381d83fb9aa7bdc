"""Mixed-radix table layout shared by every table in noisynet.

A flat offset treats each variable as a digit whose radix is the
variable's cardinality; the LAST variable varies fastest (numpy's
C-order).
"""

import math
from typing import Iterator, Sequence

import numpy as np


def n_joint_states(cardinalities: Sequence[int]) -> int:
    """Get the number of joint states (empty product is 1)."""
    return math.prod(cardinalities)


def mixed_radix_index(indices: Sequence[int], cardinalities: Sequence[int]) -> int:
    """Map an index vector to its flat offset."""
    if len(indices) != len(cardinalities):
        raise ValueError(
            f"index vector has {len(indices)} entries but there are {len(cardinalities)} radices"
        )
    for i, (j, m) in enumerate(zip(indices, cardinalities)):
        if not 0 <= j < m:
            raise ValueError(f"index {j} at position {i} is out of range for radix {m}")
    if not cardinalities:
        return 0
    return int(np.ravel_multi_index(tuple(indices), tuple(cardinalities)))


def mixed_radix_decode(flat: int, cardinalities: Sequence[int]) -> tuple[int, ...]:
    """Map a flat offset back to its index vector."""
    if not 0 <= flat < n_joint_states(cardinalities):
        raise ValueError(f"flat offset {flat} is out of range for radices {cardinalities}")
    if not cardinalities:
        return ()
    return tuple(int(j) for j in np.unravel_index(flat, tuple(cardinalities)))


def iter_joint_states(cardinalities: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every index vector in canonical (flat offset) order."""
    yield from np.ndindex(*cardinalities)


def joint_state_matrix(cardinalities: Sequence[int]) -> np.ndarray:
    """Get an (S, n) integer array, row k holding the index vector at offset k."""
    if not cardinalities:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(cardinalities)).reshape(len(cardinalities), -1)
    return grids.T.astype(np.int64)
