"""Reproducible random streams for parallel Monte Carlo.

Every simulation routine takes a ``numpy.random.Generator``.  For parallel
runs, each task gets its own stream derived from (seed, task index) through
the counter-based Philox generator, so results do not depend on scheduling
order or thread count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, task: int = 0) -> np.random.Generator:
    """Return the generator for worker `task` of a run with the given seed.

    The mapping (seed, task) -> 128-bit Philox key is fixed: the seed fills
    the high 64 bits and the task index the low 64 bits.
    """
    key = ((seed & _MASK64) << 64) | (task & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
