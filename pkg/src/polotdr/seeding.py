"""Seed fan-out.

A scenario carries one ``master_seed``. Run ``r`` (one fiber of a Monte-Carlo
batch) derives its own seeds as::

    SeedSequence([master_seed, r]).generate_state(4, uint64)
        -> (fiber_seed, noise_seed, laser_seed, theta_seed)

Every per-segment draw then uses a counter-based Philox stream keyed by
``(sub_seed, segment_index)``, so segments can be generated in any order.
"""

from typing import NamedTuple

import numpy as np

MASK64 = (1 << 64) - 1


class RunSeeds(NamedTuple):
    fiber: int
    noise: int
    laser: int
    theta: int


def split_seeds(master_seed, run_index=0):
    state = np.random.SeedSequence([int(master_seed) & MASK64, int(run_index)]).generate_state(
        4, np.uint64
    )
    return RunSeeds(*(int(s) for s in state))


def stream(seed, index=0):
    """Independent generator for ``(seed, index)``."""
    key = np.array([int(seed) & MASK64, int(index) & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
