"""Seeding conventions.

Every randomized routine takes a seed (int or numpy Generator).  Trial i of a
sweep with master seed m uses SeedSequence(m, spawn_key=(i,)), so results are
independent of how trials are batched across workers.  Monte Carlo integration
draws in fixed-size blocks with per-block substreams for the same reason.
"""

from __future__ import annotations

import numpy as np


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence, or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """The canonical per-trial stream: reproducible at any parallelism."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial_index,))
    return np.random.default_rng(ss)


def block_rng(master_seed: int, block_index: int) -> np.random.Generator:
    """Per-block substream for blocked Monte Carlo sums."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(block_index,))
    return np.random.default_rng(ss)
