"""Deterministic seed fan-out.

A single 64-bit base seed is split into independent streams keyed by an
integer path, so the random numbers drawn by one stage never depend on how
many draws another stage made or on call order.
"""

import numpy as np


def split_seed(base_seed: int, *path: int) -> np.random.SeedSequence:
    """Derive an independent child seed for the given integer path."""
    return np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(p) for p in path))


def split_rng(base_seed: int, *path: int) -> np.random.Generator:
    """Generator seeded by ``split_seed(base_seed, *path)``."""
    return np.random.default_rng(split_seed(base_seed, *path))
