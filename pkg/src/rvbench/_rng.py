"""Seeding policy: one counter-based generator family, splittable per task.

Every stochastic component draws from a Philox generator keyed by an integer
seed plus an optional spawn key, so independent cells of a run (one per
model/horizon pair, one per refit) get non-overlapping streams while the whole
run stays reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def seed_sequence(seed, spawn_key: tuple[int, ...] = ()) -> np.random.SeedSequence:
    """Build a SeedSequence from an int or an existing sequence."""
    if isinstance(seed, np.random.SeedSequence):
        if spawn_key:
            return np.random.SeedSequence(
                entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + spawn_key
            )
        return seed
    return np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)


def make_rng(seed, spawn_key: tuple[int, ...] = ()) -> np.random.Generator:
    """Return a Generator; pass-through if ``seed`` already is one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed_sequence(seed, spawn_key)))
