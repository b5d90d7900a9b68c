"""Counter-based seed derivation.

Every random draw in a simulation is keyed by a path of integers, e.g.
``(trial_index, user_index, purpose)``, appended to the spawn key of a root
:class:`numpy.random.SeedSequence`. Streams are therefore independent of the
order in which trials or users are evaluated, and of the number of workers.
"""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence"

# purpose tags for per-user streams
BETA = 0
CHANNEL = 1


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        return np.random.SeedSequence(int(seed))
    raise TypeError(f"cannot derive a seed stream from {type(seed).__name__}")


def derive(seed, *keys: int) -> np.random.SeedSequence:
    """Return the child stream at ``keys`` below ``seed``.

    Unlike ``SeedSequence.spawn`` this is stateless: calling it twice with
    the same arguments gives the same child.
    """
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(
        ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in keys)
    )


def generator(seed, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive(seed, *keys)))


def trial_stream(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    return derive(master_seed, trial_index)
