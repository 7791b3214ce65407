"""Deterministic seed splitting.

A stream is addressed by (master seed, key path): child(master, g, r) is
``SeedSequence(master, spawn_key=(g, r))``. Nothing depends on how many
streams were created before, so parallel and serial runs agree.
"""
from __future__ import annotations

import numpy as np


def child(seed, *key: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)
    return np.random.SeedSequence(seed, spawn_key=key)


def children(seed, count: int) -> list[np.random.SeedSequence]:
    return [child(seed, i) for i in range(count)]
