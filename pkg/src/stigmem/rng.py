"""Named, seed-keyed random streams.

Every source of randomness in a run draws from its own stream keyed by
``(seed, name)``. Two configurations sharing a seed therefore see the same
world, spawns and traits, and diverge only where their mechanics differ.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str) -> int:
    # crc32 is stable across interpreter runs, unlike hash()
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream_key(name)])))
