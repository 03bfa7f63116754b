"""Deterministic random-stream plumbing shared by all stochastic components."""

from __future__ import annotations

import numpy as np


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for the substream (master_seed, *key).

    Streams with distinct keys are statistically independent, and the same
    (seed, key) always yields the same stream regardless of how many other
    streams were created. This is what makes trial-level parallelism
    reproducible: worker i always gets derive_rng(seed, i).
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def derive_seed(master_seed: int, *key: int) -> int:
    """Collapse (master_seed, *key) into a single 64-bit seed."""
    ss = np.random.SeedSequence(master_seed, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def rand_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) at arbitrary precision.

    numpy generators only draw fixed-width integers; hyperedge counts reach
    2^N for N in the tens of thousands, so ranks are assembled from 32-bit
    words and rejected when they overshoot (acceptance probability > 1/2).
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    nbits = int(bound).bit_length()
    nwords = (nbits + 31) // 32
    shift = nwords * 32 - nbits
    while True:
        value = 0
        for word in rng.integers(0, 1 << 32, size=nwords, dtype=np.uint64):
            value = (value << 32) | int(word)
        value >>= shift
        if value < bound:
            return value
