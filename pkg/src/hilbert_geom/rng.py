"""Seeded randomness.

Every random stream is a numpy ``Generator`` over the counter-based Philox
bit generator, keyed by ``SeedSequence([seed, *stream])``.  Streams are
identified by small integer tuples (suite id, shard index, ...), so work
split across shards draws the same numbers no matter how many processes
run it.
"""
from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    key = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
