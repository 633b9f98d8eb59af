"""Derived seeds for reproducible Monte Carlo runs.

Every stochastic operation derives one seed per trial from
``(seed, stream, index)`` with ``numpy.random.SeedSequence``:

    derive_seed(seed, stream, index) =
        SeedSequence([seed mod 2**64, STREAMS[stream], index]).generate_state(1, uint64)[0]

User seeds are any Python int; they are reduced mod 2**64 first, so -1 and
2**64 - 1 name the same run. The mixing is counter based, so a trial's
randomness does not depend on the order in which trials run. The stream tags
below are part of the reproducibility contract and must not be renumbered.
"""
from typing import Dict

import numpy as np

SEED_MODULUS = 2 ** 64

STREAMS: Dict[str, int] = {
    "tree-name": 1,
    "sample": 2,
    "pair": 3,
    "point-a": 4,
    "point-b": 5,
}


def derive_seed(seed: int, stream: str, index: int) -> int:
    sequence = np.random.SeedSequence([int(seed) % SEED_MODULUS, STREAMS[stream], int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def rng_for(seed: int, stream: str, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, stream, index))
