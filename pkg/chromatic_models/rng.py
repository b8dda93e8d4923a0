"""Seeded, splittable random streams.

Every random decision is drawn from a PCG64 stream derived from the run seed
and a ``(kind, index)`` spawn key, so a history depends only on the seed and
the step number, never on how many draws earlier steps consumed.
"""

from fractions import Fraction

import numpy as np

SCHEDULE = 0
COMPLETION = 1
SAMPLING = 2

SEED_MASK = (1 << 64) - 1


def stream(seed: int, kind: int, index: int = 0) -> np.random.Generator:
    seq = np.random.SeedSequence(seed & SEED_MASK, spawn_key=(kind, index))
    return np.random.Generator(np.random.PCG64(seq))


def bernoulli(gen: np.random.Generator, p: Fraction) -> bool:
    """Exact-rational coin: true with probability ``p``."""
    if p <= 0:
        return False
    if p >= 1:
        return True
    return int(gen.integers(0, p.denominator)) < p.numerator


def shuffled(gen: np.random.Generator, items: list) -> list:
    order = gen.permutation(len(items))
    return [items[i] for i in order]
