"""Seed derivation.

A master seed expands into independent per-stream seeds with the splitmix64 sequence:
stream ``i`` gets the ``i``-th output of a splitmix64 generator started at the master seed.
Adding workers therefore appends new streams and never reuses an existing one.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    z = (state + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of stream ``index`` (0-based) under ``master``."""
    state = (master + index * _GOLDEN_GAMMA) & _MASK64
    return splitmix64(state)


def derive_seeds(master: int, count: int) -> list[int]:
    return [derive_seed(master, i) for i in range(count)]


def make_rng(master: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, index))
