"""Counter-based seed derivation for reproducible parallel sweeps.

A scenario owns one 64-bit seed; every draw gets its own child seed derived
from (seed, counter) through a splitmix64 hash. Child streams are therefore
independent of worker count and execution order.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; a bijective 64-bit mix with good avalanche."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, counter: int) -> int:
    """Child seed for draw `counter` of the stream rooted at `seed`."""
    return splitmix64((seed & _MASK64) ^ splitmix64(counter & _MASK64))


def rng_for(seed: int, counter: int) -> random.Random:
    """Fresh RNG for one draw; identical across serial and parallel runs."""
    return random.Random(derive_seed(seed, counter))
