"""Deterministic 64-bit RNG used by builders and data generators.

Graph construction and synthetic data must be reproducible from a seed alone,
across implementations, so we pin the exact algorithm instead of deferring to
a library generator.  The generator is SplitMix64:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output: z XOR (z >> 31)

`below(n)` draws bounded integers by rejection: draw u64 words until one is
< 2^64 - (2^64 mod n), return that word mod n.  `uniform()` returns
(word >> 11) / 2^53 in [0, 1).  All consumers document their draw order in
terms of these primitives.
"""

from __future__ import annotations

import numpy as np

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """Sequential SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = 2**64 - (2**64 % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates: for i = len-1..1 swap items[i], items[below(i+1)]."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def u64_array(self, count: int) -> np.ndarray:
        """`count` consecutive next_u64() outputs as a uint64 array.

        Vectorized but stream-identical to calling next_u64() `count` times:
        SplitMix64's state is a counter, so outputs are a pure function of
        seed + i*gamma.
        """
        i = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self._state) + i * np.uint64(_GAMMA)
        self._state = (self._state + count * _GAMMA) & _MASK
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform_array(self, count: int) -> np.ndarray:
        """`count` consecutive uniform() outputs as float64 in [0, 1)."""
        return (self.u64_array(count) >> np.uint64(11)) * (2.0**-53)
