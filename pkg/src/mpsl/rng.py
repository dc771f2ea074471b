"""Portable xoshiro256** generator for reproducible shuffles.

Cross-validation splits must be identical across platforms and languages,
so the shuffle is driven by a fixed, fully specified generator instead of
whatever numpy happens to ship. State is seeded from a single 64-bit
integer through splitmix64, as recommended by the xoshiro authors.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def _splitmix64_stream(seed: int):
    z = seed & _MASK64
    while True:
        z = (z + 0x9E3779B97F4A7C15) & _MASK64
        out = z
        out = ((out ^ (out >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        out = ((out ^ (out >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield out ^ (out >> 31)


class Xoshiro256StarStar:
    """xoshiro256** with 64-bit integer seeding via splitmix64."""

    def __init__(self, seed: int):
        expand = _splitmix64_stream(int(seed))
        self._s = [next(expand) for _ in range(4)]

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, bound: int) -> int:
        # Unbiased draw from [0, bound) by masked rejection: mask to the
        # smallest covering power of two, retry on overshoot.
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            r = self.next_uint64() & mask
            if r < bound:
                return r

    def shuffle(self, items: list) -> None:
        # Fisher-Yates, iterating from the top so draw order is fixed.
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
