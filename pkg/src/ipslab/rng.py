"""Seedable bit source used by every randomized component."""
from __future__ import annotations

import numpy as np

_MAX_NUMPY_RANGE = 1 << 63


def seed_sequence(seed: int, *spawn_key: int) -> np.random.SeedSequence:
    """Child seed sequence for ``(seed, *spawn_key)``; independent of scheduling order."""
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in spawn_key))


class RandomSource:
    """Uniform random bits and exact uniform integers over a PCG64 stream.

    ``seed`` may be an int, a ``SeedSequence`` or an existing ``RandomSource``.
    """

    def __init__(self, seed=0):
        if isinstance(seed, RandomSource):
            self.generator = seed.generator
        else:
            if not isinstance(seed, np.random.SeedSequence):
                seed = np.random.SeedSequence(int(seed))
            self.generator = np.random.Generator(np.random.PCG64(seed))
        self._word = 0
        self._left = 0

    def raw64(self, count: int) -> np.ndarray:
        """``count`` uniform 64-bit words."""
        return self.generator.bit_generator.random_raw(int(count))

    def bit(self) -> int:
        if self._left == 0:
            self._word = int(self.raw64(1)[0])
            self._left = 64
        self._left -= 1
        b = self._word & 1
        self._word >>= 1
        return b

    def bits_array(self, count: int) -> np.ndarray:
        """``count`` uniform bits as a uint8 array of zeros and ones."""
        words = self.raw64((count + 63) // 64)
        return np.unpackbits(words.view(np.uint8))[:count]

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        words = self.raw64((k + 63) // 64)
        value = 0
        for w in words:
            value = (value << 64) | int(w)
        return value >> (64 * len(words) - k)

    def randrange(self, n: int) -> int:
        """Exactly uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("randrange needs a positive bound")
        if n <= _MAX_NUMPY_RANGE:
            return int(self.generator.integers(0, n))
        k = (n - 1).bit_length()
        while True:
            v = self.randbits(k)
            if v < n:
                return v

    def bernoulli(self, num: int, den: int) -> bool:
        """True with probability exactly ``num/den``."""
        return self.randrange(den) < num
