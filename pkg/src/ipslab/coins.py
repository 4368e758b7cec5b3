"""Coins whose head probability spells out membership bits.

The head probability is ``p = 0.x1 0 1 x2 0 1 x3 0 1 ...`` in binary.  A toss
compares uniform bits with the digits of ``p`` until they first differ, so the
probability of a head is exactly ``p`` for any language, computable or not.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import BudgetError, InputDomainError, UnsupportedSpecError
from .langspace import LanguageSpec, membership_bit
from .rng import RandomSource

_CHUNK = 64


class ProbBitStream:
    """Lazy binary expansion of ``p``; immutable apart from an internal cache."""

    def __init__(self, spec: LanguageSpec | None = None, *, digit_fn: Callable[[int], int] | None = None):
        if (spec is None) == (digit_fn is None):
            raise InputDomainError("give exactly one of spec or digit_fn")
        self.spec = spec
        self._digit_fn = digit_fn
        self._chunks: dict[int, int] = {}

    @classmethod
    def from_digits(cls, digit_fn: Callable[[int], int]) -> "ProbBitStream":
        """A stream with arbitrary digits, e.g. the all-ones expansion in tests."""
        return cls(digit_fn=digit_fn)

    def digit(self, j: int) -> int:
        if j < 1:
            raise InputDomainError(f"digit positions start at 1, got {j}")
        if self._digit_fn is not None:
            return int(self._digit_fn(j))
        r = j % 3
        if r == 1:
            return membership_bit(self.spec, (j + 2) // 3)
        return 0 if r == 2 else 1

    def chunk(self, index: int) -> int:
        """Digits ``64*index+1 .. 64*index+64`` packed most-significant first."""
        value = self._chunks.get(index)
        if value is None:
            value = 0
            base = index * _CHUNK
            for j in range(base + 1, base + _CHUNK + 1):
                value = (value << 1) | self.digit(j)
            self._chunks[index] = value
        return value


def prob_digit(stream: ProbBitStream, j: int) -> int:
    return stream.digit(j)


def prob_value(spec: LanguageSpec) -> Fraction:
    """Exact ``p`` for a bit-rule spec (its expansion is eventually periodic)."""
    if spec.kind != "bit-rule":
        raise UnsupportedSpecError("exact head probabilities exist only for bit-rule specs")
    if spec.tail == "periodic":
        period = list(spec.pattern)
    else:
        period = [1 if spec.tail == "all-one" else 0]
    head = [d for x in spec.prefix for d in (x, 0, 1)]
    cycle = [d for x in period for d in (x, 0, 1)]
    head_val = sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(head))
    cycle_int = int("".join(map(str, cycle)), 2)
    cycle_val = Fraction(cycle_int, 2 ** len(cycle) - 1)
    return head_val + cycle_val / 2 ** len(head)


@dataclass(frozen=True)
class HeadCount:
    tosses: int
    heads: int

    def __post_init__(self):
        if not 0 <= self.heads <= self.tosses:
            raise InputDomainError("head count must lie in [0, tosses]")


class BiasedCoin:
    """Exact sampler for the coin described by ``stream``.

    ``toss`` walks the expansion digit by digit.  The bulk methods compare
    64-digit chunks against raw 64-bit words, which is the same comparison done
    a word at a time: a tie moves on to the next chunk.
    """

    def __init__(self, stream: ProbBitStream, rng: RandomSource):
        self.stream = stream
        self.rng = rng
        self.last_digits = 0
        self._buffer = np.zeros(0, dtype=bool)
        self._pos = 0

    def toss(self) -> bool:
        """One toss; True means head.  ``last_digits`` records the digits consumed."""
        j = 1
        while True:
            u = self.rng.bit()
            p = self.stream.digit(j)
            if u != p:
                self.last_digits = j
                return u < p
            j += 1

    def _resolve_tie(self) -> bool:
        index = 1
        while True:
            c = self.stream.chunk(index)
            v = int(self.rng.raw64(1)[0])
            if v != c:
                return v < c
            index += 1

    def toss_flags(self, n: int) -> np.ndarray:
        """``n`` independent tosses as a boolean array (True = head)."""
        hi = np.uint64(self.stream.chunk(0))
        u = self.rng.raw64(n)
        heads = u < hi
        for idx in np.flatnonzero(u == hi):
            heads[idx] = self._resolve_tie()
        return heads

    def next_toss(self) -> bool:
        """Buffered single toss drawn from ``toss_flags`` blocks."""
        if self._pos >= self._buffer.size:
            self._buffer = self.toss_flags(4096)
            self._pos = 0
        self._pos += 1
        return bool(self._buffer[self._pos - 1])

    def count_heads(self, n: int, chunk: int = 1 << 20) -> HeadCount:
        heads = 0
        left = n
        while left > 0:
            m = min(left, chunk)
            heads += int(np.count_nonzero(self.toss_flags(m)))
            left -= m
        return HeadCount(n, heads)


def coin_for(spec: LanguageSpec, rng: RandomSource) -> BiasedCoin:
    return BiasedCoin(ProbBitStream(spec), rng)


def toss(coin: BiasedCoin) -> bool:
    return coin.toss()


def fact1_bit(heads: int, k: int) -> int:
    """Bit ``3k+3`` of ``heads`` counting from the least significant bit as 1."""
    return (heads >> (3 * k + 2)) & 1


def head_block_digit(t: int, k: int) -> int:
    """Guess from counting heads in blocks of ``8**k``: 1 iff the block index mod 8 is 4..7."""
    j = (t // 8**k) % 8
    return int(j >= 4)


def estimate_membership_bit(spec: LanguageSpec, k: int, rng: RandomSource | int = 0,
                            max_tosses: int = 2**26) -> int:
    """Guess ``x_k`` from ``64**k`` tosses of the coin built from ``spec``."""
    if k < 1:
        raise InputDomainError("k must be positive")
    n = 64**k
    if n > max_tosses:
        raise BudgetError(f"64^{k} = {n} tosses exceed the toss budget {max_tosses}")
    coin = coin_for(spec, rng if isinstance(rng, RandomSource) else RandomSource(rng))
    return fact1_bit(coin.count_heads(n).heads, k)
