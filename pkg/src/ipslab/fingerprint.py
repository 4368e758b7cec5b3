"""Random-prime fingerprints and the exhaustive calibration of the width constant ``c``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from .errors import BudgetError, InputDomainError
from .rng import RandomSource

# Miller-Rabin with the first 13 primes as bases is exact below this bound; wider
# candidates fall back to Baillie-PSW, which has no known counterexample.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_EXACT_BOUND = 3317044064679887385961981
MAX_PRIME_BITS = MR_EXACT_BOUND.bit_length() - 1

# Smallest c with P3(cm, m)/P1(cm) < 1/8 at m = 22 (the largest m we sweep at
# desk scale); see ``calibrate_c``.
DEFAULT_C = 12


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's parameter choice."""
    if isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U = U * V % n
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U2, V2 = P * U + V, D * U + P * V
            if U2 & 1:
                U2 += n
            if V2 & 1:
                V2 += n
            U, V = (U2 >> 1) % n, (V2 >> 1) % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_prime(n: int) -> bool:
    """Primality: exact Miller-Rabin below ``MR_EXACT_BOUND``, Baillie-PSW above it."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < MR_EXACT_BOUND:
        return all(_strong_probable_prime(n, a) for a in _MR_BASES)
    return _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n)


def is_certified_width(bitwidth: int) -> bool:
    """True when every candidate of this width is decided by the exact witness set."""
    return bitwidth <= MAX_PRIME_BITS


def sample_prime(bitwidth: int, rng: RandomSource) -> int:
    """Uniformly random prime in ``[2, 2**bitwidth]`` by rejection."""
    if bitwidth < 2:
        raise InputDomainError("bitwidth must be at least 2")
    span = (1 << bitwidth) - 1
    while True:
        x = 2 + rng.randrange(span)
        if is_prime(x):
            return x


def fingerprint_width(c: int, k: int) -> int:
    """``max(2, ceil(c * 4 * log2 k))`` computed exactly as ``ceil(log2(k**(4c)))``."""
    if c < 1 or k < 1:
        raise InputDomainError("c and k must be positive")
    return max(2, (k ** (4 * c) - 1).bit_length())


@dataclass(frozen=True)
class ModCounter:
    modulus: int
    value: int = 0

    def __post_init__(self):
        if self.modulus < 1:
            raise InputDomainError("modulus must be positive")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)


def mod_step(counter: ModCounter, op: str, v: int | None = None) -> ModCounter:
    """Apply ``inc``, ``add v`` or ``mul v`` and reduce."""
    if op == "inc":
        return ModCounter(counter.modulus, (counter.value + 1) % counter.modulus)
    if v is None or v < 0:
        raise InputDomainError(f"{op} needs a nonnegative operand")
    if op == "add":
        return ModCounter(counter.modulus, (counter.value + v) % counter.modulus)
    if op == "mul":
        return ModCounter(counter.modulus, counter.value * v % counter.modulus)
    raise InputDomainError(f"unknown counter operation {op!r}")


@dataclass(frozen=True)
class FingerprintParams:
    c: int
    bitwidth: int
    p1: int
    p2: int
    r1: int = 0
    r2: int = 0

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not is_prime(p) or p > 1 << self.bitwidth:
                raise InputDomainError(f"{p} is not a prime of at most {self.bitwidth} bits")
        if not (0 <= self.r1 < self.p1 and 0 <= self.r2 < self.p2):
            raise InputDomainError("residues must be reduced")


def draw_params(c: int, k: int, rng: RandomSource) -> FingerprintParams:
    width = fingerprint_width(c, k)
    p1 = sample_prime(width, rng)
    p2 = sample_prime(width, rng)
    return FingerprintParams(c, width, p1, p2, pow(64, k, p1), 0)


def collision_rate(n1: int, n2: int, bitwidth: int, trials: int, rng: RandomSource | int = 0) -> float:
    """Fraction of sampled primes ``p`` with ``n1 = n2 (mod p)``."""
    if trials < 1:
        raise InputDomainError("trials must be positive")
    rng = rng if isinstance(rng, RandomSource) else RandomSource(rng)
    hits = 0
    for _ in range(trials):
        p = sample_prime(bitwidth, rng)
        hits += (n1 - n2) % p == 0
    return hits / trials


# --- calibration -----------------------------------------------------------

def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


@dataclass(frozen=True)
class CalibrationResult:
    m: int
    epsilon: Fraction
    c: int
    ratio: Fraction

    def to_dict(self) -> dict:
        return {"m": self.m, "epsilon": str(self.epsilon), "c": self.c,
                "ratio": str(self.ratio), "ratio_float": float(self.ratio)}


class _DivisorCounter:
    """For every difference ``d`` in ``[1, 2**m]``, how many primes ``<= bound`` divide it."""

    def __init__(self, m: int):
        self.top = 1 << m
        self.counts = np.zeros(self.top + 1, dtype=np.int16)
        self.bound = 1
        self._primes = primes_upto(self.top)

    def extend(self, bound: int) -> int:
        """Raise the prime bound and return max_d of the divisor count."""
        if bound > self.bound:
            lo, hi = np.searchsorted(self._primes, [self.bound + 1, min(bound, self.top) + 1])
            for p in self._primes[lo:hi]:
                self.counts[p::p] += 1
            self.bound = bound
        return int(self.counts[1:].max())


def prime_count(n: int) -> int:
    return int(primes_upto(n).size)


def calibration_ratio(m: int, c: int, counter: _DivisorCounter | None = None) -> Fraction:
    """``P3(cm, m) / P1(cm)``: worst-case share of primes up to ``2**ceil(log2 cm)`` that
    divide some difference of two distinct ``m``-bit numbers."""
    bound = 1 << (c * m - 1).bit_length()
    counter = counter or _DivisorCounter(m)
    p3 = counter.extend(bound)
    return Fraction(p3, prime_count(bound))


def calibrate_c(m: int, epsilon, *, max_m: int = 24, max_c: int = 256) -> CalibrationResult:
    """Smallest ``c`` with ``P3(cm, m)/P1(cm) < epsilon`` by exhaustive counting."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise InputDomainError("epsilon must lie in (0, 1]")
    if m < 1:
        raise InputDomainError("m must be positive")
    if m > max_m:
        raise BudgetError(f"m = {m} exceeds the exhaustive-search limit {max_m}")
    counter = _DivisorCounter(m)
    for c in range(1, max_c + 1):
        ratio = calibration_ratio(m, c, counter)
        if ratio < epsilon:
            return CalibrationResult(m, epsilon, c, ratio)
    raise BudgetError(f"no c <= {max_c} reaches ratio < {epsilon} for m = {m}")


def calibration_table(m: int, cs) -> list[tuple[int, Fraction]]:
    counter = _DivisorCounter(m)
    return [(c, calibration_ratio(m, c, counter)) for c in sorted(cs)]
