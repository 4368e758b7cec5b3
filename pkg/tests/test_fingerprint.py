from collections import Counter
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from ipslab.errors import BudgetError, InputDomainError
from ipslab.fingerprint import (DEFAULT_C, ModCounter, calibrate_c, calibration_ratio, calibration_table,
                                collision_rate, fingerprint_width, is_prime, mod_step, sample_prime)
from ipslab.rng import RandomSource


def brute_ratio(m, c):
    """Worst share of primes up to 2**ceil(log2(c*m)) dividing one difference in [1, 2**m]."""
    bound = 1 << (c * m - 1).bit_length()
    primes = list(sympy.primerange(2, bound + 1))
    worst = max(sum(d % p == 0 for p in primes) for d in range(1, (1 << m) + 1))
    return Fraction(worst, len(primes))


def test_mod_step_examples():
    assert mod_step(ModCounter(7, 6), "inc").value == 0
    assert mod_step(ModCounter(5, 3), "mul", 2).value == 1
    c = ModCounter(7)
    for _ in range(100):
        c = mod_step(c, "inc")
    assert c.value == 2


def test_mod_step_rejects_unknown_operation():
    with pytest.raises(InputDomainError):
        mod_step(ModCounter(7), "sub", 1)


@given(st.integers(0, 2**200), st.sampled_from(list(sympy.primerange(2, 2000))), st.sampled_from([2, 10, 64]))
def test_streamed_digits_fold_to_residue(t, p, base):
    digits, rest = [], t
    while rest:
        rest, d = divmod(rest, base)
        digits.insert(0, d)
    c = ModCounter(p)
    for d in digits:
        c = mod_step(mod_step(c, "mul", base), "add", d)
    assert c.value == t % p


def test_streamed_residues_on_many_pairs():
    rng = RandomSource(3)
    for _ in range(10**4):
        t = rng.randbits(64)
        p = sample_prime(16, rng)
        c = ModCounter(p)
        for bit in bin(t)[2:]:
            c = mod_step(mod_step(c, "mul", 2), "add", int(bit))
        assert c.value == t % p


@given(st.integers(0, 2**80), st.integers(2, 40))
def test_equal_values_never_separate(n, width):
    assert collision_rate(n, n, min(width, 20), 5, RandomSource(n % 997)) == 1.0


def test_collision_rate_examples():
    assert collision_rate(0, 1, 10, 200, 1) == 0.0
    rate = collision_rate(5, 13, 2, 4000, 2)
    assert abs(rate - 0.5) < 0.04


def test_small_prime_sampling_support():
    rng = RandomSource(8)
    assert {sample_prime(2, rng) for _ in range(200)} == {2, 3}
    assert {sample_prime(3, rng) for _ in range(400)} == {2, 3, 5, 7}


def test_prime_sampling_is_uniform():
    rng = RandomSource(21)
    primes = list(sympy.primerange(2, 257))
    counts = Counter(sample_prime(8, rng) for _ in range(10**5))
    assert set(counts) == set(primes)
    assert chisquare([counts[p] for p in primes]).pvalue > 0.01


def test_primality_against_sympy_small():
    assert [n for n in range(5000) if is_prime(n)] == list(sympy.primerange(0, 5000))


@pytest.mark.parametrize("n", [
    2**61 - 1, 2**89 - 1, 2**127 - 1, 2**107 - 1,
    3317044064679887385961981,  # strong pseudoprime to the first 13 prime bases
    3825123056546413051, 318665857834031151167461, 2**128 + 1, (2**89 - 1) * (2**61 - 1),
    1195068768795265792518361315725116351898245581,  # first-12-bases pseudoprime, large
])
def test_primality_on_large_and_pseudoprime_values(n):
    assert is_prime(n) == sympy.isprime(n)


@given(st.integers(2**81, 2**140))
def test_primality_above_the_exact_bound(n):
    assert is_prime(n) == sympy.isprime(n)


def test_fingerprint_widths():
    assert [fingerprint_width(12, k) for k in (2, 3, 4)] == [48, 77, 96]
    assert fingerprint_width(1, 1) == 2


@pytest.mark.parametrize("m,c", [(4, 1), (4, 2), (4, 9), (8, 2), (8, 17), (12, 1), (12, 11), (12, 10)])
def test_calibration_ratio_matches_brute_force(m, c):
    assert calibration_ratio(m, c) == brute_ratio(m, c)


@pytest.mark.parametrize("m,eps,c", [
    (4, 1, 2), (8, 1, 2), (12, 1, 1), (16, 1, 2), (20, 1, 1), (22, 1, 1), (24, 1, 1),
    (4, Fraction(1, 8), 9), (8, Fraction(1, 8), 17), (12, Fraction(1, 8), 11), (16, Fraction(1, 8), 9),
    (20, Fraction(1, 8), 13), (22, Fraction(1, 8), 12), (24, Fraction(1, 8), 11),
])
def test_calibration_table_frozen(m, eps, c):
    assert calibrate_c(m, eps).c == c


@pytest.mark.parametrize("m,eps", [(4, Fraction(1, 8)), (8, Fraction(1, 8)), (12, Fraction(1, 8)), (8, 1)])
def test_calibrated_c_is_minimal(m, eps):
    res = calibrate_c(m, eps)
    assert brute_ratio(m, res.c) < eps
    assert all(brute_ratio(m, c) >= eps for c in range(1, res.c))


def test_default_c_comes_from_calibration():
    assert calibrate_c(22, Fraction(1, 8)).c == DEFAULT_C
    res = calibrate_c(12, Fraction(1, 8))
    assert (res.c, res.ratio) == (11, Fraction(5, 54))


@pytest.mark.parametrize("m", [4, 8, 12, 16])
def test_calibration_monotone_in_c(m):
    ratios = [r for _, r in calibration_table(m, range(1, 40))]
    assert all(a >= b for a, b in zip(ratios, ratios[1:]))


def test_calibration_limits():
    with pytest.raises(BudgetError):
        calibrate_c(30, Fraction(1, 8))
    with pytest.raises(InputDomainError):
        calibrate_c(8, 0)
