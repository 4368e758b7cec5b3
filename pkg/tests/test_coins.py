from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import binomtest

from ipslab.coins import (BiasedCoin, ProbBitStream, estimate_membership_bit, fact1_bit, head_block_digit,
                          prob_digit, prob_value, toss)
from ipslab.errors import BudgetError, InputDomainError
from ipslab.langspace import LanguageSpec
from ipslab.rng import RandomSource

SPECS = {
    "empty": LanguageSpec.nothing(),
    "all": LanguageSpec.everything(),
    "first": LanguageSpec.index_set({1}),
    "second": LanguageSpec.index_set({2}),
    "periodic": LanguageSpec.bit_rule(prefix=[0, 1, 1], tail="periodic", pattern=[1, 0, 0]),
}


def truncated_value(spec, digits=300):
    """Partial sum of the interleaved expansion, accurate to 2**-digits."""
    total = Fraction(0)
    for j in range(1, digits + 1):
        i, r = divmod(j - 1, 3)
        d = spec.bit(i + 1) if r == 0 else (0 if r == 1 else 1)
        total += Fraction(d, 2**j)
    return total


def test_digit_layout_for_first_index():
    stream = ProbBitStream(SPECS["first"])
    assert [prob_digit(stream, j) for j in range(1, 7)] == [1, 0, 1, 0, 0, 1]


@pytest.mark.parametrize("name", sorted(SPECS))
def test_padding_digits(name):
    stream = ProbBitStream(SPECS[name])
    for i in range(20):
        assert prob_digit(stream, 3 * i + 2) == 0
        assert prob_digit(stream, 3 * i + 3) == 1


@pytest.mark.parametrize("name,value", [("empty", Fraction(1, 7)), ("all", Fraction(5, 7)),
                                        ("first", Fraction(9, 14))])
def test_prob_value_examples(name, value):
    assert prob_value(SPECS[name]) == value


@pytest.mark.parametrize("name", sorted(SPECS))
def test_prob_value_matches_partial_sums(name):
    exact = prob_value(SPECS[name])
    assert abs(exact - truncated_value(SPECS[name])) < Fraction(1, 2**299)


@given(st.lists(st.integers(0, 1), max_size=6), st.sampled_from(["all-zero", "all-one", "periodic"]),
       st.lists(st.integers(0, 1), min_size=1, max_size=4))
def test_prob_value_property(prefix, tail, pattern):
    spec = LanguageSpec.bit_rule(prefix=prefix, tail=tail, pattern=pattern if tail == "periodic" else ())
    exact = prob_value(spec)
    assert 0 < exact < 1
    assert abs(exact - truncated_value(spec, 120)) < Fraction(1, 2**119)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_head_frequency_in_interval(name):
    p = float(prob_value(SPECS[name]))
    coin = BiasedCoin(ProbBitStream(SPECS[name]), RandomSource(11))
    n = 10**5
    heads = int(np.count_nonzero(coin.toss_flags(n)))
    lo, hi = binomtest(heads, n, p).proportion_ci(confidence_level=0.999)
    assert lo <= p <= hi


def test_digitwise_toss_frequency_and_digits_used():
    spec = SPECS["empty"]
    coin = BiasedCoin(ProbBitStream(spec), RandomSource(5))
    n = 10**5
    heads, digits = 0, 0
    for _ in range(n):
        heads += toss(coin)
        digits += coin.last_digits
    lo, hi = binomtest(heads, n, 1 / 7).proportion_ci(confidence_level=0.999)
    assert lo <= 1 / 7 <= hi
    assert 1.9 <= digits / n <= 2.1


def test_degenerate_streams():
    ones = BiasedCoin(ProbBitStream.from_digits(lambda j: 1), RandomSource(1))
    zeros = BiasedCoin(ProbBitStream.from_digits(lambda j: 0), RandomSource(1))
    assert all(ones.toss() for _ in range(200))
    assert not any(zeros.toss() for _ in range(200))


@pytest.mark.parametrize("t,k,bit", [(32, 1, 1), (31, 1, 0), (96, 1, 1)])
def test_head_block_digit_examples(t, k, bit):
    assert head_block_digit(t, k) == bit


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_head_block_digit_is_bit_3k_plus_3(k):
    t = np.arange(1 << 20, dtype=np.int64)
    expected = (t >> (3 * k + 2)) & 1
    got = np.array([head_block_digit(int(x), k) for x in t[::97]])
    assert np.array_equal(got, expected[::97])
    assert all(fact1_bit(int(x), k) == head_block_digit(int(x), k) for x in t[:5000])


@given(st.integers(0, 2**20 - 1), st.integers(1, 4))
def test_head_block_digit_property(t, k):
    assert head_block_digit(t, k) == (t >> (3 * k + 2)) & 1


@pytest.mark.parametrize("name,k,bit", [("first", 1, 1), ("empty", 1, 0), ("second", 2, 1)])
def test_estimate_membership_bit_frequency(name, k, bit):
    trials = 400 if k == 1 else 60
    hits = sum(estimate_membership_bit(SPECS[name], k, RandomSource(1000 + s)) == bit for s in range(trials))
    # exact binomial test against the 3/4 floor, one-sided at 0.1%
    assert binomtest(hits, trials, 0.75, alternative="less").pvalue > 1e-3


def test_toss_budget_enforced():
    with pytest.raises(BudgetError):
        estimate_membership_bit(SPECS["first"], 5, 0)
    with pytest.raises(InputDomainError):
        estimate_membership_bit(SPECS["first"], 0, 0)
