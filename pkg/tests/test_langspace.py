from itertools import product

import pytest
from hypothesis import given, strategies as st

from ipslab.errors import InputDomainError, UnsupportedSpecError
from ipslab.langspace import (BINARY, BITS, UNARY, Alphabet, LanguageSpec, counter_lex_trace, dima2_member,
                              dima2_shape, lex_rank, lex_unrank, membership_bit)

TERNARY = Alphabet(("a", "b", "c"))
ALPHABETS = [UNARY, BINARY, TERNARY]


def enumerate_strings(alphabet, max_len):
    """Length-then-lexicographic order, built independently of the rank arithmetic."""
    for n in range(max_len + 1):
        for tup in product(alphabet.symbols, repeat=n):
            yield "".join(tup)


@pytest.mark.parametrize("alphabet,w,rank", [(UNARY, "aaa", 4), (BINARY, "", 1), (BINARY, "ab", 5)])
def test_lex_rank_examples(alphabet, w, rank):
    assert lex_rank(alphabet, w) == rank


@pytest.mark.parametrize("alphabet,i,w", [(BINARY, 1, ""), (BINARY, 5, "ab"), (UNARY, 4, "aaa")])
def test_lex_unrank_examples(alphabet, i, w):
    assert lex_unrank(alphabet, i) == w


@pytest.mark.parametrize("alphabet", ALPHABETS, ids=lambda a: f"k{a.k}")
def test_rank_matches_enumeration_position(alphabet):
    for pos, w in enumerate(enumerate_strings(alphabet, 6), start=1):
        assert lex_rank(alphabet, w) == pos
        assert lex_unrank(alphabet, pos) == w


@given(st.sampled_from(ALPHABETS), st.integers(min_value=1, max_value=10**12))
def test_unrank_then_rank(alphabet, i):
    if alphabet.k == 1:
        i = i % 10**5 + 1  # unary strings are as long as their rank
    assert lex_rank(alphabet, lex_unrank(alphabet, i)) == i


@given(st.sampled_from(ALPHABETS).flatmap(
    lambda a: st.tuples(st.just(a), st.text(alphabet=a.symbols, max_size=40))))
def test_rank_then_unrank(pair):
    alphabet, w = pair
    assert lex_unrank(alphabet, lex_rank(alphabet, w)) == w


@pytest.mark.parametrize("alphabet", ALPHABETS, ids=lambda a: f"k{a.k}")
def test_counter_trace_agrees_with_rank(alphabet):
    max_len = {1: 8, 2: 8, 3: 6}[alphabet.k]
    for w in enumerate_strings(alphabet, max_len):
        if not w:
            continue
        trace = counter_lex_trace(alphabet, w)
        assert trace.final_rank == lex_rank(alphabet, w)
        assert all(c >= 0 for snap in trace.snapshots for c in snap)
        assert len(trace.snapshots) == len(w) + 1


@pytest.mark.parametrize("alphabet,w,c1", [(BINARY, "ab", 5), (UNARY, "a", 2), (BINARY, "b", 3)])
def test_counter_trace_examples(alphabet, w, c1):
    assert counter_lex_trace(alphabet, w).snapshots[-1][0] == c1


def test_counter_trace_rejects_empty():
    with pytest.raises(InputDomainError):
        counter_lex_trace(BINARY, "")


def test_alphabet_rejects_foreign_symbols():
    with pytest.raises(InputDomainError):
        lex_rank(UNARY, "ab")


def test_membership_bit_examples():
    assert membership_bit(LanguageSpec.finite(["a"], UNARY), 2) == 1
    assert membership_bit(LanguageSpec.bit_rule(prefix=[1], tail="all-zero"), 1) == 1
    assert membership_bit(LanguageSpec.builtin("USQUARE"), 5) == 1


@given(st.integers(min_value=1, max_value=400))
def test_usquare_bits_match_squares(i):
    n = i - 1
    expected = int(n >= 1 and round(n**0.5) ** 2 == n)  # squares of positive m
    assert membership_bit(LanguageSpec.builtin("USQUARE"), i) == expected


def test_spec_dict_round_trip():
    specs = [LanguageSpec.builtin("DIMA2"), LanguageSpec.finite(["", "ab"], BINARY),
             LanguageSpec.bit_rule(prefix=[1, 0], tail="periodic", pattern=[0, 1]),
             LanguageSpec.index_set({2, 5}), LanguageSpec.everything(BINARY), LanguageSpec.nothing()]
    for spec in specs:
        again = LanguageSpec.from_dict(spec.to_dict())
        assert again == spec
        assert [again.bit(i) for i in range(1, 40)] == [spec.bit(i) for i in range(1, 40)]


def test_unknown_builtin_rejected():
    with pytest.raises((UnsupportedSpecError, InputDomainError)):
        LanguageSpec.builtin("PALINDROMES")


@pytest.mark.parametrize("k", [1, 2])
def test_dima2_member_lengths(k):
    w = dima2_member(k)
    assert len(w) == 2 ** (6 * k) + 2 ** (3 * k + 1) + 3 * k
    assert set(w) <= set(BITS.symbols)
    assert dima2_shape(w) is not None
    assert LanguageSpec.builtin("DIMA2").contains(w)


def test_dima2_w1_length_is_83():
    assert len(dima2_member(1)) == 83


@given(st.integers(min_value=0, max_value=82))
def test_dima2_single_flips_leave_language(pos):
    w = dima2_member(1)
    mutant = w[:pos] + ("1" if w[pos] == "0" else "0") + w[pos + 1:]
    assert not LanguageSpec.builtin("DIMA2").contains(mutant)
