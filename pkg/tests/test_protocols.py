import math
from fractions import Fraction
from math import comb

import pytest

from ipslab.errors import ArityError, ConfigError
from ipslab.harness import ci_slack, run_trials
from ipslab.langspace import BINARY, BITS, UNARY, LanguageSpec, dima2_member, lex_unrank
from ipslab.protocols import (PROTOCOLS, amplify, base_id, get_protocol, recognize_1p4ca,
                              recognize_kary_exponential, recognize_unary_linear_space, verify_usquare,
                              weak_verify_sweeping)
from ipslab.provers import get_cheat, make_provers
from ipslab.runtime import Decision, run_protocol

PROTOCOL_IDS = {"thm1-unary", "cor1-kary", "thm2-logspace", "thm3-1p4ca", "thm4-weak", "fact3-tape",
                "thm5-twoprover", "thm6-usquare", "thm7-upower64", "thm8-dima2", "thm9-dima2-set",
                "thm10-upower64-set"}


def at_least(successes, n, bound):
    return successes / n >= bound - ci_slack(successes, n)


def test_registry_has_every_protocol():
    assert set(PROTOCOLS) == PROTOCOL_IDS


def test_unknown_ids_rejected():
    for bad in ("thm11", "thm6-usquare^x", "thm6-usquare^0"):
        with pytest.raises(ConfigError):
            get_protocol(bad)


def test_wrong_prover_count():
    with pytest.raises(ArityError):
        run_protocol("thm6-usquare", "aaaa", [])


def test_spec_required():
    with pytest.raises(ConfigError):
        run_protocol("thm1-unary", "a")


@pytest.mark.parametrize("pid,w", [
    ("thm6-usquare", "a" * 4), ("thm6-usquare", "a" * 49), ("thm7-upower64", "a" * 64),
    ("thm7-upower64", "a" * 4096), ("thm8-dima2", dima2_member(1)), ("thm8-dima2", dima2_member(2)),
])
def test_perfect_completeness(pid, w):
    st = run_trials(pid, w, "honest", 300, seed=5)
    assert st.accepts == 300


@pytest.mark.parametrize("pid,w,spec", [
    ("thm3-1p4ca", "b", LanguageSpec.everything(BINARY)), ("thm3-1p4ca", "aa", LanguageSpec.nothing(UNARY)),
    ("thm5-twoprover", "b", LanguageSpec.everything(BINARY)), ("thm5-twoprover", "a", LanguageSpec.nothing(BINARY)),
])
def test_one_way_protocols_never_move_left(pid, w, spec):
    for s in range(4):
        out = run_protocol(pid, w, make_provers(pid, w, spec=spec), spec=spec, seed=s)
        assert out.one_way_ok


@pytest.mark.parametrize("pid,w,spec,strategy", [
    ("thm8-dima2", dima2_member(1), None, "honest"), ("thm8-dima2", dima2_member(1), None, "doubled"),
    ("thm9-dima2-set", dima2_member(1), LanguageSpec.index_set({1}, BITS), "honest"),
    ("thm9-dima2-set", dima2_member(1), LanguageSpec.index_set({2}, BITS), "count-long"),
])
def test_sweeping_protocols(pid, w, spec, strategy):
    st = run_trials(pid, w, strategy, 100, seed=2, spec=spec)
    assert st.sweeping_violations == 0


def test_weak_verifier_sweeps():
    spec = LanguageSpec.index_set({1})
    for s in range(5):
        rnd = weak_verify_sweeping(spec, "", None, mode="exact-lottery", seed=s)
        assert rnd.outcome == "lottery"
    out = run_protocol("thm4-weak", "", make_provers("thm4-weak", ""), spec=LanguageSpec.index_set({2}), seed=1)
    assert out.sweeping_ok


def test_usquare_path_three_may_reverse():
    outs = [verify_usquare("a" * 16, seed=s) for s in range(40)]
    assert any(not o.sweeping_ok for o in outs)


def test_fact1_recognizers():
    one = LanguageSpec.finite(["a"], UNARY)
    assert recognize_unary_linear_space(LanguageSpec.nothing(), "").rejected
    acc = sum(recognize_unary_linear_space(one, "a", seed=s).accepted for s in range(300))
    rej = sum(recognize_unary_linear_space(one, "aa", seed=s).rejected for s in range(300))
    assert at_least(acc, 300, 0.73) and at_least(rej, 300, 0.73)
    eps = LanguageSpec.finite([""], BINARY)
    acc = sum(recognize_kary_exponential(eps, "", seed=s).accepted for s in range(300))
    rej = sum(recognize_kary_exponential(LanguageSpec.nothing(BINARY), "b", seed=s).rejected for s in range(300))
    assert at_least(acc, 300, 0.73) and at_least(rej, 300, 0.73)


def test_counter_recognizer_tracks_head_block_digit():
    spec = LanguageSpec.finite(["a"], UNARY)
    outs = [recognize_1p4ca(spec, "a", seed=s) for s in range(200)]
    assert all(o.details["x_prime_matches"] for o in outs)
    assert at_least(sum(o.accepted for o in outs), 200, 0.73)


@pytest.mark.parametrize("alphabet,spec_fn", [(UNARY, LanguageSpec.everything), (BINARY, LanguageSpec.nothing)])
@pytest.mark.parametrize("rank", [2, 3])
def test_counter_recognizer_stepwise_matches_aggregate(alphabet, spec_fn, rank):
    spec, w = spec_fn(alphabet), lex_unrank(alphabet, rank)
    for s in range(2):
        fast = recognize_1p4ca(spec, w, seed=s)
        slow = recognize_1p4ca(spec, w, stepwise=True, seed=s)
        assert (fast.decision, fast.steps, fast.details["heads"]) == (slow.decision, slow.steps, slow.details["heads"])


def test_weak_honest_identity_every_path():
    for alphabet in (UNARY, BINARY):
        for rank in (1, 2):
            w = lex_unrank(alphabet, rank)
            for spec in (LanguageSpec.index_set({rank}, alphabet), LanguageSpec.nothing(alphabet)):
                for s in range(10):
                    rnd = weak_verify_sweeping(spec, w, None, mode="exact-lottery", seed=s)
                    assert rnd.pr_a == rnd.pr_r


def test_weak_single_discrepancy_ratio():
    y = Fraction(1, 4)
    drift = get_cheat("thm4-weak", "drift")
    seen = 0
    for s in range(30):
        rnd = weak_verify_sweeping(LanguageSpec.index_set({1}), "a", drift.make("a")[0], y,
                                   mode="exact-lottery", seed=s)
        if rnd.outcome == "lottery" and len(rnd.discrepancies) == 1:
            seen += 1
            assert rnd.reject_ratio() > 1 / (2 * y * y)
    assert seen > 0


def test_amplify_identity_and_naming():
    base = get_protocol("thm6-usquare")
    assert amplify(base, 1) is base
    amp = get_protocol("thm6-usquare^8")
    assert amp.id == "thm6-usquare^8" and base_id(amp.id) == "thm6-usquare"
    with pytest.raises(ConfigError):
        amplify(base, 0)


def test_amplified_soundness():
    n = 300
    st = run_trials("thm6-usquare^8", "a" * 10, "nearest-member", n, seed=4)
    assert at_least(st.rejects, st.decided, 1 - Fraction(13, 16) ** 8)
    st = run_trials("thm6-usquare^8", "a" * 9, "honest", 100, seed=4)
    assert st.accepts == 100


def test_amplified_majority():
    bound = sum(comb(5, i) * 0.75**i * 0.25 ** (5 - i) for i in range(3, 6))
    spec = LanguageSpec.finite(["a"], UNARY)
    st = run_trials("thm3-1p4ca^5", "a", "honest", 300, seed=6, spec=spec)
    assert at_least(st.accepts, st.decided, bound)


def test_timeouts_stay_out_of_the_rates():
    from ipslab.runtime import ResourceBudget
    st = run_trials("thm6-usquare", "a" * 5, "infinite-periodic", 60, seed=1, budget=ResourceBudget(max_steps=50))
    assert 0 < st.timeouts < 60
    assert st.accepts + st.rejects + st.timeouts == 60
    assert st.reject_rate == st.rejects / st.decided
    st = run_trials("thm6-usquare", "a" * 5, "infinite-periodic", 5, seed=1, budget=ResourceBudget(max_steps=1))
    assert st.timeouts == 5 and math.isnan(st.accept_rate)
    assert Decision.TIMEOUT.value == "timeout"
