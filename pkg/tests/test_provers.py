import pytest
from hypothesis import given, strategies as st

from ipslab.harness import Scenario
from ipslab.langspace import BINARY, BITS, LanguageSpec, dima2_member
from ipslab.protocols import PROTOCOLS
from ipslab.provers import (ASK_BITS, CHEAT_COVERAGE, START, LogspaceProver, certificate_text, cheat_catalog,
                            get_cheat, honest)
from ipslab.runtime import ResourceBudget, run_protocol

WITH_PROVERS = [pid for pid, info in PROTOCOLS.items() if info.n_provers]


def test_honest_certificates():
    (p,) = honest("thm6-usquare", "a" * 9)
    assert certificate_text(p) == "aaab" * 3 + "b"
    w1 = dima2_member(1)
    (p,) = honest("thm8-dima2", w1)
    assert certificate_text(p) == w1
    (p,) = honest("thm7-upower64", "a" * 4096)
    assert certificate_text(p) == "ab" + "a" * 64 + "bb"


def test_logspace_prover_phases():
    (p,) = honest("thm2-logspace", "aa")
    assert isinstance(p, LogspaceProver) and p.k == 3
    p.receive(START)
    assert p.emit_run("a", 10**7) == 64**3
    assert p.emit() == "b"
    p.receive_many([True, False, True, True, True, False])
    p.receive(ASK_BITS)
    sent = "".join(iter(p.emit, None))
    assert sent == "001e"  # four heads, least significant bit first


def test_coverage_table_points_at_real_entries():
    for pid, cases in CHEAT_COVERAGE.items():
        ids = {c.id for c in cheat_catalog(pid)}
        covered = set()
        for case, entries in cases.items():
            assert entries, case
            assert set(entries) <= ids, (pid, case)
            covered |= set(entries)
        assert covered == ids, pid


def test_every_prover_protocol_has_a_catalog():
    for pid in WITH_PROVERS:
        assert cheat_catalog(pid), pid
        assert pid in CHEAT_COVERAGE


def test_catalog_examples():
    assert "infinite-periodic" in {c.id for c in cheat_catalog("thm6-usquare")}
    assert {"flip-p1", "flip-p2", "flip-both"} <= {c.id for c in cheat_catalog("fact3-tape")}
    assert {"count-plus-one", "count-minus-one"} <= {c.id for c in cheat_catalog("thm2-logspace")}


def _input_for(pid):
    return {"thm8-dima2": dima2_member(1), "thm9-dima2-set": dima2_member(1), "thm7-upower64": "a" * 100,
            "thm10-upower64-set": "a" * 4096, "thm2-logspace": "a", "thm4-weak": "a",
            "fact3-tape": "ab", "thm5-twoprover": "b"}.get(pid, "a" * 10)


def _spec_for(pid):
    if pid in ("fact3-tape", "thm5-twoprover"):
        return LanguageSpec.nothing(BINARY)
    if pid == "thm9-dima2-set":
        return LanguageSpec.nothing(BITS)
    return LanguageSpec.nothing() if PROTOCOLS[pid].needs_spec else None


@pytest.mark.parametrize("pid", WITH_PROVERS)
def test_catalog_is_budget_safe(pid):
    """Finite entries halt within a generous budget; unbounded ones must say so."""
    w, spec = _input_for(pid), _spec_for(pid)
    for cheat in cheat_catalog(pid):
        provers = cheat.make(w)
        unbounded = any(getattr(p, "unbounded", False) for p in provers)
        assert cheat.finite != unbounded, cheat.id
        if pid == "thm4-weak":
            continue  # halting is not required of a weak verifier
        budget = ResourceBudget(max_steps=10**7 if cheat.finite else 10**5)
        out = run_protocol(pid, w, provers, spec=spec, budget=budget, seed=1)
        if cheat.finite:
            assert out.decision.value != "timeout", cheat.id


@pytest.mark.parametrize("pid,w", [("thm6-usquare", "a" * 36), ("thm7-upower64", "a" * 4096),
                                   ("thm8-dima2", dima2_member(1))])
def test_honest_never_grammar_rejects(pid, w):
    for s in range(50):
        out = run_protocol(pid, w, honest(pid, w), seed=s)
        assert out.accepted


@given(st.integers(1, 60))
def test_honest_usquare_on_any_square(m):
    w = "a" * (m * m)
    assert certificate_text(honest("thm6-usquare", w)[0]) == ("a" * m + "b") * m + "b"


def test_unknown_cheat_rejected():
    from ipslab.errors import ConfigError
    with pytest.raises(ConfigError):
        get_cheat("thm6-usquare", "nope")
    with pytest.raises(ConfigError):
        Scenario("thm6-usquare", "aaaa", strategy="nope")
