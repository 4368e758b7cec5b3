"""One test per acceptance criterion.

The shipped ``paper-bounds`` suite runs once per session through the CLI, exactly
as ``ipslab check --config paper-bounds`` would, and each test below reads its
criterion's record.  Beyond the suite's own verdict every test re-derives each
check from its stored value, operator, bound and tolerance, and pins the bounds
and tolerances to the ones the criterion states.
"""
import json
import math
import os
import time
from fractions import Fraction

import pytest

from ipslab.cli import main

SUITE_SECONDS_LIMIT = 30 * 60


@pytest.fixture(scope="session")
def suite(tmp_path_factory):
    out = tmp_path_factory.mktemp("paper-bounds")
    workers = min(8, os.cpu_count() or 1)
    t0 = time.perf_counter()
    code = main(["check", "--config", "paper-bounds", "--out", str(out), "--workers", str(workers)])
    elapsed = time.perf_counter() - t0
    records = {}
    if (out / "check.jsonl").exists():
        for line in (out / "check.jsonl").read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            records[rec["id"]] = rec
    return {"code": code, "seconds": elapsed, "workers": workers, "records": records}


def _holds(c):
    v, b, t = c["value"], c["bound"], c["tolerance"]
    if c["op"] == "in":
        return b - t <= v <= b + t
    return {">=": v >= b - t, ">": v > b - t, "<=": v <= b + t, "<": v < b + t, "==": abs(v - b) <= t}[c["op"]]


def criterion(suite, cid):
    assert cid in suite["records"], f"{cid} produced no record"
    rec = suite["records"][cid]
    assert rec["checks"], f"{cid} has no checks"
    for c in rec["checks"]:
        assert _holds(c) == c["passed"], f"stored verdict disagrees with the numbers: {c}"
    return rec


def checks(rec, fragment):
    found = [c for c in rec["checks"] if fragment in c["label"]]
    assert found, f"no check labelled like {fragment!r} in {rec['id']}"
    return found


def assert_passed(rec):
    bad = [f"{c['label']}: {c['value']!r} {c['op']} {c['bound']!r} (tol {c['tolerance']!r})"
           for c in rec["checks"] if not c["passed"]]
    assert rec["passed"] and not bad, f"{rec['id']} failed:\n" + "\n".join(bad)


def pinned(cs, op, bound, tolerance=None):
    for c in cs:
        assert c["op"] == op and c["bound"] == pytest.approx(float(bound), abs=1e-12), c
        if tolerance is not None:
            assert c["tolerance"] == pytest.approx(tolerance, abs=1e-12), c


def ci_style(cs):
    """Rate checks carry the half-width of a 99% Wilson interval, which is positive and small."""
    for c in cs:
        assert 0 <= c["tolerance"] < 0.2, c


def test_ac01_membership_bit_from_coin_tosses(suite):
    rec = criterion(suite, "fact1-membership-bit")
    rates = checks(rec, "correct rate")
    assert len(rates) == 3
    pinned(rates, ">=", 0.75, 0.02)
    pinned(checks(rec, "wall seconds"), "<", 120)
    assert_passed(rec)


def test_ac02_usquare_perfect_completeness(suite):
    rec = criterion(suite, "usquare-completeness")
    cs = checks(rec, "accepts")
    assert sorted(c["label"] for c in cs) == sorted(f"a^{n} accepts" for n in (4, 9, 16, 25))
    for c in cs:
        assert c["value"] == c["bound"] == 10_000
    assert_passed(rec)


def test_ac03_usquare_soundness(suite):
    rec = criterion(suite, "usquare-soundness")
    rejects = checks(rec, "reject rate")
    pinned(rejects, ">=", Fraction(3, 16))
    ci_style(rejects)
    sizes = {int(c["label"].split()[0][2:]) for c in rejects}
    assert sizes == {n for n in range(5, 25) if math.isqrt(n) ** 2 != n}
    exact = checks(rec, "vs exact")
    for c in exact:
        assert c["op"] == "==" and 0 <= c["tolerance"] <= 3 * math.sqrt(0.25 / 2000) + 1e-12
        # 3 sigma vanishes exactly when the exact rate is 0 or 1
        assert (c["tolerance"] > 0) == (0 < c["bound"] < 1), c
    assert_passed(rec)


def test_ac04_usquare_running_time(suite):
    rec = criterion(suite, "usquare-timing")
    (cheat,) = checks(rec, "infinite-periodic step exponent")
    assert (cheat["bound"] - cheat["tolerance"], cheat["bound"] + cheat["tolerance"]) == pytest.approx((1.7, 2.3))
    pinned(checks(rec, "member step exponent"), "<=", 1.7)
    assert_passed(rec)


def test_ac05_upower64(suite):
    rec = criterion(suite, "upower64")
    (member,) = checks(rec, "a^4096 accepts")
    assert member["value"] == member["bound"] == 10_000
    rejects = checks(rec, "reject rate")
    pinned(rejects, ">", 0.33)
    ci_style(rejects)
    assert_passed(rec)


def test_ac06_dima2(suite):
    rec = criterion(suite, "dima2")
    (member,) = checks(rec, "accepts")
    assert "length 83" in member["label"] and member["value"] == member["bound"] == 10_000
    mutants = checks(rec, "reject rate")
    pinned(mutants, ">=", Fraction(1, 3))
    ci_style(mutants)
    pinned(checks(rec, "sweeping"), "==", 0, 0)
    (scale,) = checks(rec, "step exponent")
    assert (scale["bound"] - scale["tolerance"], scale["bound"] + scale["tolerance"]) == pytest.approx((0.8, 1.2))
    assert_passed(rec)


def test_ac07_dima2_with_index_set(suite):
    rec = criterion(suite, "dima2-set")
    acc = checks(rec, "I contains 1")
    pinned(acc, ">=", Fraction(3, 4))
    rej = checks(rec, "I without 1")
    pinned(rej, ">=", Fraction(3, 8))
    ci_style(acc + rej)
    assert_passed(rec)


def test_ac08_upower64_with_index_set(suite):
    rec = criterion(suite, "upower64-set")
    pinned(checks(rec, "member accept rate"), ">=", Fraction(7, 8))
    rej = checks(rec, "non-member")
    pinned(rej, ">=", Fraction(3, 32))
    ci_style(rej)
    assert_passed(rec)


def test_ac09_logspace_verifier(suite):
    rec = criterion(suite, "logspace")
    honest = checks(rec, "honest member accept rate")
    assert len(honest) == 3
    pinned(honest, ">=", Fraction(143, 196))
    cheats = [c for c in rec["checks"] if c["label"].endswith("accept rate") and "honest" not in c["label"]]
    assert cheats
    pinned(cheats, "<=", Fraction(209, 648))
    ci_style(honest + cheats)
    checks(rec, "A log n + B")
    assert_passed(rec)


def test_ac10_four_counter_recognizer(suite):
    rec = criterion(suite, "one-p4ca")
    rates = checks(rec, "correct rate")
    assert {c["label"].split()[0] for c in rates} == {"a", "ab"}
    assert {int(c["label"].split()[2]) for c in rates} == {1, 2, 3}
    pinned(rates, ">=", 0.75, 0.02)
    pinned(checks(rec, "disagreed"), "==", 0, 0)
    assert_passed(rec)


def test_ac11_weak_interactive_proof(suite):
    rec = criterion(suite, "weak-ips")
    pinned(checks(rec, "PrA != PrR"), "==", 0, 0)
    pinned(checks(rec, "member conditional accept"), "==", Fraction(3, 4) / Fraction(5, 4))
    pinned(checks(rec, "PrR/PrA"), ">", 8)
    cheats = [c for c in rec["checks"] if c["label"].startswith(("drift", "zero-lie"))]
    assert cheats
    pinned(cheats, ">=", Fraction(2, 3))
    assert_passed(rec)


def test_ac12_signed_tape(suite):
    rec = criterion(suite, "signed-tape")
    pinned(checks(rec, "honest runs flagged"), "==", 0, 0)
    p = 250 / 251
    rates = checks(rec, "detection rate")
    assert len(rates) == 9
    pinned(rates, "==", p, 3 * math.sqrt(p * (1 - p) / 10_000))
    enumerated = checks(rec, "enumerated detection")
    pinned(enumerated, "==", Fraction(4, 5), 0)
    assert_passed(rec)


def test_ac13_two_prover_recognizer(suite):
    rec = criterion(suite, "two-prover")
    correct = checks(rec, "correct rate")
    pinned(correct, ">=", Fraction(3, 4))
    tamper = checks(rec, "reject rate on a member")
    assert len(tamper) == 9
    pinned(tamper, ">=", Fraction(250, 251))
    ci_style(correct + tamper)
    assert_passed(rec)


def test_ac14_shipped_suite_exits_zero_in_time(suite):
    assert set(suite["records"]) == {
        "fact1-membership-bit", "usquare-completeness", "usquare-soundness", "usquare-timing", "upower64", "dima2",
        "dima2-set", "upower64-set", "logspace", "one-p4ca", "weak-ips", "signed-tape", "two-prover"}
    failed = sorted(cid for cid, rec in suite["records"].items() if not rec["passed"])
    assert suite["code"] == 0, f"suite exit code {suite['code']}, failing criteria: {failed}"
    assert suite["seconds"] < SUITE_SECONDS_LIMIT, (
        f"suite took {suite['seconds']:.0f}s with {suite['workers']} worker(s)")
