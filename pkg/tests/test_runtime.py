import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ipslab.errors import InputDomainError
from ipslab.langspace import BINARY, BITS, LanguageSpec, dima2_member
from ipslab.provers import make_provers
from ipslab.rng import RandomSource
from ipslab.runtime import Decision, Meter, ResourceBudget, WorkTape, random_walk, run_protocol


class NoCoins(RandomSource):
    """A source that fails the test if the verifier draws anything."""

    def raw64(self, count):
        raise AssertionError("randomness consumed")

    def randrange(self, n):
        raise AssertionError("randomness consumed")


def run(pid, w, strategy="honest", seed=0, spec=None, **kw):
    return run_protocol(pid, w, make_provers(pid, w, strategy, spec=spec), spec=spec, seed=seed, **kw)


@pytest.mark.parametrize("pid,w,strategy", [
    ("thm6-usquare", "a" * 20, "infinite-periodic"), ("thm7-upower64", "a" * 4096, "honest"),
    ("thm8-dima2", dima2_member(1), "mutated-copy"), ("thm6-usquare", "a" * 9, "honest"),
])
def test_same_seed_same_outcome(pid, w, strategy):
    a = [run(pid, w, strategy, seed=s) for s in range(20)]
    b = [run(pid, w, strategy, seed=s) for s in range(20)]
    assert [o.to_dict() for o in a] == [o.to_dict() for o in b]
    assert [o.details for o in a] == [o.details for o in b]


def test_seeds_matter():
    steps = {run("thm6-usquare", "a" * 20, "infinite-periodic", seed=s).steps for s in range(20)}
    assert len(steps) > 1


def test_dima2_honest_member_accepts():
    out = run("thm8-dima2", dima2_member(1), seed=123)
    assert out.decision is Decision.ACCEPT
    assert out.sweeping_ok


def test_short_usquare_inputs_are_deterministic():
    for n in range(4):
        w = "a" * n
        out = run_protocol("thm6-usquare", w, make_provers("thm6-usquare", w), seed=NoCoins(0))
        assert out.accepted == (n == 1)


def test_tiny_budget_times_out():
    w = "a" * 5
    out = run("thm6-usquare", w, "infinite-periodic", budget=ResourceBudget(max_steps=50))
    assert out.decision is Decision.TIMEOUT
    assert out.details["exhausted"] == "steps"


def test_budget_validation():
    with pytest.raises(InputDomainError):
        ResourceBudget(max_steps=0)
    with pytest.raises(InputDomainError):
        ResourceBudget.from_dict({"max_stepz": 3})
    b = ResourceBudget(max_steps=7)
    assert ResourceBudget.from_dict(b.to_dict()) == b


def test_outcome_keys():
    out = run("thm6-usquare", "a" * 9)
    assert set(out.to_dict()) == {"decision", "steps", "work_cells", "prover_symbols", "sweeping_ok"}


def test_walk_symmetric_for_two():
    rng = RandomSource(1)
    results = [random_walk(2, rng) for _ in range(2000)]
    assert all(r.steps == 1 for r in results)
    rights = sum(r.right for r in results)
    assert abs(rights / 2000 - 0.5) < 3 * math.sqrt(0.25 / 2000)


@pytest.mark.parametrize("n", range(2, 17))
def test_walk_right_probability(n):
    rng = RandomSource(100 + n)
    N = 10**5
    rights = sum(random_walk(n, rng).right for _ in range(N))
    p = 1 / n
    assert abs(rights / N - p) <= 3 * math.sqrt(p * (1 - p) / N)


def test_literal_walk_uses_the_outer_marker():
    rng = RandomSource(9)
    N, n = 4 * 10**4, 4
    rights = sum(random_walk(n, rng, literal=True).right for _ in range(N))
    p = 1 / (n + 1)
    assert abs(rights / N - p) <= 3 * math.sqrt(p * (1 - p) / N)


def test_walk_mean_absorption_time():
    rng = RandomSource(77)
    steps = np.array([random_walk(10, rng).steps for _ in range(10**5)])
    # gambler's ruin from 1 between 0 and 10: 1 * (10 - 1) expected moves
    assert abs(steps.mean() - 9) <= 0.05 * 9


def test_walk_pause_hook_sees_every_position():
    seen = []
    res = random_walk(6, RandomSource(4), seen.append)
    assert len(seen) == res.steps
    assert all(abs(a - b) == 1 for a, b in zip([1] + seen, seen))
    assert seen[-1] in (0, 6)


def test_walk_rejects_short_inputs():
    with pytest.raises(InputDomainError):
        random_walk(1, RandomSource(0))


@pytest.fixture
def metered(monkeypatch):
    """Record every tick size and every work-tape growth."""
    ticks, grows = [], []
    orig_tick, orig_grow = Meter.tick, WorkTape._grow

    def tick(self, n=1):
        ticks.append(n)
        return orig_tick(self, n)

    def grow(self, cells):
        grows.append(cells)
        return orig_grow(self, cells)

    monkeypatch.setattr(Meter, "tick", tick)
    monkeypatch.setattr(WorkTape, "_grow", grow)
    return ticks, grows


@pytest.mark.parametrize("pid,w,spec", [
    ("thm6-usquare", "a" * 16, None), ("thm8-dima2", dima2_member(1), None),
    ("thm2-logspace", "aa", LanguageSpec.index_set({3})), ("thm3-1p4ca", "b", LanguageSpec.everything(BINARY)),
])
def test_meter_is_monotone(metered, pid, w, spec):
    ticks, grows = metered
    out = run(pid, w, spec=spec, seed=3)
    assert ticks and all(n >= 1 for n in ticks)
    assert all(c >= 1 for c in grows)
    assert out.steps == sum(ticks)
    assert out.work_cells == sum(grows)


@pytest.mark.parametrize("pid,w,spec", [
    ("thm6-usquare", "a" * 25, None), ("thm7-upower64", "a" * 4096, None), ("thm8-dima2", dima2_member(1), None),
    ("thm9-dima2-set", dima2_member(1), LanguageSpec.index_set({1}, BITS)),
    ("thm10-upower64-set", "a" * 4096, LanguageSpec.index_set({2})),
])
def test_constant_space_protocols_use_no_work_cells(pid, w, spec):
    for s in range(5):
        assert run(pid, w, spec=spec, seed=s).work_cells == 0


@given(st.integers(0, 2**32))
def test_walk_is_a_function_of_the_seed(seed):
    a, b = random_walk(7, RandomSource(seed)), random_walk(7, RandomSource(seed))
    assert a == b
