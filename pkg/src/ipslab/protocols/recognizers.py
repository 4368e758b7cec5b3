"""Prover-free recognizers: the Fact 1 procedure on binary counters and the
four-counter one-way machine that computes the lex rank with counters."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Generator

import numpy as np

from ..coins import fact1_bit, head_block_digit
from ..langspace import lex_rank
from ..runtime import Run

_TOSS_CHUNK = 1 << 16


def _fact1_decision(run: Run, k: int) -> bool:
    """Toss ``64**k`` times counting with two binary registers; decide by bit ``3k+3``."""
    total = 64**k
    width = 6 * k + 1
    tosses = run.work.register("tosses", width)
    heads = run.work.register("heads", width)
    done = h = 0
    while done < total:
        m = min(_TOSS_CHUNK, total - done)
        h += int(np.count_nonzero(run.toss_flags(m)))
        done += m
        run.meter.tick(m)
        tosses.value, heads.value = done, h
    run.details["heads"] = h
    run.details["k"] = k
    return fact1_bit(h, k) == 1


def unary_linear_body(run: Run) -> bool:
    run.tape.to_right_end()
    if run.n == 0:
        run.details["deterministic"] = True
        return run.spec.bit(1) == 1
    return _fact1_decision(run, run.n + 1)


def kary_exponential_body(run: Run) -> bool:
    run.tape.to_right_end()
    return _fact1_decision(run, lex_rank(run.spec.alphabet, run.tape.w))


# --- the four-counter machine ----------------------------------------------

@dataclass(frozen=True)
class Action:
    """One step: counter deltas, whether the input head advances, and a final bit."""

    f: tuple[int, int, int, int]
    move: bool = False
    halt: int | None = None


_NOP = (0, 0, 0, 0)


def _vec(**kw) -> tuple[int, int, int, int]:
    out = [0, 0, 0, 0]
    for key, val in kw.items():
        out[int(key[1]) - 1] = val
    return tuple(out)


def counter_program(alphabet, w: str, toss: Callable[[], bool]) -> Generator[Action, tuple, None]:
    """The machine as a coroutine.  It is sent the zero flags of C1..C4 before
    every step and yields that step's :class:`Action`; it never sees counter
    values, so whoever stores the counters fully determines its control flow."""
    k = alphabet.k
    flags = yield  # primed with the initial flags
    v = alphabet.lex(w[0])
    for t in range(v):
        flags = yield Action(_vec(c1=1), move=t == v - 1)
    for sym in w[1:]:
        v = alphabet.lex(sym)
        while not flags[0]:
            flags = yield Action(_vec(c1=-1, c4=1))
            for _ in range(k - 1):
                flags = yield Action(_vec(c4=1))
        while not flags[3]:
            flags = yield Action(_vec(c1=1, c4=-1))
        d = v - k
        for _ in range(abs(d)):
            flags = yield Action(_vec(c1=1 if d > 0 else -1))
        flags = yield Action(_NOP, move=True)

    # C2 = 64, C3 = 32, then multiply by 64 and 8 until C1 runs out
    flags = yield Action(_vec(c1=-1))
    for t in range(64):
        flags = yield Action(_vec(c2=1, c3=1 if t < 32 else 0))
    while not flags[0]:
        flags = yield Action(_vec(c1=-1))
        for src, factor in ((1, 64), (2, 8)):
            while not flags[src]:
                f = [0, 0, 0, 1]
                f[src] = -1
                flags = yield Action(tuple(f))
                for _ in range(factor - 1):
                    flags = yield Action(_vec(c4=1))
            while not flags[3]:
                f = [0, 0, 0, -1]
                f[src] = 1
                flags = yield Action(tuple(f))

    # toss C2 times; C3 and C4 take turns counting down blocks of T heads
    active, other, x = 2, 3, 0
    while True:
        if flags[active]:
            x ^= 1
            active, other = other, active
        if flags[1]:
            yield Action(_NOP, halt=x)
            return
        f = [0, -1, 0, 0]
        if toss():
            f[active], f[other] = -1, 1
        flags = yield Action(tuple(f))


def counter_steps(alphabet, w: str) -> tuple[int, int]:
    """Steps before the toss phase, and the exponent ``l = lex(w)``."""
    k = alphabet.k
    c = alphabet.lex(w[0])
    steps = c
    for sym in w[1:]:
        v = alphabet.lex(sym)
        steps += 2 * c * k + abs(v - k) + 1
        c = k * c + v - k
    l = c
    steps += 65
    c2, c3 = 64, 32
    for _ in range(l - 1):
        steps += 1 + 2 * 64 * c2 + 2 * 8 * c3
        c2, c3 = 64 * c2, 8 * c3
    return steps, l


def _drive(run: Run, program, counters: list[int]) -> int:
    """Run ``program`` against locally stored counters; returns the final bit."""
    gen = program
    next(gen)
    while True:
        act = gen.send(tuple(c == 0 for c in counters))
        if act.halt is not None:
            run.meter.tick()
            return act.halt
        for j in range(4):
            counters[j] += act.f[j]
        if act.move:
            run.tape.move_by(1)
        else:
            run.meter.tick()


def one_p4ca_body(run: Run, stepwise: bool = False) -> bool:
    """Four-counter recognizer.  The default path aggregates whole loops of the
    machine; ``stepwise=True`` drives :func:`counter_program` one step at a time
    and must produce the same step count and decision."""
    w = run.tape.w
    alphabet = run.spec.alphabet
    if not w:
        run.tape.to_right_end()
        run.details["deterministic"] = True
        return run.spec.bit(1) == 1
    run.tape.move_by(1)
    if stepwise:
        l = lex_rank(alphabet, w)
        coin_buffer: list = []
        tally = [0, 64**l]

        def toss() -> bool:
            # same chunking as the aggregated path, so both see the same coins
            if not coin_buffer:
                m = min(_TOSS_CHUNK, tally[1])
                tally[1] -= m
                coin_buffer.extend(run.toss_flags(m).tolist()[::-1])
            head = coin_buffer.pop()
            tally[0] += head
            return head

        x = _drive(run, counter_program(alphabet, w, toss), [0, 0, 0, 0])
        heads = tally[0]
    else:
        pre, l = counter_steps(alphabet, w)
        run.tape.move_by(len(w))
        run.meter.tick(pre - len(w))
        total, block = 64**l, 4 * 8**l
        act, x, heads, done = block, 0, 0, 0
        while done < total:
            m = min(_TOSS_CHUNK, total - done)
            h = int(np.count_nonzero(run.toss_flags(m)))
            heads += h
            done += m
            run.meter.tick(m)
            while h >= act:
                h -= act
                act = block
                x ^= 1
            act -= h
        run.meter.tick()
    run.details["x_prime_matches"] = x == head_block_digit(heads, l)
    if not run.details["x_prime_matches"]:
        raise AssertionError("block counting disagrees with the head-count digit")
    run.details["l"] = l
    run.details["x_prime"] = x
    run.details["heads"] = heads
    return x == 1
