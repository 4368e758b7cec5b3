"""Sweeping verifiers for the doubling-block binary language and its index-set family."""
from __future__ import annotations

from itertools import groupby

import numpy as np

from ..langspace import Dima2Shape, dima2_shape
from ..runtime import ASK_COUNT, START, Channel, Run


def _equal_path(run: Run, ch: Channel) -> bool:
    """Read ``w`` and ``y`` in lockstep; accept iff they are identical."""
    for sym, grp in groupby(run.tape.w):
        length = sum(1 for _ in grp)
        got = ch.take_run(sym, length)
        run.tape.move_by(got)
        if got < length:
            return False
    run.tape.to_right_end()
    return ch.peek() is None


def _doubling_path(run: Run, ch: Channel, shape: Dima2Shape) -> bool:
    """While the head crosses block ``i+1`` of ``w``, read block ``i`` of ``y`` and check
    ``2 t_i = t_{i+1}`` before the separator and ``t'_j = t'_{j+1}`` after it."""
    blocks = list(shape.prefix) + list(shape.post)
    m = len(shape.prefix)
    run.tape.move_by(blocks[0] + 1)
    for i in range(1, len(blocks)):
        target = blocks[i]
        doubling = i <= m
        limit = target // 2 + 1 if doubling else target + 1
        got = ch.take_run("0", limit)
        if (2 * got if doubling else got) != target:
            return False
        if ch.recv() != "1":
            return False
        if i == m and ch.recv() != "1":
            return False
        run.tape.move_by(target + (2 if i == m else 1))
    run.tape.to_right_end()
    return True


def _post_count_path(run: Run, ch: Channel, shape: Dima2Shape) -> bool:
    """Compare ``t'_1`` read from ``y`` with the number of blocks after ``11`` in ``w``."""
    prefix_len = shape.prefix_length
    seen = 0
    while True:
        seen += ch.take_run("0", prefix_len - seen + 1)
        if seen >= prefix_len or ch.recv() != "1":
            return False
        seen += 1
        if ch.peek() == "1":
            ch.recv()
            seen += 1
            break
    if seen != prefix_len:
        return False
    run.tape.move_by(prefix_len)
    count = len(shape.post)
    z = ch.take_run("0", count + 1)
    run.tape.move_by(sum(shape.post[:z]) + min(z, count))
    if z != count or ch.recv() != "1":
        run.tape.to_right_end()
        return False
    run.tape.to_right_end()
    return True


def dima2_body(run: Run, query: str = START) -> bool:
    shape = dima2_shape(run.tape.w)
    run.tape.to_right_end()
    if shape is None:
        run.details["deterministic"] = True
        return False
    run.tape.to_left_end()
    ch = run.channel(0)
    ch.ask(query)
    path = run.rng.randrange(3) + 1
    run.details["path"] = path
    if path == 1:
        verdict = _equal_path(run, ch)
    elif path == 2:
        verdict = _doubling_path(run, ch, shape)
    else:
        verdict = _post_count_path(run, ch, shape)
    run.tape.to_right_end()
    return verdict


def _read_count_header(run: Run, shape: Dima2Shape) -> None:
    run.tape.to_left_end()
    run.tape.move_by(shape.prefix_length)


def _count_match_path(run: Run, ch: Channel, shape: Dima2Shape) -> bool:
    zeros = sum(shape.post)
    got = ch.take_run("0", zeros + 1)
    run.tape.to_right_end()
    if got != zeros or ch.recv() != "1":
        return False
    return ch.peek() is None


def _count_heads_path(run: Run, ch: Channel, shape: Dima2Shape) -> bool:
    """One toss per ``0`` of ``y``; each head advances the head over one ``0`` of the
    post-separator part of ``w`` (a read-only counter).  Running off its end rejects;
    otherwise ``j`` is the number of fully consumed blocks."""
    ends = np.cumsum(shape.post)
    capacity = int(ends[-1])
    heads = 0
    while True:
        got = ch.take_run("0", 1 << 16)
        if got:
            flags = run.toss_flags(got)
            run.meter.tick(got)
            if heads + int(flags.sum()) > capacity:
                run.tape.to_right_end()
                return False
            heads += int(flags.sum())
            continue
        sym = ch.recv()
        if sym != "1" or ch.peek() is not None:
            return False
        break
    j = int(np.searchsorted(ends, heads, side="right"))
    run.tape.move_by(heads + j)
    run.details["heads"] = heads
    run.details["j"] = j % 8
    return j % 8 >= 4


def dima2_set_body(run: Run, repetitions: int = 3) -> bool:
    for _ in range(repetitions):
        run.tape.to_left_end()
        if not dima2_body(run, START):
            run.details["stage"] = "dima2"
            return False
    shape = dima2_shape(run.tape.w)
    _read_count_header(run, shape)
    ch = run.channel(0)
    ch.ask(ASK_COUNT)
    path = run.rng.randrange(2) + 1
    run.details["set_path"] = path
    if path == 1:
        verdict = _count_match_path(run, ch, shape)
    else:
        verdict = _count_heads_path(run, ch, shape)
    run.tape.to_right_end()
    return verdict
