"""Logarithmic-space verifier for an arbitrary unary language (fingerprinted prover counts)."""
from __future__ import annotations

import numpy as np

from ..fingerprint import DEFAULT_C, fingerprint_width, sample_prime
from ..runtime import ASK_BITS, START, Run

_CHUNK = 1 << 16
HALT_LIMIT = 8


def _halting_flags(run: Run, count: int, k: int) -> np.ndarray:
    """``count`` independent events of probability exactly ``64**-k``."""
    bits = 6 * k
    words = run.rng.raw64(count)
    if bits >= 64:
        hit = words == 0
        for idx in np.flatnonzero(hit):
            hit[idx] = run.rng.randbits(bits - 64) == 0
        return hit
    return (words >> np.uint64(64 - bits)) == 0


def logspace_body(run: Run, c: int = DEFAULT_C) -> bool:
    n = run.n
    run.tape.to_right_end()
    if n == 0:
        run.details["deterministic"] = True
        return run.spec.bit(1) == 1
    k = n + 1
    width = fingerprint_width(c, k)
    work = run.work
    reg = {name: work.register(name, width) for name in ("p1", "p2", "r1", "c1", "c2")}
    halts = work.register("halt", HALT_LIMIT.bit_length())

    # phase 1: primes and r1 = 64^k mod p1 by k multiplications (one input sweep)
    p1 = sample_prime(width, run.rng)
    p2 = sample_prime(width, run.rng)
    reg["p1"].value, reg["p2"].value = p1, p2
    run.tape.to_left_end()
    r1 = 1 % p1
    for _ in range(k):
        r1 = r1 * 64 % p1
    run.tape.to_right_end()
    reg["r1"].value = r1
    run.details["width"] = width

    # phase 2: count the prover's a's; a halting walk per a, then a toss
    ch = run.channel(0)
    ch.ask(START)
    c1 = c2 = ch_count = 0
    per_symbol = n + 2
    while True:
        got = ch.take_run("a", _CHUNK)
        if got:
            hits = np.cumsum(_halting_flags(run, got, k)) + ch_count
            over = np.flatnonzero(hits >= HALT_LIMIT)
            if over.size:
                stop = int(over[0])
                run.meter.tick((stop + 1) * per_symbol + stop)
                halts.value = HALT_LIMIT
                run.details["halted"] = True
                return False
            ch_count = int(hits[-1])
            halts.value = ch_count
            flags = run.toss_flags(got)
            ch.send_many(flags)
            run.meter.tick(got * (per_symbol + 1))
            c1 = (c1 + got) % p1
            c2 = (c2 + int(np.count_nonzero(flags))) % p2
            reg["c1"].value, reg["c2"].value = c1, c2
            continue
        if ch.recv() != "b":
            return False
        break
    if c1 != r1:
        run.details["count_mismatch"] = True
        return False

    # phase 3: bin(t), least significant bit first, terminated by 'e'
    ch.ask(ASK_BITS)
    max_len = 6 * k + 1
    length = work.register("len", (max_len + 1).bit_length())
    pow2 = work.register("pow2", width)
    acc = work.register("acc", width)
    p_2, a_2, xbit, size = 1 % p2, 0, 0, 0
    while True:
        s = ch.recv()
        run.meter.tick()
        if s == "e":
            break
        if s not in ("0", "1"):
            return False
        size += 1
        if size > max_len:
            run.details["too_long"] = True
            return False
        length.value = size
        if size == 3 * k + 3:
            xbit = int(s)
        if s == "1":
            a_2 = (a_2 + p_2) % p2
        p_2 = p_2 * 2 % p2
        pow2.value, acc.value = p_2, a_2
    if a_2 != c2:
        run.details["residue_mismatch"] = True
        return False
    run.details["x_prime"] = xbit
    return xbit == 1
