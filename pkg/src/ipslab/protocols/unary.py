"""Constant-space verifiers for unary languages that read a block certificate.

Certificates have the shape ``a^{m1} b a^{m2} b ... a^{mt} b b`` (finite) or
the same without the closing ``b`` (infinite).  The verifier never writes to
a work tape: every count is realised by moving the input head.
"""
from __future__ import annotations

from ..runtime import ASK_CERT, START, Channel, Run

_A, _B = "a", "b"


def _finish_block(ch: Channel) -> bool:
    """Consume the ``b`` closing a block; False on a grammar defect."""
    return ch.recv() == _B


def _at_terminator(ch: Channel) -> bool | None:
    """After a block: True if ``b`` closes the certificate, False if another block
    follows, None on a defect."""
    nxt = ch.peek()
    if nxt == _B:
        ch.recv()
        return True
    return False if nxt == _A else None


def _skip_first_block(run: Run, ch: Channel, need: int | None) -> bool:
    """Read ``a^{m1} b`` moving the head right one cell per symbol, then return to ``¢``.

    Rejects if ``m1`` overruns the input (keeps the pass linear even against an
    endless first block) or differs from ``need`` when given.
    """
    n = run.n
    m1 = ch.take_run(_A, n + 1)
    run.tape.move_by(m1)
    if m1 == 0 or m1 > n or (need is not None and m1 != need):
        return False
    if not _finish_block(ch):
        return False
    run.tape.to_left_end()
    return True


def _sum_path(run: Run, ch: Channel, scale: int, origin: int, min_blocks: int, first_block: int | None) -> bool:
    """Head starts at cell ``origin`` and moves ``scale`` cells per ``a``; accept iff the
    certificate is finite, has at least ``min_blocks`` blocks and lands exactly on cell n."""
    n = run.n
    run.tape.move_by(origin)
    pos, t = origin, 0
    while True:
        room = (n - pos) // scale
        c = ch.take_run(_A, room + 1)
        if c > room:
            run.tape.to_right_end()
            return False
        if (t == 0 and (c == 0 or (first_block is not None and c != first_block))):
            return False
        run.tape.move_by(c * scale)
        pos += c * scale
        if not _finish_block(ch):
            return False
        t += 1
        end = _at_terminator(ch)
        if end is None:
            return False
        if end:
            return pos == n and t >= min_blocks


def _count_b_path(run: Run, ch: Channel) -> bool:
    """``n = sum_{j>=2} m_j + t``: skip the first block, then one cell per later ``a`` and per ``b``."""
    n = run.n
    if not _skip_first_block(run, ch, None):
        return False
    pos = 1
    run.tape.move_by(1)
    while True:
        end = _at_terminator(ch)
        if end is None:
            return False
        if end:
            return pos == n
        c = ch.take_run(_A, n - pos + 1)
        if pos + c > n:
            run.tape.to_right_end()
            return False
        if not _finish_block(ch):
            return False
        pos += c + 1
        if pos > n:
            run.tape.to_right_end()
            return False
        run.tape.move_by(c + 1)


def _remaining_below_n(run: Run, ch: Channel) -> bool:
    """After a walk ends on ``$``: accept iff the rest of the certificate is finite
    and holds fewer than ``n`` a's (one cell left per ``a``)."""
    n = run.n
    seen = 0
    while True:
        c = ch.take_run(_A, n - seen)
        seen += c
        run.tape.move_by(-c)
        if seen >= n:
            return False
        nxt = ch.recv()
        if nxt != _B:
            return False
        end = ch.peek()
        if end == _B:
            ch.recv()
            return True
        if end != _A:
            return False


def _pairs_path(run: Run, ch: Channel, scale: int, shift: bool, first_block: int | None) -> bool:
    """Compare ``scale*m_{2j-1} = m_{2j}`` (or the pairs shifted by one block) by moving
    right ``scale`` cells per ``a`` and back one cell per ``a``, with a random walk
    between comparisons."""
    n = run.n
    tape = run.tape
    if shift and not _skip_first_block(run, ch, first_block):
        return False
    check_first = not shift and first_block is not None
    while True:
        # first block of the pair: head moves right scale cells per a
        room = n // scale
        c = ch.take_run(_A, room + 1)
        if c > room:
            tape.to_right_end()
            return False
        if c == 0 or (check_first and c != first_block):
            return False
        check_first = False
        tape.move_by(c * scale)
        if not _finish_block(ch):
            return False
        end = _at_terminator(ch)
        if end is None:
            return False
        if end:
            return True
        # second block: one cell left per a, must land exactly on the left marker
        d = ch.take_run(_A, c * scale + 1)
        tape.move_by(-d)
        if d != c * scale:
            return False
        if not _finish_block(ch):
            return False
        end = _at_terminator(ch)
        if end is None:
            return False
        if end:
            return True
        if run.walk().right:
            return _remaining_below_n(run, ch)


def usquare_body(run: Run, query: str = START) -> bool:
    n = run.n
    if n <= 3:
        run.tape.to_right_end()
        run.details["deterministic"] = True
        return n == 1
    ch = run.channel(0)
    ch.ask(query)
    path = run.rng.randrange(4) + 1
    run.details["path"] = path
    if path == 1:
        return _sum_path(run, ch, 1, 0, 2, None)
    if path == 2:
        return _count_b_path(run, ch)
    return _pairs_path(run, ch, 1, path == 4, None)


def upower64_body(run: Run, query: str = START) -> bool:
    n = run.n
    if n <= 64:
        run.tape.to_right_end()
        run.details["deterministic"] = True
        return n == 64
    ch = run.channel(0)
    ch.ask(query)
    path = run.rng.randrange(3) + 1
    run.details["path"] = path
    if path == 1:
        return _sum_path(run, ch, 63, 1, 1, 1)
    return _pairs_path(run, ch, 64, path == 3, 1)


def _block_count_path(run: Run, ch: Channel, k: int) -> bool:
    """Toss once per input cell; each head consumes one ``a`` of the certificate and
    every ``b`` read closes a block and advances ``j``.  Heads beyond the certificate's
    a's reject; otherwise accept iff ``j mod 8`` lies in 4..7."""
    total = 64**k
    heads = 0
    left = total
    while left:
        m = min(left, 1 << 20)
        heads += int(run.toss_flags(m).sum())
        left -= m
    run.tape.move_by(total)
    run.details["heads"] = heads
    need, j = heads, 0
    while need > 0:
        need -= ch.take_run(_A, need)
        if need == 0:
            if ch.peek() == _B:
                ch.recv()
                j += 1
            break
        if ch.recv() != _B:
            return False
        j += 1
        if ch.peek() != _A:
            return False
    run.details["j"] = j % 8
    return j % 8 >= 4


def upower64_set_body(run: Run, repetitions: int = 3) -> bool:
    for _ in range(repetitions):
        run.tape.to_left_end()
        if not upower64_body(run, START):
            run.details["stage"] = "upower64"
            return False
    run.tape.to_left_end()
    k = 0
    while 64 ** (k + 1) <= run.n:
        k += 1
    if k == 0:
        return False
    path = run.rng.randrange(2) + 1
    run.details["set_path"] = path
    if path == 1:
        return usquare_body(run, ASK_CERT)
    ch = run.channel(0)
    ch.ask(ASK_CERT)
    return _block_count_path(run, ch, k)
