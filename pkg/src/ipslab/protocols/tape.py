"""A work tape kept by two provers under chained signatures, and the verifier that
runs the exponential-space recognizer on it.

Cell ``i`` holds ``(m_i, r_i, s_i)`` with ``s_i = (m_i*a + r_i*b + r_{i-1}) mod q``;
odd cells live at prover 1, even cells at prover 2.  Only the verifier knows
``a``, ``b`` and ``r_0``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..errors import InputDomainError
from ..fingerprint import is_prime
from ..langspace import Alphabet, lex_rank
from ..runtime import Meter, Run

DEFAULT_Q = 251


class TamperDetected(Exception):
    def __init__(self, prover: int, cell: int):
        super().__init__(f"signature check failed at cell {cell} (prover {prover})")
        self.prover = prover
        self.cell = cell


def owner(cell: int) -> int:
    """1 for odd cells, 2 for even cells."""
    return 1 if cell % 2 else 2


class SignedTape:
    def __init__(self, provers: Sequence, q: int, rng, meter: Meter | None = None, alphabet_size: int = 2):
        if not is_prime(q) or q <= alphabet_size:
            raise InputDomainError(f"q must be a prime above the tape alphabet size {alphabet_size}")
        if len(provers) != 2:
            raise InputDomainError("the signed tape needs exactly two provers")
        self.provers = list(provers)
        self.q = q
        self.rng = rng
        self.meter = meter
        self.alphabet_size = alphabet_size
        self.a = rng.randrange(q)
        self.b = rng.randrange(q)
        self.r0 = 0
        self.length = 0
        self._r_last = 0  # r of the last cell, kept in finite control for appends

    def _sign(self, m: int, r: int, r_prev: int) -> int:
        return (m * self.a + r * self.b + r_prev) % self.q

    def _account(self, cells: int) -> None:
        if self.meter is not None:
            self.meter.symbols(3 * cells)
            self.meter.tick(3 * cells)

    def _put(self, i: int, m: int, r_prev: int) -> int:
        if not 0 <= m < self.alphabet_size:
            raise InputDomainError(f"tape symbol {m} outside the alphabet")
        r = self.rng.randrange(self.q)
        self.provers[owner(i) - 1].put(i, (m, r, self._sign(m, r, r_prev)))
        self._account(1)
        return r

    def _begin(self) -> None:
        for p in self.provers:
            p.begin_scan()

    def store(self, symbols: Sequence[int]) -> None:
        """Write a fresh tape from scratch."""
        self._begin()
        self.r0 = self.rng.randrange(self.q)
        r_prev = self.r0
        for i, m in enumerate(symbols, start=1):
            r_prev = self._put(i, m, r_prev)
        self.length = len(symbols)
        self._r_last = r_prev

    def append(self, m: int) -> None:
        self._r_last = self._put(self.length + 1, m, self._r_last if self.length else self.r0)
        self.length += 1

    def _fetch(self, i: int, r_prev: int) -> tuple[int, int]:
        m, r, s = self.provers[owner(i) - 1].get(i)
        self._account(1)
        if not (0 <= m < self.alphabet_size and 0 <= r < self.q) or s != self._sign(m, r, r_prev):
            raise TamperDetected(owner(i), i)
        return m, r

    def read(self) -> list[int]:
        """Scan left to right checking every signature."""
        self._begin()
        out, r_prev = [], self.r0
        for i in range(1, self.length + 1):
            m, r_prev = self._fetch(i, r_prev)
            out.append(m)
        return out

    def scan_update(self, transform: Callable[[list[int]], list[int]]) -> list[int]:
        """Read (verifying) and rewrite the tape with fresh nonces; ``transform``
        maps the old contents to the new ones and may lengthen the tape."""
        old = self.read()
        new = list(transform(list(old)))
        if len(new) < len(old):
            raise InputDomainError("a scan cannot shorten the tape")
        self._begin()
        self.r0 = self.rng.randrange(self.q)
        r_prev = self.r0
        for i, m in enumerate(new, start=1):
            r_prev = self._put(i, m, r_prev)
        self.length = len(new)
        self._r_last = r_prev
        return new


# --- storing an input with a head mark -------------------------------------

def encode_input(alphabet: Alphabet, w: str, mark: int = 1) -> list[int]:
    """Cell values ``2*v + [i == mark]`` with ``v`` the symbol index (0 = blank)."""
    cells = [alphabet.lex(c) - 1 for c in w] or [0]
    return [2 * v + (i == mark) for i, v in enumerate(cells, start=1)]


def fact3_body(run: Run, q: int = DEFAULT_Q, alphabet: Alphabet | None = None) -> bool:
    """Store the input with the head mark on cell 1, move the mark one cell right,
    read the tape back and compare with the expected contents."""
    w = run.tape.w
    alphabet = alphabet or (run.spec.alphabet if run.spec else Alphabet(tuple(sorted(set(w))) or ("a",)))
    provers = [ch.prover for ch in run.channels]
    tape = SignedTape(provers, q, run.rng, run.meter, 2 * (alphabet.k + 1))
    cells = encode_input(alphabet, w)
    run.tape.to_right_end()
    try:
        tape.store(cells)
        mark = 2 if len(cells) > 1 else 1

        def move_mark(old):
            return [(m & ~1) | (i == mark) for i, m in enumerate(old, start=1)]

        tape.scan_update(move_mark)
        expected = move_mark(cells)
        got = tape.read()
    except TamperDetected as exc:
        run.details["cheater"] = exc.prover
        run.details["cell"] = exc.cell
        return False
    run.details["contents_ok"] = got == expected
    return got == expected


# --- the recognizer on a signed tape ---------------------------------------

_TRACKS = ("lex", "tgt", "count", "heads")


class _Layout:
    """Cell value = input symbol (0 = blank) + (k+1) * packed track bits."""

    def __init__(self, k: int):
        self.base = k + 1
        self.size = self.base * (1 << len(_TRACKS))

    def decode(self, cells: list[int]) -> tuple[list[int], dict[str, int]]:
        syms = [m % self.base for m in cells]
        tracks = dict.fromkeys(_TRACKS, 0)
        for i, m in enumerate(cells):
            bits = m // self.base
            for t, name in enumerate(_TRACKS):
                tracks[name] |= ((bits >> t) & 1) << i
        return syms, tracks

    def encode(self, syms: list[int], tracks: dict[str, int]) -> list[int]:
        width = max([len(syms)] + [v.bit_length() for v in tracks.values()])
        syms = syms + [0] * (width - len(syms))
        out = []
        for i in range(width):
            bits = sum(((tracks[name] >> i) & 1) << t for t, name in enumerate(_TRACKS))
            out.append(syms[i] + self.base * bits)
        return out


def two_prover_body(run: Run, q: int = DEFAULT_Q, batch: int | None = None) -> bool:
    """One-way pass copying ``w`` to the signed tape while building ``lex(w)`` in
    binary, then ``64**l`` tosses counted on the tape in batches of a fixed size
    (the head count within a batch is kept in finite control)."""
    alphabet = run.spec.alphabet
    k = alphabet.k
    layout = _Layout(k)
    provers = [ch.prover for ch in run.channels]
    tape = SignedTape(provers, q, run.rng, run.meter, layout.size)

    def update(fn):
        def transform(cells):
            syms, tracks = layout.decode(cells)
            fn(syms, tracks)
            return layout.encode(syms, tracks)
        return tape.scan_update(transform)

    try:
        w = run.tape.w
        tape.store(layout.encode([0], {"lex": 1, "tgt": 1, "count": 0, "heads": 0}))
        for pos, c in enumerate(w):
            run.tape.move_by(1)
            v = alphabet.lex(c)

            def add_symbol(syms, tracks, pos=pos, v=v):
                if pos >= len(syms):
                    syms.append(0)
                syms[pos] = v - 1
                tracks["lex"] = v if pos == 0 else k * tracks["lex"] + v - k

            update(add_symbol)
        run.tape.to_right_end()

        def lex_step(syms, tracks):
            tracks["lex"] -= 1
            tracks["tgt"] <<= 6

        while True:
            _, tracks = layout.decode(tape.read())
            if tracks["lex"] == 0:
                break
            update(lex_step)
        l_is_one = tracks["tgt"] == 64
        size = batch or (64 if l_is_one else 4096)
        while tracks["count"] < tracks["tgt"]:
            h = int(np.count_nonzero(run.toss_flags(size)))
            run.meter.tick(size)

            def add_batch(syms, tracks, h=h):
                tracks["count"] += size
                tracks["heads"] += h

            cells = update(add_batch)
            _, tracks = layout.decode(cells)
        _, tracks = layout.decode(tape.read())
    except TamperDetected as exc:
        run.details["cheater"] = exc.prover
        run.details["cell"] = exc.cell
        return False
    l = tracks["tgt"].bit_length() // 6
    run.details["l"] = l
    run.details["heads"] = tracks["heads"]
    run.details["expected_l"] = lex_rank(alphabet, run.tape.w)
    return (tracks["heads"] >> (3 * l + 2)) & 1 == 1


# --- exact enumeration over the verifier's random choices ------------------

class ScriptExhausted(Exception):
    pass


class ScriptedRandom:
    """Replays a fixed sequence of values in ``[0, q)`` for ``randrange(q)``."""

    def __init__(self, script: Sequence[int], q: int):
        self.script = tuple(script)
        self.q = q
        self.used = 0

    def randrange(self, n: int) -> int:
        if n != self.q:
            raise InputDomainError(f"scripted source only draws from [0, {self.q})")
        if self.used >= len(self.script):
            raise ScriptExhausted
        self.used += 1
        return self.script[self.used - 1]


def exact_probability(experiment: Callable[[Callable[[], ScriptedRandom]], bool], q: int) -> Fraction:
    """Probability that ``experiment`` returns True when every ``randrange(q)`` it
    makes is uniform, by enumerating all draw sequences.

    ``experiment`` receives a factory for the shared scripted source so that
    verifier and provers draw from one enumerated stream.
    """
    total = Fraction(0)
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        src = ScriptedRandom(prefix, q)
        try:
            hit = experiment(lambda: src)
        except ScriptExhausted:
            stack.extend(prefix + (v,) for v in range(q))
            continue
        if hit:
            total += Fraction(1, q ** len(prefix))
    return total
