"""Prover strategies: honest certificates for every protocol and a catalog of cheats.

Streaming provers describe their output as runs ``(symbol, count)``; a count of
``math.inf`` (or an endless run generator) makes the stream unbounded, in which
case the verifier's budget is what stops the run.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .errors import ConfigError, InputDomainError
from .langspace import (UNARY, Alphabet, dima2_index, dima2_member, dima2_shape, lex_rank,
                        upower64_exponent)
from .rng import RandomSource
from .runtime import ASK_BITS, ASK_CERT, ASK_COUNT, START

INF = math.inf


class ProverStrategy:
    """Base strategy: silent, ignores everything it is sent."""

    id = "silent"
    unbounded = False

    def receive(self, query: str) -> None:
        pass

    def receive_many(self, symbols) -> None:
        for s in symbols:
            self.receive(s)

    def emit(self) -> str | None:
        return None

    def emit_run(self, symbol: str, limit: int) -> int:
        """Emit up to ``limit`` copies of ``symbol`` in bulk if the stream is positioned on a
        run of it; returns how many were emitted (0 means: use :meth:`emit`)."""
        return 0


class RunStream:
    """Cursor over an iterable of ``(symbol, count)`` runs."""

    def __init__(self, runs: Iterable[tuple[str, float]]):
        self._runs: Iterator = iter(runs)
        self._sym: str | None = None
        self._left: float = 0

    def _advance(self) -> bool:
        while self._left <= 0:
            try:
                self._sym, self._left = next(self._runs)
            except StopIteration:
                self._sym, self._left = None, 0
                return False
        return True

    def emit(self) -> str | None:
        if not self._advance():
            return None
        self._left -= 1
        return self._sym

    def emit_run(self, symbol: str, limit: int) -> int:
        if not self._advance() or self._sym != symbol:
            return 0
        got = int(min(self._left, limit))
        self._left -= got
        return got


def runs_of(text: str) -> list[tuple[str, int]]:
    return [(s, len(list(g))) for s, g in itertools.groupby(text)]


def runs_text(runs: Iterable[tuple[str, float]]) -> str:
    """Materialise a finite run list as a string."""
    out = []
    for s, c in runs:
        if c == INF:
            raise InputDomainError("cannot materialise an unbounded stream")
        out.append(s * int(c))
    return "".join(out)


class CertificateProver(ProverStrategy):
    """Answers each query symbol with a fresh stream built by ``factories[query]``."""

    def __init__(self, factories: dict[str, Callable[[], Iterable]], id: str = "certificate",
                 unbounded: bool = False):
        self.factories = factories
        self.id = id
        self.unbounded = unbounded
        self.stream = RunStream(())

    def receive(self, query: str) -> None:
        factory = self.factories.get(query)
        self.stream = RunStream(factory() if factory else ())

    def receive_many(self, symbols) -> None:
        pass

    def emit(self):
        return self.stream.emit()

    def emit_run(self, symbol, limit):
        return self.stream.emit_run(symbol, limit)


# --- certificate builders --------------------------------------------------

def block_runs(blocks: Iterable[float], closed: bool = True) -> Iterator[tuple[str, float]]:
    """``a^{m1} b a^{m2} b ...`` and, when ``closed``, a final ``b``."""
    for m in blocks:
        yield ("a", m)
        yield ("b", 1)
    if closed:
        yield ("b", 1)


def usquare_blocks(n: int) -> list[int]:
    """``m`` blocks of ``m`` for the largest ``m*m <= n`` (the member certificate when ``n = m*m``)."""
    m = max(1, math.isqrt(n))
    return [m] * m


def upower64_blocks(n: int) -> list[int]:
    """Blocks ``1, 64, ..., 64**(t-1)`` for the largest ``64**t <= n``."""
    t = max(1, upower64_exponent(n) or _floor_log64(n))
    return [64**j for j in range(t)]


def _floor_log64(n: int) -> int:
    t = 0
    while 64 ** (t + 1) <= n:
        t += 1
    return t


def set_cert_blocks(n: int) -> list[int]:
    """``(a^{8^k} b)^{8^k}`` for ``n = 64**k``."""
    k = max(1, _floor_log64(n))
    return [8**k] * (8**k)


def _const(runs: list) -> Callable[[], list]:
    return lambda: list(runs)


# --- the logspace protocol -------------------------------------------------

class LogspaceProver(ProverStrategy):
    """Sends ``a^{64^k + offset} b``, counts the heads it is told about, then sends ``bin(t)``
    least significant bit first followed by ``e``."""

    def __init__(self, k: int, offset: int = 0, infinite: bool = False, flip_bit: int | None = None,
                 pad: int = 0, truncate: int = 0, id: str = "honest"):
        self.k = k
        self.offset = offset
        self.infinite = infinite
        self.flip_bit = flip_bit
        self.pad = pad
        self.truncate = truncate
        self.id = id
        self.unbounded = infinite
        self.heads = 0
        self.stream = RunStream(())

    def receive(self, query: str) -> None:
        if query == START:
            self.heads = 0
            count = INF if self.infinite else max(0, 64**self.k + self.offset)
            self.stream = RunStream([("a", count), ("b", 1)])
        elif query == ASK_BITS:
            t = self.heads
            if self.flip_bit is not None:
                t ^= 1 << (self.flip_bit - 1)
            bits = bin(t)[2:][::-1] if t else "0"
            if self.truncate:
                bits = bits[: max(0, len(bits) - self.truncate)]
            bits += "0" * self.pad
            self.stream = RunStream(runs_of(bits + "e"))

    def receive_many(self, symbols) -> None:
        self.heads += int(sum(bool(s) for s in symbols))

    def emit(self):
        return self.stream.emit()

    def emit_run(self, symbol, limit):
        return self.stream.emit_run(symbol, limit)


# --- the weak protocol: counter storage ------------------------------------

class CounterProver(ProverStrategy):
    """Stores four counters, reports them as ``a^s1 b^s2 c^s3 d^s4 e`` and applies the
    deltas it receives.

    Cheats: ``drift`` is added to counter ``counter`` right after step ``drift_step``;
    ``zero_step`` reports all counters as zero at that step; ``endless`` never finishes
    the first report; ``runaway`` adds one to every counter after every step.
    """

    _SYMS = ("a", "b", "c", "d")

    def __init__(self, drift_step: int | None = None, counter: int = 2, drift: int = 1,
                 zero_step: int | None = None, endless: bool = False, runaway: bool = False,
                 id: str = "honest"):
        self.drift_step = drift_step
        self.counter = counter
        self.drift = drift
        self.zero_step = zero_step
        self.endless = endless
        self.runaway = runaway
        self.id = id
        self.unbounded = endless or runaway
        self._reset()

    def _reset(self):
        self.values = [0, 0, 0, 0]
        self.step = 0
        self._pending: list[int] = []
        self._report()

    def _report(self):
        self.step += 1
        if self.endless:
            self.stream = RunStream([("a", INF)])
            return
        shown = [0] * 4 if self.step == self.zero_step else self.values
        self.stream = RunStream([(s, c) for s, c in zip(self._SYMS, shown)] + [("e", 1)])

    def receive(self, query: str) -> None:
        if query == START:
            self._reset()
            return
        self._pending.append({"+": 1, "0": 0, "-": -1}[query])
        if len(self._pending) == 4:
            for j, d in enumerate(self._pending):
                self.values[j] = max(0, self.values[j] + d)
            self._pending = []
            if self.step == self.drift_step:
                j = self.counter - 1
                self.values[j] = max(0, self.values[j] + self.drift)
            if self.runaway:
                self.values = [v + 1 for v in self.values]
            self._report()

    def emit(self):
        return self.stream.emit()

    def emit_run(self, symbol, limit):
        return self.stream.emit_run(symbol, limit)


# --- signed-tape storage ---------------------------------------------------

class TapeProver(ProverStrategy):
    """Faithfully stores the triples it is given."""

    id = "honest"

    def __init__(self):
        self.cells: dict[int, tuple] = {}
        self.previous: dict[int, tuple] = {}
        self.scan = 0

    def begin_scan(self) -> None:
        self.scan += 1

    def put(self, i: int, triple: tuple) -> None:
        if i in self.cells:
            self.previous[i] = self.cells[i]
        self.cells[i] = triple

    def get(self, i: int) -> tuple:
        return self.cells[i]


class _TamperingTapeProver(TapeProver):
    """Alters its copy of ``target`` once, at the first read during scan ``at_scan`` or later.
    ``target=None`` picks the first cell it stores, ``"last"`` the last one."""

    def __init__(self, target: int | str | None = None, at_scan: int = 3):
        super().__init__()
        self.target = target
        self.at_scan = at_scan
        self.done = False

    def _target(self) -> int | None:
        if not self.cells:
            return None
        if self.target is None:
            return min(self.cells)
        if self.target == "last":
            return max(self.cells)
        return int(self.target)

    def get(self, i: int) -> tuple:
        if not self.done and self.scan >= self.at_scan and i == self._target():
            altered = self.tamper(i, self.cells[i])
            if altered is not None:
                self.cells[i] = altered
                self.done = True
        return self.cells[i]

    def tamper(self, i: int, triple: tuple) -> tuple | None:
        raise NotImplementedError


class FlipSymbolProver(_TamperingTapeProver):
    """Changes ``m_i`` (toggles its low bit) and keeps ``r_i, s_i``."""

    id = "flip"

    def tamper(self, i, triple):
        m, r, s = triple
        return (m ^ 1, r, s)


class GuessSignatureProver(_TamperingTapeProver):
    """Changes ``m_i`` and shifts ``s_i`` by ``delta * (m_i' - m_i)``, a guess of the key ``a``.
    A uniform ``delta`` makes the forged signature uniform; sharing one ``delta`` lets
    two colluding provers forge both their cells under the same guess."""

    id = "guess"

    def __init__(self, q: int, rng=None, target=None, at_scan: int = 3, delta: int | None = None):
        super().__init__(target, at_scan)
        self.q = q
        self.rng = rng if rng is not None else RandomSource(0)
        self.delta = delta

    def tamper(self, i, triple):
        m, r, s = triple
        if self.delta is None:
            self.delta = self.rng.randrange(self.q)
        m2 = m ^ 1
        return (m2, r, (s + self.delta * (m2 - m)) % self.q)


class ReplayProver(_TamperingTapeProver):
    """Answers with the triple it held for the cell before the latest rewrite."""

    id = "replay"

    def __init__(self, target="last", at_scan: int = 3):
        super().__init__(target, at_scan)

    def tamper(self, i, triple):
        return self.previous.get(i)


# --- honest strategies -----------------------------------------------------

def _unary_n(w: str) -> int:
    UNARY.check(w)
    return len(w)


def honest(protocol_id: str, w: str, *, spec=None, q: int = 251) -> list[ProverStrategy]:
    """Provers that make each protocol's completeness bound attainable on members.
    On non-members they send the certificate of the nearest member below."""
    pid = protocol_id
    if pid in ("thm1-unary", "cor1-kary", "thm3-1p4ca"):
        return []
    if pid == "thm2-logspace":
        return [LogspaceProver(_unary_n(w) + 1)]
    if pid == "thm4-weak":
        return [CounterProver()]
    if pid in ("fact3-tape", "thm5-twoprover"):
        return [TapeProver(), TapeProver()]
    if pid == "thm6-usquare":
        blocks = usquare_blocks(_unary_n(w))
        return [CertificateProver({START: lambda: block_runs(blocks), ASK_CERT: lambda: block_runs(blocks)},
                                  id="honest")]
    if pid == "thm7-upower64":
        blocks = upower64_blocks(_unary_n(w))
        return [CertificateProver({START: lambda: block_runs(blocks)}, id="honest")]
    if pid == "thm10-upower64-set":
        n = _unary_n(w)
        first, cert = upower64_blocks(n), set_cert_blocks(n)
        return [CertificateProver({START: lambda: block_runs(first), ASK_CERT: lambda: block_runs(cert)},
                                  id="honest")]
    if pid == "thm8-dima2":
        return [CertificateProver({START: _const(runs_of(w))}, id="honest")]
    if pid == "thm9-dima2-set":
        shape = dima2_shape(w)
        zeros = sum(shape.post) if shape else 0
        return [CertificateProver({START: _const(runs_of(w)), ASK_COUNT: _const([("0", zeros), ("1", 1)])},
                                  id="honest")]
    raise ConfigError(f"unknown protocol id {protocol_id!r}")


honest_provers = honest


# --- the cheat catalog -----------------------------------------------------

@dataclass(frozen=True)
class CheatSpec:
    """A named adversary: ``build(w, **params)`` returns the prover list."""

    id: str
    finite: bool
    build: Callable[..., list]
    params: dict = field(default_factory=dict)
    fuzz: tuple = ()
    note: str = ""

    def make(self, w: str, **overrides) -> list:
        return self.build(w, **{**self.params, **overrides})


def _usquare_cheat(blocks_fn, closed=True, factory=None):
    def build(w, **p):
        n = _unary_n(w)
        if factory is not None:
            runs = factory(n, **p)
            return [CertificateProver({START: runs, ASK_CERT: runs}, unbounded=True)]
        blocks = blocks_fn(n, **p)
        return [CertificateProver({START: lambda: block_runs(blocks, closed),
                                   ASK_CERT: lambda: block_runs(blocks, closed)})]
    return build


def _nearest_square(n):
    m = max(1, round(math.sqrt(n)))
    return [m] * m


def _next_square(n):
    m = math.isqrt(n) + 1
    return [m] * m


def _sum_matching(n):
    m = max(1, math.isqrt(n))
    rest = n - m * m
    return [m] * m + ([rest] if rest else [])


def _pad_last(n):
    m = max(1, math.isqrt(n))
    return [m] * (m - 1) + [m + n - m * m]


def _off_by_one(n, index=0):
    m = max(1, math.isqrt(n))
    blocks = [m] * m
    blocks[index % m] += 1
    return blocks


def _periodic_ceil_root(n):
    m = math.isqrt(n - 1) + 1
    return lambda: itertools.cycle([("a", m), ("b", 1)])


def _growing(n):
    return lambda: itertools.chain.from_iterable((("a", i), ("b", 1)) for i in itertools.count(1))


def _cert_prover(runs_fn, query=START, extra=None, unbounded=False):
    factories = {query: runs_fn}
    factories.update(extra or {})
    return CertificateProver(factories, unbounded=unbounded)


def _thm6_catalog():
    return [
        CheatSpec("nearest-member", True, _usquare_cheat(lambda n: _nearest_square(n))),
        CheatSpec("next-member", True, _usquare_cheat(lambda n: _next_square(n))),
        CheatSpec("sum-matching", True, _usquare_cheat(lambda n: _sum_matching(n))),
        CheatSpec("pad-last-block", True, _usquare_cheat(lambda n: _pad_last(n))),
        CheatSpec("off-by-one", True, _usquare_cheat(lambda n, index=0: _off_by_one(n, index)),
                  {"index": 0}, ({"index": 0}, {"index": 1}, {"index": 2})),
        CheatSpec("infinite-periodic", False, _usquare_cheat(None, factory=lambda n: _periodic_ceil_root(n))),
        CheatSpec("infinite-growing", False, _usquare_cheat(None, factory=lambda n: _growing(n))),
        CheatSpec("grammar-defect", True,
                  lambda w: [_cert_prover(lambda: [("b", 1), ("a", len(w)), ("b", 2)])]),
        CheatSpec("truncated", True, _usquare_cheat(lambda n: _nearest_square(n), closed=False)),
    ]


def _thm7_catalog():
    def blocks_cheat(fn, closed=True):
        def build(w, **p):
            blocks = fn(_unary_n(w), **p)
            return [_cert_prover(lambda: block_runs(blocks, closed))]
        return build

    def sum_matching(n):
        # n = 1 + 63 * (sum of blocks) when 63 divides n - 1, else the closest below
        total = max(1, (n - 1) // 63)
        return [1, total - 1] if total > 1 else [1]

    def geometric(w):
        return [_cert_prover(lambda: block_runs((64**j for j in itertools.count()), False), unbounded=True)]

    def periodic(w):
        return [_cert_prover(lambda: itertools.cycle([("a", 1), ("b", 1)]), unbounded=True)]

    return [
        CheatSpec("nearest-member", True, blocks_cheat(lambda n: [64**j for j in range(max(1, round(math.log(n, 64))))])),
        CheatSpec("sum-matching", True, blocks_cheat(sum_matching)),
        CheatSpec("wrong-first-block", True, blocks_cheat(lambda n: [2, 128])),
        CheatSpec("infinite-geometric", False, geometric),
        CheatSpec("infinite-periodic", False, periodic),
        CheatSpec("truncated", True, blocks_cheat(lambda n: upower64_blocks(n), closed=False)),
    ]


def _mutate(w: str, pos: int) -> str:
    pos %= len(w)
    return w[:pos] + ("1" if w[pos] == "0" else "0") + w[pos + 1:]


def _thm8_catalog():
    def copy_cheat(fn):
        def build(w, **p):
            y = fn(w, **p)
            return [_cert_prover(_const(runs_of(y)))]
        return build

    def nearest(w):
        k = dima2_index(w) or 1
        return dima2_member(k)

    return [
        CheatSpec("mutated-copy", True, copy_cheat(lambda w, pos=5: _mutate(w, pos)), {"pos": 5},
                  tuple({"pos": p} for p in (0, 5, 20, 40, 82))),
        CheatSpec("truncated-copy", True, copy_cheat(lambda w: w[:-1])),
        CheatSpec("nearest-member", True, copy_cheat(nearest)),
        CheatSpec("infinite-zeros", False,
                  lambda w: [_cert_prover(lambda: [("0", INF)], unbounded=True)]),
        CheatSpec("doubled", True, copy_cheat(lambda w: w + w)),
    ]


def _thm9_catalog():
    def count_cheat(runs_fn, start_fn=None, unbounded=False):
        def build(w, **p):
            shape = dima2_shape(w)
            zeros = sum(shape.post) if shape else 64
            start = start_fn(w) if start_fn else w
            return [CertificateProver({START: _const(runs_of(start)),
                                       ASK_COUNT: lambda: runs_fn(zeros)}, unbounded=unbounded)]
        return build

    return [
        CheatSpec("count-short", True, count_cheat(lambda z: [("0", z - 1), ("1", 1)])),
        CheatSpec("count-long", True, count_cheat(lambda z: [("0", z + 1), ("1", 1)])),
        CheatSpec("count-infinite", False, count_cheat(lambda z: [("0", INF)], unbounded=True)),
        CheatSpec("count-malformed", True, count_cheat(lambda z: [("0", z), ("1", 2)])),
        CheatSpec("wrong-start-cert", True, count_cheat(lambda z: [("0", z), ("1", 1)],
                                                        start_fn=lambda w: _mutate(w, 5))),
    ]


def _thm10_catalog():
    def cert_cheat(cert_fn, unbounded=False):
        def build(w, **p):
            n = _unary_n(w)
            first = upower64_blocks(n)
            return [CertificateProver({START: lambda: block_runs(first),
                                       ASK_CERT: lambda: cert_fn(n)}, unbounded=unbounded)]
        return build

    def side(n):
        return 8 ** max(1, _floor_log64(n))

    return [
        CheatSpec("cert-extra-block", True, cert_cheat(lambda n: block_runs([side(n)] * (side(n) + 1)))),
        CheatSpec("cert-short-block", True,
                  cert_cheat(lambda n: block_runs([side(n)] * (side(n) - 1) + [side(n) - 1]))),
        CheatSpec("cert-few-blocks", True, cert_cheat(lambda n: block_runs([side(n)] * 4))),
        CheatSpec("cert-infinite", False,
                  cert_cheat(lambda n: itertools.cycle([("a", side(n)), ("b", 1)]), unbounded=True)),
    ]


def _thm2_catalog():
    def build(w, **p):
        return [LogspaceProver(_unary_n(w) + 1, **p)]

    return [
        CheatSpec("count-plus-one", True, lambda w: build(w, offset=1, id="count-plus-one")),
        CheatSpec("count-minus-one", True, lambda w: build(w, offset=-1, id="count-minus-one")),
        CheatSpec("count-plus-primorial", True, lambda w: build(w, offset=30030, id="count-plus-primorial")),
        CheatSpec("infinite-a", False, lambda w: build(w, infinite=True, id="infinite-a")),
        CheatSpec("flip-decision-bit", True,
                  lambda w: build(w, flip_bit=3 * (_unary_n(w) + 1) + 3, id="flip-decision-bit")),
        CheatSpec("long-bits", True, lambda w: build(w, pad=6 * (_unary_n(w) + 1) + 2, id="long-bits")),
        CheatSpec("truncate-bits", True, lambda w: build(w, truncate=1, id="truncate-bits")),
    ]


def _thm4_catalog():
    return [
        CheatSpec("drift", True, lambda w, **p: [CounterProver(id="drift", **p)],
                  {"drift_step": 40, "counter": 2, "drift": 1},
                  tuple({"drift_step": s, "counter": c, "drift": d}
                        for s, c, d in ((10, 1, 1), (40, 2, 1), (70, 3, 1), (100, 2, -1)))),
        CheatSpec("zero-lie", True, lambda w, zero_step=80: [CounterProver(zero_step=zero_step, id="zero-lie")],
                  {"zero_step": 80}),
        CheatSpec("infinite-message", False, lambda w: [CounterProver(endless=True, id="infinite-message")]),
        CheatSpec("runaway", False, lambda w: [CounterProver(runaway=True, id="runaway")]),
    ]


def _tape_catalog(q: int = 251):
    def pair(make, who):
        def build(w, q=q, seed=0, at_scan=3, target=None, rng=None):
            rng = rng if rng is not None else RandomSource(seed)

            delta = rng.randrange(q) if make is GuessSignatureProver and who == "both" else None

            def one():
                if make is GuessSignatureProver:
                    return GuessSignatureProver(q, rng, target=target, at_scan=at_scan, delta=delta)
                if make is ReplayProver:
                    return ReplayProver(target=target or "last", at_scan=at_scan)
                return make(target=target, at_scan=at_scan)

            p1 = one() if who in ("p1", "both") else TapeProver()
            p2 = one() if who in ("p2", "both") else TapeProver()
            return [p1, p2]
        return build

    out = []
    for name, make in (("flip", FlipSymbolProver), ("guess", GuessSignatureProver), ("replay", ReplayProver)):
        for who in ("p1", "p2", "both"):
            out.append(CheatSpec(f"{name}-{who}", True, pair(make, who), {},
                                 tuple({"at_scan": s} for s in (3, 4, 6))))
    return out


_CATALOGS = {
    "thm2-logspace": _thm2_catalog,
    "thm4-weak": _thm4_catalog,
    "fact3-tape": _tape_catalog,
    "thm5-twoprover": _tape_catalog,
    "thm6-usquare": _thm6_catalog,
    "thm7-upower64": _thm7_catalog,
    "thm8-dima2": _thm8_catalog,
    "thm9-dima2-set": _thm9_catalog,
    "thm10-upower64-set": _thm10_catalog,
}


def cheat_catalog(protocol_id: str) -> list[CheatSpec]:
    if protocol_id not in _CATALOGS:
        return []
    return _CATALOGS[protocol_id]()


def get_cheat(protocol_id: str, cheat_id: str) -> CheatSpec:
    for spec in cheat_catalog(protocol_id):
        if spec.id == cheat_id:
            return spec
    raise ConfigError(f"no cheat {cheat_id!r} for {protocol_id}")


def make_provers(protocol_id: str, w: str, strategy: str = "honest", params: dict | None = None,
                 spec=None) -> list:
    """Prover list for ``strategy`` (``"honest"`` or a catalog id) on input ``w``."""
    if strategy == "honest":
        return honest(protocol_id, w, spec=spec)
    return get_cheat(protocol_id, strategy).make(w, **(params or {}))


# Each cheating behaviour analysed in the soundness arguments, mapped to the
# catalog entries that exercise it.
CHEAT_COVERAGE = {
    "thm6-usquare": {
        "infinite block stream": ["infinite-periodic", "infinite-growing"],
        "block lengths disagree": ["off-by-one", "pad-last-block"],
        "block count does not match the input": ["nearest-member", "next-member", "sum-matching"],
        "certificate not finished": ["truncated"],
        "grammar violation": ["grammar-defect"],
    },
    "thm7-upower64": {
        "infinite block stream": ["infinite-geometric", "infinite-periodic"],
        "first block is not 1": ["wrong-first-block"],
        "sum identity fails": ["nearest-member", "sum-matching"],
        "certificate not finished": ["truncated"],
    },
    "thm8-dima2": {
        "certificate differs from the input": ["mutated-copy", "truncated-copy", "doubled", "nearest-member"],
        "endless certificate": ["infinite-zeros"],
    },
    "thm9-dima2-set": {
        "count differs from 64^k": ["count-short", "count-long"],
        "endless count": ["count-infinite"],
        "malformed count": ["count-malformed"],
        "membership certificate wrong": ["wrong-start-cert"],
    },
    "thm10-upower64-set": {
        "set certificate wrong": ["cert-extra-block", "cert-short-block", "cert-few-blocks"],
        "endless set certificate": ["cert-infinite"],
    },
    "thm2-logspace": {
        "wrong number of a's": ["count-plus-one", "count-minus-one", "count-plus-primorial"],
        "endless a's": ["infinite-a"],
        "wrong head count": ["flip-decision-bit", "truncate-bits"],
        "overlong head count": ["long-bits"],
    },
    "thm4-weak": {
        "counter discrepancy between steps": ["drift", "zero-lie"],
        "infinite transcript": ["infinite-message", "runaway"],
    },
    "fact3-tape": {
        "symbol altered, signature kept": ["flip-p1", "flip-p2", "flip-both"],
        "signature guessed": ["guess-p1", "guess-p2", "guess-both"],
        "stale triple replayed": ["replay-p1", "replay-p2", "replay-both"],
    },
}
CHEAT_COVERAGE["thm5-twoprover"] = CHEAT_COVERAGE["fact3-tape"]


def certificate_text(prover: CertificateProver, query: str = START) -> str:
    """The finite string a certificate prover sends after ``query``."""
    factory = prover.factories.get(query)
    return runs_text(factory()) if factory else ""
