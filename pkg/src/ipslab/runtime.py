"""Execution substrate for verifiers: tapes, channels, metering and random walks.

Protocols are ordinary Python procedures over a :class:`Run`.  The meter keeps
the observables of the automaton model (steps, work cells, prover symbols,
head reversals) and raises :class:`BudgetExhausted` when a cap is hit, which
the executor turns into a ``timeout`` outcome.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Sequence

import numpy as np

from .coins import BiasedCoin, ProbBitStream
from .errors import BudgetError, InputDomainError
from .langspace import LEFT_END, RIGHT_END, Alphabet, LanguageSpec
from .rng import RandomSource

# Query symbols the verifier writes to ask for a particular certificate.
START = "^"
ASK_COUNT = "&"
ASK_CERT = "@"
ASK_BITS = "%"


class Decision(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class ResourceBudget:
    max_steps: int = 10**10
    max_prover_symbols: int = 10**10
    max_work_cells: int = 10**6
    max_tosses: int = 2**26

    def __post_init__(self):
        for name, value in asdict(self).items():
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise InputDomainError(f"{name} must be a positive integer, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ResourceBudget":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputDomainError(f"unknown budget fields {sorted(unknown)}")
        return cls(**data)


class BudgetExhausted(BudgetError):
    def __init__(self, resource: str, limit: int):
        super().__init__(f"{resource} budget of {limit} exhausted")
        self.resource = resource


class Meter:
    __slots__ = ("budget", "steps", "prover_symbols", "tosses")

    def __init__(self, budget: ResourceBudget):
        self.budget = budget
        self.steps = 0
        self.prover_symbols = 0
        self.tosses = 0

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget.max_steps:
            raise BudgetExhausted("steps", self.budget.max_steps)

    def symbols(self, n: int = 1) -> None:
        self.prover_symbols += n
        if self.prover_symbols > self.budget.max_prover_symbols:
            raise BudgetExhausted("prover symbols", self.budget.max_prover_symbols)

    def tossed(self, n: int = 1) -> None:
        self.tosses += n
        if self.tosses > self.budget.max_tosses:
            raise BudgetExhausted("tosses", self.budget.max_tosses)


class InputTape:
    """Read-only ``¢ w $`` with a head in ``[0, n+1]`` and reversal bookkeeping."""

    def __init__(self, w: str, meter: Meter):
        self.w = w
        self.n = len(w)
        self.meter = meter
        self.pos = 0
        self.direction = 0
        self.sweeping_ok = True
        self.one_way_ok = True

    def symbol(self) -> str:
        if self.pos == 0:
            return LEFT_END
        if self.pos == self.n + 1:
            return RIGHT_END
        return self.w[self.pos - 1]

    def _turn(self, d: int) -> None:
        if d < 0:
            self.one_way_ok = False
        if self.direction and d != self.direction and 0 < self.pos <= self.n:
            self.sweeping_ok = False
        self.direction = d

    def move_by(self, k: int) -> int:
        """Move ``|k|`` cells (stopping at a marker); returns the cells actually moved."""
        if k == 0:
            return 0
        d = 1 if k > 0 else -1
        target = min(max(self.pos + k, 0), self.n + 1)
        moved = abs(target - self.pos)
        if moved:
            self._turn(d)
            self.meter.tick(moved)
            self.pos = target
        return moved

    def to_left_end(self) -> int:
        return self.move_by(-self.pos)

    def to_right_end(self) -> int:
        return self.move_by(self.n + 1 - self.pos)

    def apply_walk(self, walk: "WalkResult") -> None:
        """Account for a random walk started one cell right of ``¢``."""
        self.move_by(1 - self.pos)
        if walk.first_step < 0 and self.direction > 0:
            self.sweeping_ok = False
        if walk.turned:
            self.sweeping_ok = False
        if walk.first_step < 0 or walk.turned:
            self.one_way_ok = False
        self.meter.tick(walk.steps)
        if walk.right:
            self.pos = self.n + 1
            self.meter.tick(1 if walk.barrier <= self.n else 0)
            self.direction = 1
        else:
            self.pos = 0
            self.direction = -1


class Register:
    """Binary counter laid out on consecutive work-tape cells."""

    __slots__ = ("name", "width", "_value", "high_water", "_tape")

    def __init__(self, tape: "WorkTape", name: str, width: int):
        self.name = name
        self.width = width
        self._value = 0
        self.high_water = 0
        self._tape = tape

    @property
    def value(self) -> int:
        return self._value

    @value.setter
    def value(self, v: int) -> None:
        if v < 0 or v.bit_length() > self.width:
            raise OverflowError(f"register {self.name} holds {self.width} bits, got {v}")
        self._value = v
        used = max(1, v.bit_length())
        if used > self.high_water:
            self._tape._grow(used - self.high_water)
            self.high_water = used


class WorkTape:
    def __init__(self, meter: Meter):
        self.meter = meter
        self.registers: dict[str, Register] = {}
        self.visited_cells = 0

    def register(self, name: str, width: int) -> Register:
        reg = self.registers.get(name)
        if reg is None:
            reg = self.registers[name] = Register(self, name, width)
        return reg

    def _grow(self, cells: int) -> None:
        self.visited_cells += cells
        if self.visited_cells > self.meter.budget.max_work_cells:
            raise BudgetExhausted("work cells", self.meter.budget.max_work_cells)


@dataclass
class CommCell:
    channel_id: int
    last_sent: str | None = None
    last_received: str | None = None
    rounds: int = 0


class Channel:
    """Verifier side of the single-symbol link to one prover.

    ``ask`` writes a query symbol; ``recv``/``peek``/``take_run`` read prover
    symbols with one symbol of lookahead.  ``take_run`` lets a prover hand over
    a long run of one symbol in bulk, which is equivalent to reading it one
    symbol per round.
    """

    def __init__(self, prover, meter: Meter, channel_id: int = 1):
        self.prover = prover
        self.meter = meter
        self.cell = CommCell(channel_id)
        self._pending: str | None = None
        self._has_pending = False

    def ask(self, query: str) -> None:
        self._has_pending = False
        self.cell.last_sent = query
        self.cell.rounds += 1
        self.prover.receive(query)

    def send_many(self, symbols) -> None:
        self.cell.rounds += len(symbols)
        self.prover.receive_many(symbols)

    def _fetch(self) -> str | None:
        s = self.prover.emit()
        if s is not None:
            self.meter.symbols(1)
        self.cell.last_received = s
        return s

    def recv(self) -> str | None:
        if self._has_pending:
            self._has_pending = False
            return self._pending
        return self._fetch()

    def peek(self) -> str | None:
        if not self._has_pending:
            self._pending = self._fetch()
            self._has_pending = True
        return self._pending

    def take_run(self, symbol: str, limit: int) -> int:
        """Consume up to ``limit`` consecutive copies of ``symbol``."""
        count = 0
        while count < limit:
            if self._has_pending:
                if self._pending != symbol:
                    break
                self._has_pending = False
                count += 1
                continue
            got = self.prover.emit_run(symbol, limit - count)
            if got:
                self.meter.symbols(got)
                count += got
                continue
            self.peek()
            if self._pending is None:
                break
        return count


@dataclass
class Outcome:
    decision: Decision
    steps: int
    work_cells: int
    prover_symbols: int
    sweeping_ok: bool
    one_way_ok: bool = True
    details: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.decision is Decision.ACCEPT

    @property
    def rejected(self) -> bool:
        return self.decision is Decision.REJECT

    def to_dict(self) -> dict:
        return {"decision": self.decision.value, "steps": self.steps, "work_cells": self.work_cells,
                "prover_symbols": self.prover_symbols, "sweeping_ok": self.sweeping_ok}


def meter_assert_sweeping(outcome: Outcome) -> bool:
    return outcome.sweeping_ok


@dataclass(frozen=True)
class WalkResult:
    right: bool
    steps: int
    first_step: int
    turned: bool
    barrier: int


def random_walk(n: int, rng: RandomSource, pause_hook: Callable[[int], Any] | None = None, *,
                literal: bool = False, max_steps: int | None = None) -> WalkResult:
    """Unbiased +-1 walk from cell 1 until it hits cell 0 or the right barrier.

    The right barrier is cell ``n`` (probability ``1/n`` of ending there), or
    cell ``n+1`` with ``literal=True`` (probability ``1/(n+1)``).  ``steps``
    counts the +-1 moves only.  ``pause_hook`` is called with the position after
    every move.
    """
    if n < 2:
        raise InputDomainError("random walks need n >= 2")
    barrier = n + 1 if literal else n
    pos, steps, prev, first, turned = 1, 0, 0, 0, False
    chunk = max(64, 4 * barrier)
    while True:
        moves = rng.bits_array(chunk).astype(np.int64) * 2 - 1
        path = pos + np.cumsum(moves)
        hits = np.flatnonzero((path <= 0) | (path >= barrier))
        end = int(hits[0]) + 1 if hits.size else chunk
        seg = moves[:end]
        if not first:
            first = int(seg[0])
        if not turned:
            turned = (prev != 0 and seg[0] != prev) or bool(np.any(seg[1:] != seg[:-1]))
        if pause_hook is not None:
            for p in path[:end]:
                pause_hook(int(p))
        steps += end
        if max_steps is not None and steps > max_steps:
            raise BudgetExhausted("steps", max_steps)
        if hits.size:
            return WalkResult(bool(path[end - 1] >= barrier), steps, first, turned, barrier)
        pos, prev = int(path[-1]), int(seg[-1])
        chunk = min(chunk * 2, 1 << 22)


class Run:
    """Everything one verifier execution touches."""

    def __init__(self, w: str, *, provers: Sequence = (), rng: RandomSource,
                 budget: ResourceBudget | None = None, spec: LanguageSpec | None = None,
                 literal_walk: bool = False):
        self.budget = budget or ResourceBudget()
        self.meter = Meter(self.budget)
        self.tape = InputTape(w, self.meter)
        self.work = WorkTape(self.meter)
        self.rng = rng
        self.spec = spec
        self.literal_walk = literal_walk
        self.channels = [Channel(p, self.meter, i + 1) for i, p in enumerate(provers)]
        self.details: dict = {}
        self._coin: BiasedCoin | None = None

    @property
    def n(self) -> int:
        return self.tape.n

    def channel(self, i: int = 0) -> Channel:
        return self.channels[i]

    @property
    def coin(self) -> BiasedCoin:
        if self._coin is None:
            if self.spec is None:
                raise InputDomainError("this protocol needs a language spec for its coin")
            self._coin = BiasedCoin(ProbBitStream(self.spec), self.rng)
        return self._coin

    def toss_flags(self, count: int) -> np.ndarray:
        self.meter.tossed(count)
        return self.coin.toss_flags(count)

    def walk(self) -> WalkResult:
        remaining = self.budget.max_steps - self.meter.steps
        result = random_walk(self.n, self.rng, literal=self.literal_walk, max_steps=remaining)
        self.tape.apply_walk(result)
        return result

    def outcome(self, decision: Decision) -> Outcome:
        return Outcome(decision, self.meter.steps, self.work.visited_cells, self.meter.prover_symbols,
                       self.tape.sweeping_ok, self.tape.one_way_ok, self.details)


def execute(body: Callable[..., bool], w: str, *, provers: Sequence = (), rng: RandomSource,
            budget: ResourceBudget | None = None, spec: LanguageSpec | None = None,
            literal_walk: bool = False, **params) -> Outcome:
    """Run ``body(run, **params)`` and map its boolean (or a budget stop) to an Outcome."""
    run = Run(w, provers=provers, rng=rng, budget=budget, spec=spec, literal_walk=literal_walk)
    try:
        decision = Decision.ACCEPT if body(run, **params) else Decision.REJECT
    except BudgetExhausted as exc:
        run.details["exhausted"] = exc.resource
        decision = Decision.TIMEOUT
    return run.outcome(decision)


def run_protocol(protocol_id: str, w: str, provers: Sequence = (), spec: LanguageSpec | None = None,
                 budget: ResourceBudget | None = None, seed=0, **params) -> Outcome:
    """Uniform entry point; see :mod:`ipslab.protocols` for the registry."""
    from .protocols import get_protocol

    info = get_protocol(protocol_id)
    rng = seed if isinstance(seed, RandomSource) else RandomSource(seed)
    return info.run(w, provers=list(provers), spec=spec, budget=budget, rng=rng, **params)
