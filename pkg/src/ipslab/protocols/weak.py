"""Sweeping verifier that runs the four-counter machine while a prover stores the counters.

Each step the prover reports ``a^s1 b^s2 c^s3 d^s4 e`` and the verifier answers
with the deltas ``f1 f2 f3 f4`` (``+``, ``0``, ``-``).  Consistency between
consecutive reports is judged by two lotteries whose probabilities are products
of powers of ``y``; those are kept exactly as ``coef * y**exp``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import InputDomainError
from ..runtime import START, BudgetExhausted, Run
from .recognizers import counter_program

DELTA_SYMBOLS = {1: "+", 0: "0", -1: "-"}
SYMBOL_DELTAS = {v: k for k, v in DELTA_SYMBOLS.items()}
COUNTER_SYMBOLS = ("a", "b", "c", "d")
END = "e"
DEFAULT_Y = Fraction(1, 4)


@dataclass(frozen=True)
class YPower:
    """The exact number ``coef * y**exp``."""

    coef: Fraction = Fraction(1)
    exp: int = 0

    def __mul__(self, other: "YPower") -> "YPower":
        return YPower(self.coef * other.coef, self.exp + other.exp)

    def value(self, y: Fraction) -> Fraction:
        return self.coef * Fraction(y) ** self.exp

    def ratio(self, other: "YPower", y: Fraction) -> Fraction:
        """``self / other`` exactly."""
        return self.coef / other.coef * Fraction(y) ** (self.exp - other.exp)


def _sum_ratio(num: list[YPower], den: list[YPower], y: Fraction) -> Fraction:
    """``sum(num) / sum(den)`` without materialising the tiny common factor."""
    terms = [t for t in num + den if t.coef]
    if not terms:
        raise ZeroDivisionError("all terms vanish")
    base = min(t.exp for t in terms)
    y = Fraction(y)

    def scaled(ts):
        return sum((t.coef * y ** (t.exp - base) for t in ts if t.coef), Fraction(0))

    return scaled(num) / scaled(den)


@dataclass
class WeakIpsRound:
    """One simulated pass of the machine with the prover's transcript judged exactly.

    ``outcome`` is ``"lottery"`` for a completed transcript, otherwise the
    reason for a deterministic rejection (``"grammar"``, ``"negative"``).
    """

    y: Fraction
    g: int = 0
    pr_a_parts: list = field(default_factory=lambda: [YPower() for _ in range(4)])
    pr_r_parts: list = field(default_factory=lambda: [YPower() for _ in range(4)])
    x_prime: int | None = None
    outcome: str = "lottery"
    discrepancies: list = field(default_factory=list)

    @property
    def pr_a(self) -> YPower:
        out = YPower()
        for p in self.pr_a_parts:
            out = out * p
        return out

    @property
    def pr_r(self) -> YPower:
        out = YPower()
        for p in self.pr_r_parts:
            out = out * p
        return out

    @property
    def accept_weight(self) -> YPower:
        if self.outcome != "lottery" or self.x_prime != 1:
            return YPower(Fraction(0))
        return self.pr_a

    def reject_terms(self) -> list[YPower]:
        if self.outcome != "lottery":
            return [YPower()]
        terms = [YPower(self.y) * self.pr_r]
        if self.x_prime == 0:
            terms.append(self.pr_a)
        return terms

    def reject_ratio(self) -> Fraction:
        """``PrR / PrA`` exactly (only meaningful for completed transcripts)."""
        return self.pr_r.ratio(self.pr_a, self.y)

    def conditional_accept(self) -> Fraction:
        """Probability this path ends in acceptance given that it ends in a decision."""
        acc = self.accept_weight
        return _sum_ratio([acc], [acc] + self.reject_terms(), self.y)


def _read_report(run: Run, ch) -> list[int] | None:
    """Parse ``a^s1 b^s2 c^s3 d^s4 e``; None on a grammar violation."""
    counts = []
    for sym in COUNTER_SYMBOLS:
        left = run.budget.max_prover_symbols - run.meter.prover_symbols + 1
        counts.append(ch.take_run(sym, left))
    if ch.recv() != END:
        return None
    run.meter.tick(sum(counts) + 1)
    return counts


def _judge(rnd: WeakIpsRound, prev: list[int], f: tuple, cur: list[int]) -> bool:
    """Fold one comparison step into the lotteries; False if some ``s' - f`` is negative."""
    y = rnd.y
    for j in range(4):
        s, b = prev[j], cur[j] - f[j]
        if b < 0:
            return False
        a_part, r_part = rnd.pr_a_parts[j], rnd.pr_r_parts[j]
        rnd.pr_a_parts[j] = YPower(a_part.coef, a_part.exp + 2 * s + 2 * b)
        if s == b:
            rnd.pr_r_parts[j] = YPower(r_part.coef, r_part.exp + 4 * s)
        else:
            lo, gap = min(s, b), abs(s - b)
            rnd.pr_r_parts[j] = YPower(r_part.coef * (1 + y ** (4 * gap)) / 2, r_part.exp + 4 * lo)
            rnd.discrepancies.append((rnd.g, j + 1, s, b))
    return True


def weak_round(run: Run, y: Fraction = DEFAULT_Y) -> WeakIpsRound:
    """Simulate the machine once (one coin path) against the prover on channel 0."""
    y = Fraction(y)
    if not 0 < y < Fraction(1, 2):
        raise InputDomainError("y must lie in (0, 1/2)")
    rnd = WeakIpsRound(y)
    w = run.tape.w
    run.tape.to_left_end()
    if not w:
        run.tape.to_right_end()
        rnd.x_prime = run.spec.bit(1)
        return rnd
    ch = run.channel(0)
    ch.ask(START)
    coin = run.coin

    def toss() -> bool:
        run.meter.tossed()
        return coin.next_toss()

    program = counter_program(run.spec.alphabet, w, toss)
    next(program)
    run.tape.move_by(1)
    prev = prev_f = None
    while True:
        report = _read_report(run, ch)
        if report is None:
            rnd.outcome = "grammar"
            return rnd
        rnd.g += 1
        if prev is not None and not _judge(rnd, prev, prev_f, report):
            rnd.outcome = "negative"
            return rnd
        act = program.send(tuple(c == 0 for c in report))
        if act.halt is not None:
            rnd.x_prime = act.halt
            run.meter.tick()
            run.tape.to_right_end()
            return rnd
        ch.send_many([DELTA_SYMBOLS[d] for d in act.f])
        if act.move:
            run.tape.move_by(1)
        else:
            run.meter.tick()
        prev, prev_f = report, act.f


def _bernoulli_ypower(run: Run, p: YPower, y: Fraction) -> bool:
    """Exact draw with probability ``coef * y**exp``: ``exp`` Bernoulli(y) draws, stopping at
    the first failure."""
    if not run.rng.bernoulli(p.coef.numerator, p.coef.denominator):
        return False
    for _ in range(p.exp):
        run.meter.tick()
        if not run.rng.bernoulli(y.numerator, y.denominator):
            return False
    return True


def weak_body(run: Run, y: Fraction = DEFAULT_Y, max_rounds: int = 1000) -> bool:
    """Sampled mode: play the lotteries for real, restarting while no decision is reached."""
    y = Fraction(y)
    for r in range(max_rounds):
        rnd = weak_round(run, y)
        run.details["rounds"] = r + 1
        if rnd.outcome != "lottery":
            run.details["reason"] = rnd.outcome
            return False
        says_a = says_r = True
        for j in range(4):
            if run.rng.bit():
                says_a = says_a and _bernoulli_ypower(run, rnd.pr_a_parts[j], y)
                says_r = False
            else:
                says_r = says_r and _bernoulli_ypower(run, rnd.pr_r_parts[j], y)
                says_a = False
        if says_a:
            run.details["x_prime"] = rnd.x_prime
            return rnd.x_prime == 1
        if says_r and run.rng.bernoulli(y.numerator, y.denominator):
            run.details["reason"] = "negative decision"
            return False
        run.tape.to_left_end()
    raise BudgetExhausted("rounds", max_rounds)
