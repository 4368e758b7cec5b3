"""Trial execution, interval estimates, scaling fits and exact small-instance oracles."""
from __future__ import annotations

import csv
import io
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .errors import ConfigError, InputDomainError
from .langspace import LanguageSpec, dima2_member
from .provers import get_cheat, make_provers
from .protocols import base_id, get_protocol, weak_verify_sweeping
from .rng import RandomSource, seed_sequence
from .runtime import Decision, ResourceBudget

DEFAULT_CONFIDENCE = 0.95
SLACK_CONFIDENCE = 0.99


# --- inputs ----------------------------------------------------------------

def _gen_usquare(m: int) -> str:
    return "a" * (m * m)


def _gen_upower64(m: int) -> str:
    return "a" * 64**m


def _gen_unary(n: int) -> str:
    return "a" * n


def _gen_dima2_mutant(k: int, pos: int) -> str:
    w = dima2_member(k)
    pos %= len(w)
    return w[:pos] + ("1" if w[pos] == "0" else "0") + w[pos + 1:]


GENERATORS = {
    "usquare-member": _gen_usquare,
    "upower64-member": _gen_upower64,
    "dima2-member": dima2_member,
    "dima2-mutant": _gen_dima2_mutant,
    "unary": _gen_unary,
}
_GEN_RE = re.compile(r"^([a-z0-9-]+)\(([0-9,\s]*)\)$")


def expand_input(spec) -> str:
    """A literal string, ``{"literal": s}``, or a generator call like ``"dima2-member(1)"``."""
    if isinstance(spec, dict):
        if set(spec) != {"literal"} or not isinstance(spec["literal"], str):
            raise ConfigError(f"bad input object {spec!r}")
        return spec["literal"]
    if not isinstance(spec, str):
        raise ConfigError(f"input must be a string, got {spec!r}")
    m = _GEN_RE.match(spec)
    if m and m.group(1) in GENERATORS:
        args = [int(a) for a in m.group(2).split(",") if a.strip()]
        try:
            return GENERATORS[m.group(1)](*args)
        except TypeError as exc:
            raise ConfigError(f"bad arguments for {m.group(1)}: {exc}") from None
    return spec


# --- scenarios and trials --------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    protocol: str
    w: str
    spec: LanguageSpec | None = None
    strategy: str = "honest"
    strategy_params: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    budget: ResourceBudget | None = None
    literal_walk: bool = False
    name: str = ""

    def __post_init__(self):
        info = get_protocol(self.protocol)
        if self.strategy != "honest":
            get_cheat(base_id(self.protocol), self.strategy)
        unknown = set(self.params) - set(info.defaults)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.protocol}: {sorted(unknown)}")
        if info.needs_spec and self.spec is None:
            raise ConfigError(f"{self.protocol} needs a language spec")

    def label(self) -> str:
        return self.name or f"{self.protocol}/{self.strategy}/n={len(self.w)}"

    def to_dict(self) -> dict:
        return {
            "name": self.label(), "protocol": self.protocol, "n": len(self.w),
            "spec": self.spec.to_dict() if self.spec else None, "strategy": self.strategy,
            "strategy_params": self.strategy_params, "params": {k: str(v) if isinstance(v, Fraction) else v
                                                                for k, v in self.params.items()},
            "budget": self.budget.to_dict() if self.budget else None, "literal_walk": self.literal_walk,
        }


def _prover_seed(seed: int, i: int) -> int:
    return int(seed_sequence(seed, i, 1).generate_state(1, dtype=np.uint64)[0])


def _needs_seed(scenario: Scenario) -> bool:
    if scenario.strategy == "honest":
        return False
    import inspect
    build = get_cheat(base_id(scenario.protocol), scenario.strategy).build
    return "seed" in inspect.signature(build).parameters


def run_scenario(scenario: Scenario, seed: int, i: int):
    """Trial ``i``: verifier coins from spawn key ``(i, 0)``, prover randomness from ``(i, 1)``."""
    extra = dict(scenario.strategy_params)
    if _needs_seed(scenario):
        extra.setdefault("seed", _prover_seed(seed, i))
    provers = make_provers(base_id(scenario.protocol), scenario.w, scenario.strategy, extra, spec=scenario.spec)
    info = get_protocol(scenario.protocol)
    return info.run(scenario.w, provers=provers, spec=scenario.spec, budget=scenario.budget,
                    rng=RandomSource(seed_sequence(seed, i, 0)), literal_walk=scenario.literal_walk,
                    **scenario.params)


def wilson_interval(successes: int, trials: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple[float, float]:
    if trials < 0 or not 0 <= successes <= trials:
        raise InputDomainError("need 0 <= successes <= trials")
    if not 0 < confidence < 1:
        raise InputDomainError("confidence must lie in (0, 1)")
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def ci_slack(successes: int, trials: int, confidence: float = SLACK_CONFIDENCE) -> float:
    """Half-width of the Wilson interval, the tolerance applied to every bound."""
    lo, hi = wilson_interval(successes, trials, confidence)
    return (hi - lo) / 2


@dataclass
class TrialStats:
    trials: int
    accepts: int
    rejects: int
    timeouts: int
    mean_steps: float
    p50_steps: float
    p90_steps: float
    max_steps: int
    max_work_cells: int
    mean_prover_symbols: float
    sweeping_violations: int
    accept_ci: tuple[float, float]
    reject_ci: tuple[float, float]
    confidence: float
    seed: int
    detail_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.accepts + self.rejects + self.timeouts != self.trials:
            raise InputDomainError("accepts + rejects + timeouts must equal trials")

    @property
    def decided(self) -> int:
        return self.accepts + self.rejects

    @property
    def accept_rate(self) -> float:
        return self.accepts / self.decided if self.decided else float("nan")

    @property
    def reject_rate(self) -> float:
        return self.rejects / self.decided if self.decided else float("nan")

    def slack(self, confidence: float = SLACK_CONFIDENCE) -> float:
        return ci_slack(self.accepts, self.decided, confidence)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["accept_ci"] = list(self.accept_ci)
        out["reject_ci"] = list(self.reject_ci)
        out["accept_rate"] = self.accept_rate
        out["reject_rate"] = self.reject_rate
        return out


@dataclass
class _Partial:
    decisions: list
    steps: list
    work: int = 0
    symbols: int = 0
    sweep_bad: int = 0
    details: dict = field(default_factory=dict)


def _run_range(scenario: Scenario, seed: int, lo: int, hi: int) -> _Partial:
    part = _Partial([], [])
    for i in range(lo, hi):
        out = run_scenario(scenario, seed, i)
        part.decisions.append(out.decision.value)
        part.steps.append(out.steps)
        part.work = max(part.work, out.work_cells)
        part.symbols += out.prover_symbols
        part.sweep_bad += not out.sweeping_ok
        for key in out.details:
            part.details[key] = part.details.get(key, 0) + 1
    return part


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(n / parts))
    return [(lo, min(n, lo + size)) for lo in range(0, n, size)]


def run_trials(protocol, w: str | None = None, strategy: str = "honest", N: int = 1, seed: int = 0, *,
               spec: LanguageSpec | None = None, params: dict | None = None, strategy_params: dict | None = None,
               budget: ResourceBudget | None = None, workers: int = 1, confidence: float = DEFAULT_CONFIDENCE,
               literal_walk: bool = False) -> TrialStats:
    """``N`` independent runs; ``protocol`` may be a :class:`Scenario` (then ``w`` etc. are ignored)."""
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ConfigError("N must be a positive integer")
    if isinstance(protocol, Scenario):
        scenario = protocol
    else:
        if w is None:
            raise ConfigError("an input string is required")
        scenario = Scenario(protocol, w, spec, strategy, strategy_params or {}, params or {}, budget, literal_walk)
    ranges = _chunks(N, max(1, workers) * 4 if workers > 1 else 1)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_range, *zip(*[(scenario, seed, lo, hi) for lo, hi in ranges])))
    else:
        parts = [_run_range(scenario, seed, lo, hi) for lo, hi in ranges]
    decisions = [d for p in parts for d in p.decisions]
    steps = np.array([s for p in parts for s in p.steps], dtype=np.float64)
    accepts = decisions.count(Decision.ACCEPT.value)
    rejects = decisions.count(Decision.REJECT.value)
    decided = accepts + rejects
    return TrialStats(
        trials=N, accepts=accepts, rejects=rejects, timeouts=N - decided,
        mean_steps=float(steps.mean()), p50_steps=float(np.percentile(steps, 50)),
        p90_steps=float(np.percentile(steps, 90)), max_steps=int(steps.max()),
        max_work_cells=max(p.work for p in parts), mean_prover_symbols=sum(p.symbols for p in parts) / N,
        sweeping_violations=sum(p.sweep_bad for p in parts),
        accept_ci=wilson_interval(accepts, decided, confidence),
        reject_ci=wilson_interval(rejects, decided, confidence),
        confidence=confidence, seed=seed,
        detail_counts={k: sum(p.details.get(k, 0) for p in parts)
                       for k in sorted({k for p in parts for k in p.details})},
    )


# --- exact acceptance of USQUARE against a finite certificate ---------------

def _parse_certificate(y: str) -> list[int] | None:
    """Blocks ``m1..mt`` of a closed certificate ``a^{m1} b ... a^{mt} b b``; None if no
    closing ``bb`` is reached (everything after it is never read)."""
    blocks, i = [], 0
    while True:
        j = i
        while j < len(y) and y[j] == "a":
            j += 1
        if j >= len(y) or y[j] != "b":
            return None
        blocks.append(j - i)
        if j + 1 < len(y) and y[j + 1] == "b":
            return blocks
        i = j + 1


def _pairs_acceptance(n: int, blocks: list[int], escape: Fraction) -> Fraction:
    """Compare consecutive pairs; after each equal pair that is not the last, escape
    with probability ``escape`` and accept iff fewer than ``n`` a's remain."""
    prob, reach = Fraction(0), Fraction(1)
    j = 0
    while True:
        first = blocks[j]
        if first == 0 or first > n:
            return prob
        if j + 1 == len(blocks):
            return prob + reach
        if blocks[j + 1] != first:
            return prob
        if j + 2 == len(blocks):
            return prob + reach
        rest = sum(blocks[j + 2:])
        prob += reach * escape * (rest < n)
        reach *= 1 - escape
        j += 2


def exact_usquare_acceptance(n: int, y: str, literal_walk: bool = False) -> Fraction:
    """Probability that the USQUARE verifier accepts ``a^n`` against the fixed prover string ``y``."""
    if n < 0:
        raise InputDomainError("n must be nonnegative")
    if n <= 3:
        return Fraction(int(n == 1))
    blocks = _parse_certificate(y)
    if blocks is None or blocks[0] == 0:
        return Fraction(0)
    escape = Fraction(1, n + 1 if literal_walk else n)
    p1 = Fraction(int(sum(blocks) == n and len(blocks) >= 2))
    p2 = Fraction(int(blocks[0] <= n and 1 + sum(m + 1 for m in blocks[1:]) == n))
    p3 = _pairs_acceptance(n, blocks, escape)
    p4 = Fraction(0) if blocks[0] > n or len(blocks) == 1 else _pairs_acceptance(n, blocks[1:], escape)
    return (p1 + p2 + p3 + p4) / 4


# --- scaling ----------------------------------------------------------------

@dataclass
class ScalingResult:
    sizes: list[int]
    mean_steps: list[float]
    exponent: float
    intercept: float

    def to_dict(self) -> dict:
        return asdict(self)


def fit_power_law(sizes, values) -> tuple[float, float]:
    """Least-squares slope and intercept of ``log(values)`` against ``log(sizes)``."""
    x, y = np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def scaling_probe(protocol: str, inputs, strategy: str = "honest", N: int = 20, seed: int = 0, *,
                  spec=None, params=None, strategy_params=None, budget=None, workers: int = 1) -> ScalingResult:
    inputs = list(inputs)
    if len(inputs) < 3:
        raise ConfigError("scaling needs at least three sizes")
    sizes, means = [], []
    for w in inputs:
        st = run_trials(protocol, w, strategy, N, seed, spec=spec, params=params,
                        strategy_params=strategy_params, budget=budget, workers=workers)
        sizes.append(len(w))
        means.append(st.mean_steps)
    slope, intercept = fit_power_law(sizes, means)
    return ScalingResult(sizes, means, slope, intercept)


# --- weak IPS ----------------------------------------------------------------

@dataclass
class WeakEstimate:
    paths: int
    accept: float
    reject: float
    half_width: float
    timeouts: int = 0
    rounds: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {"paths": self.paths, "accept": self.accept, "reject": self.reject,
                "half_width": self.half_width, "timeouts": self.timeouts}


WEAK_BUDGET = ResourceBudget(max_steps=10**8)


def weak_ips_estimator(spec: LanguageSpec, w: str, prover=None, y=Fraction(1, 4), paths: int = 100,
                       seed: int = 0, confidence: float = SLACK_CONFIDENCE,
                       budget: ResourceBudget = WEAK_BUDGET) -> WeakEstimate:
    """Average over ``paths`` sampled coin paths of the exact conditional acceptance
    ``a/(a+r)`` of each path.  ``prover`` is a zero-argument factory (fresh state per path).
    Paths that exhaust ``budget`` never reach a decision; they are counted, not averaged."""
    from .runtime import BudgetExhausted

    if paths < 1:
        raise ConfigError("paths must be positive")
    values, rounds, timeouts = [], [], 0
    for i in range(paths):
        try:
            rnd = weak_verify_sweeping(spec, w, prover() if prover else None, y, mode="exact-lottery",
                                       seed=RandomSource(seed_sequence(seed, i, 0)), budget=budget)
        except BudgetExhausted:
            timeouts += 1
            continue
        rounds.append(rnd)
        values.append(float(rnd.conditional_accept()))
    if not values:
        return WeakEstimate(paths, float("nan"), float("nan"), float("inf"), timeouts, rounds)
    arr = np.array(values)
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    half = z * float(arr.std(ddof=1)) / math.sqrt(arr.size) if arr.size > 1 else 1.0
    mean = float(arr.mean())
    return WeakEstimate(paths, mean, 1 - mean, half, timeouts, rounds)


# --- reports -----------------------------------------------------------------

CSV_FIELDS = ("name", "protocol", "strategy", "n", "trials", "accepts", "rejects", "timeouts",
              "accept_rate", "accept_lo", "accept_hi", "mean_steps", "max_work_cells", "seed")


def report_line(scenario: Scenario, stats: TrialStats) -> str:
    return json.dumps({"scenario": scenario.to_dict(), "stats": stats.to_dict()}, sort_keys=True)


def csv_summary(rows: list[tuple[Scenario, TrialStats]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(CSV_FIELDS)
    for sc, st in rows:
        writer.writerow([sc.label(), sc.protocol, sc.strategy, len(sc.w), st.trials, st.accepts, st.rejects,
                         st.timeouts, f"{st.accept_rate:.6f}", f"{st.accept_ci[0]:.6f}", f"{st.accept_ci[1]:.6f}",
                         f"{st.mean_steps:.3f}", st.max_work_cells, st.seed])
    return buf.getvalue()


def exact_tape_detection(strategy: str, w: str, q: int = 5, alphabet=None) -> Fraction:
    """Exact probability that the signed-tape store/update/read cycle flags ``strategy``,
    enumerating every draw of the verifier and of a guessing prover."""
    from .protocols.tape import exact_probability, fact3_body
    from .runtime import Run

    cheat = get_cheat("fact3-tape", strategy)
    spec = LanguageSpec.finite([], alphabet) if alphabet is not None else None

    def experiment(factory) -> bool:
        src = factory()
        run = Run(w, provers=cheat.make(w, q=q, rng=src), rng=src, spec=spec)
        fact3_body(run, q)
        return "cheater" in run.details

    return exact_probability(experiment, q)
