"""Protocol registry, amplification, and one entry point per protocol."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

from ..errors import ArityError, ConfigError
from ..fingerprint import DEFAULT_C
from ..langspace import BITS, UNARY, Alphabet, LanguageSpec
from ..rng import RandomSource
from ..runtime import Outcome, ResourceBudget, Run, execute
from .dima import dima2_body, dima2_set_body
from .logspace import logspace_body
from .recognizers import kary_exponential_body, one_p4ca_body, unary_linear_body
from .tape import DEFAULT_Q, SignedTape, TamperDetected, fact3_body, two_prover_body
from .unary import upower64_body, upower64_set_body, usquare_body
from .weak import DEFAULT_Y, WeakIpsRound, weak_body, weak_round


@dataclass(frozen=True)
class ProtocolInfo:
    id: str
    body: Callable[..., bool]
    n_provers: int
    alphabet: Alphabet | None  # None: alphabet taken from the language parameters
    needs_spec: bool
    perfect_completeness: bool
    defaults: dict = field(default_factory=dict)
    fixed_spec: LanguageSpec | None = None

    def run(self, w: str, *, provers=None, spec: LanguageSpec | None = None,
            budget: ResourceBudget | None = None, rng=0, literal_walk: bool = False, **params) -> Outcome:
        if provers is None:
            from ..provers import honest
            provers = honest(base_id(self.id), w, spec=spec)
        provers = list(provers)
        if len(provers) != self.n_provers:
            raise ArityError(f"{self.id} takes {self.n_provers} prover(s), got {len(provers)}")
        spec = spec or self.fixed_spec
        if self.needs_spec and spec is None:
            raise ConfigError(f"{self.id} needs a language spec")
        alphabet = self.alphabet or (spec.alphabet if spec is not None else None)
        if alphabet is not None:
            alphabet.check(w)
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.id}: {sorted(unknown)}")
        rng = rng if isinstance(rng, RandomSource) else RandomSource(rng)
        return execute(self.body, w, provers=provers, rng=rng, budget=budget, spec=spec,
                       literal_walk=literal_walk, **{**self.defaults, **params})


def _usquare(run: Run) -> bool:
    return usquare_body(run)


def _upower64(run: Run) -> bool:
    return upower64_body(run)


def _dima2(run: Run) -> bool:
    return dima2_body(run)


PROTOCOLS: dict[str, ProtocolInfo] = {
    p.id: p for p in (
        ProtocolInfo("thm1-unary", unary_linear_body, 0, UNARY, True, False),
        ProtocolInfo("cor1-kary", kary_exponential_body, 0, None, True, False),
        ProtocolInfo("thm2-logspace", logspace_body, 1, UNARY, True, False, {"c": DEFAULT_C}),
        ProtocolInfo("thm3-1p4ca", one_p4ca_body, 0, None, True, False, {"stepwise": False}),
        ProtocolInfo("thm4-weak", weak_body, 1, None, True, False, {"y": DEFAULT_Y, "max_rounds": 1000}),
        ProtocolInfo("fact3-tape", fact3_body, 2, None, False, True, {"q": DEFAULT_Q}),
        ProtocolInfo("thm5-twoprover", two_prover_body, 2, None, True, False, {"q": DEFAULT_Q, "batch": None}),
        ProtocolInfo("thm6-usquare", _usquare, 1, UNARY, False, True,
                     fixed_spec=LanguageSpec.builtin("USQUARE")),
        ProtocolInfo("thm7-upower64", _upower64, 1, UNARY, False, True,
                     fixed_spec=LanguageSpec.builtin("UPOWER64")),
        ProtocolInfo("thm8-dima2", _dima2, 1, BITS, False, True, fixed_spec=LanguageSpec.builtin("DIMA2")),
        ProtocolInfo("thm9-dima2-set", dima2_set_body, 1, BITS, True, False, {"repetitions": 3}),
        ProtocolInfo("thm10-upower64-set", upower64_set_body, 1, UNARY, True, False, {"repetitions": 3}),
    )
}


def get_protocol(protocol_id: str) -> ProtocolInfo:
    """Look up an id; ``"<id>^<r>"`` names the ``r``-fold amplification of ``<id>``."""
    base, sep, reps = str(protocol_id).partition("^")
    if base not in PROTOCOLS or (sep and not reps.isdigit()):
        raise ConfigError(f"unknown protocol id {protocol_id!r}")
    return amplify(PROTOCOLS[base], int(reps)) if sep else PROTOCOLS[base]


def base_id(protocol_id: str) -> str:
    return str(protocol_id).partition("^")[0]


def amplify(protocol: str | ProtocolInfo, r: int) -> ProtocolInfo:
    """``r`` independent repetitions on one run: unanimous acceptance for protocols with
    perfect completeness, majority vote otherwise.  Provers restart on every query."""
    base = get_protocol(protocol) if isinstance(protocol, str) else protocol
    if r < 1:
        raise ConfigError("r must be at least 1")
    if r == 1:
        return base

    def body(run: Run, **params) -> bool:
        votes = 0
        for i in range(r):
            run.tape.to_left_end()
            ok = base.body(run, **params)
            votes += ok
            if base.perfect_completeness and not ok:
                return False
            if not base.perfect_completeness and (votes * 2 > r or (i + 1 - votes) * 2 >= r):
                break
        run.details["votes"] = votes
        return votes == r if base.perfect_completeness else votes * 2 > r

    return replace(base, id=f"{base.id}^{r}", body=body)


# --- public wrappers -------------------------------------------------------

def _call(pid, w, prover, spec=None, budget=None, seed=0, **params) -> Outcome:
    info = get_protocol(pid)
    provers = None if prover is None else (list(prover) if isinstance(prover, (list, tuple)) else [prover])
    return info.run(w, provers=provers, spec=spec, budget=budget, rng=seed, **params)


def recognize_unary_linear_space(spec, w, *, budget=None, seed=0) -> Outcome:
    return _call("thm1-unary", w, [], spec, budget, seed)


def recognize_kary_exponential(spec, w, *, budget=None, seed=0) -> Outcome:
    return _call("cor1-kary", w, [], spec, budget, seed)


def verify_unary_logspace(spec, w, prover=None, c: int = DEFAULT_C, *, budget=None, seed=0) -> Outcome:
    return _call("thm2-logspace", w, prover, spec, budget, seed, c=c)


def recognize_1p4ca(spec, w, *, stepwise=False, budget=None, seed=0) -> Outcome:
    return _call("thm3-1p4ca", w, [], spec, budget, seed, stepwise=stepwise)


def weak_verify_sweeping(spec, w, prover=None, y=DEFAULT_Y, mode: str = "sampled", *, budget=None,
                         seed=0, max_rounds: int = 1000):
    """Sampled mode returns an :class:`Outcome`; ``"exact-lottery"`` returns the
    :class:`WeakIpsRound` of one coin path."""
    if mode == "sampled":
        return _call("thm4-weak", w, prover, spec, budget, seed, y=y, max_rounds=max_rounds)
    if mode != "exact-lottery":
        raise ConfigError(f"unknown mode {mode!r}")
    from ..provers import CounterProver
    spec.alphabet.check(w)
    rng = seed if isinstance(seed, RandomSource) else RandomSource(seed)
    run = Run(w, provers=[prover or CounterProver()], rng=rng, budget=budget, spec=spec)
    return weak_round(run, y)


def verify_two_prover(spec, w, prover1=None, prover2=None, q: int = DEFAULT_Q, *, budget=None, seed=0) -> Outcome:
    provers = None if prover1 is None and prover2 is None else [prover1, prover2]
    if provers is not None and None in provers:
        raise ArityError("pass both provers or neither")
    return _call("thm5-twoprover", w, provers, spec, budget, seed, q=q)


def verify_usquare(w, prover=None, *, budget=None, seed=0, literal_walk=False) -> Outcome:
    info = get_protocol("thm6-usquare")
    provers = None if prover is None else [prover]
    return info.run(w, provers=provers, budget=budget, rng=seed, literal_walk=literal_walk)


def verify_upower64(w, prover=None, *, budget=None, seed=0) -> Outcome:
    return _call("thm7-upower64", w, prover, None, budget, seed)


def verify_dima2(w, prover=None, *, budget=None, seed=0) -> Outcome:
    return _call("thm8-dima2", w, prover, None, budget, seed)


def verify_dima2_I(spec, w, prover=None, *, budget=None, seed=0) -> Outcome:
    return _call("thm9-dima2-set", w, prover, spec, budget, seed)


def verify_upower64_I(spec, w, prover=None, *, budget=None, seed=0) -> Outcome:
    return _call("thm10-upower64-set", w, prover, spec, budget, seed)


def signed_tape_store(provers, cells, q: int = DEFAULT_Q, rng=0, alphabet_size: int | None = None) -> SignedTape:
    rng = rng if isinstance(rng, RandomSource) else RandomSource(rng)
    tape = SignedTape(provers, q, rng, alphabet_size=alphabet_size or max(cells, default=0) + 1)
    tape.store(cells)
    return tape


def signed_tape_read(tape: SignedTape) -> list[int]:
    return tape.read()


def signed_tape_update(tape: SignedTape, transform) -> list[int]:
    return tape.scan_update(transform)


__all__ = [
    "PROTOCOLS", "ProtocolInfo", "get_protocol", "base_id", "amplify", "TamperDetected", "WeakIpsRound",
    "recognize_unary_linear_space", "recognize_kary_exponential", "verify_unary_logspace",
    "recognize_1p4ca", "weak_verify_sweeping", "verify_two_prover", "verify_usquare",
    "verify_upower64", "verify_dima2", "verify_dima2_I", "verify_upower64_I",
    "signed_tape_store", "signed_tape_read", "signed_tape_update",
]
