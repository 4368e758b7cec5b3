"""Ordered alphabets, length-lexicographic ranks and finitely described languages.

Strings are enumerated shortest first, ties broken by symbol order, so the
empty string has rank 1.  A language ``L`` (or an index set ``I``) is carried
by its membership bits ``x_i``: ``x_i = 1`` iff the rank-``i`` string is in it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterable

from .errors import InputDomainError

LEFT_END = "¢"
RIGHT_END = "$"
BLANK = "#"
MARKERS = frozenset({LEFT_END, RIGHT_END, BLANK})


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        syms = tuple(self.symbols)
        if not syms:
            raise InputDomainError("an alphabet needs at least one symbol")
        for s in syms:
            if not isinstance(s, str) or len(s) != 1:
                raise InputDomainError(f"alphabet symbols must be single characters, got {s!r}")
            if s in MARKERS:
                raise InputDomainError(f"{s!r} is a reserved tape marker")
        if len(set(syms)) != len(syms):
            raise InputDomainError(f"duplicate symbols in {syms!r}")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(syms)})

    @property
    def k(self) -> int:
        return len(self.symbols)

    def lex(self, symbol: str) -> int:
        """Symbol weight ``i + 1`` for the ``i``-th symbol (1-based)."""
        try:
            return self._index[symbol] + 2
        except KeyError:
            raise InputDomainError(f"symbol {symbol!r} is not in alphabet {self.symbols!r}") from None

    def check(self, w: str) -> str:
        if not isinstance(w, str):
            raise InputDomainError(f"expected a string, got {type(w).__name__}")
        for ch in w:
            if ch not in self._index:
                raise InputDomainError(f"symbol {ch!r} is not in alphabet {self.symbols!r}")
        return w

    def __contains__(self, symbol) -> bool:
        return symbol in self._index


UNARY = Alphabet(("a",))
BINARY = Alphabet(("a", "b"))
BITS = Alphabet(("0", "1"))


def _count_shorter(k: int, n: int) -> int:
    return n if k == 1 else (k**n - 1) // (k - 1)


def lex_rank(alphabet: Alphabet, w: str) -> int:
    alphabet.check(w)
    k = alphabet.k
    offset = 0
    for sym in w:
        offset = offset * k + alphabet.lex(sym) - 2
    return 1 + _count_shorter(k, len(w)) + offset


def lex_unrank(alphabet: Alphabet, i: int) -> str:
    if isinstance(i, bool) or not isinstance(i, int) or i < 1:
        raise InputDomainError(f"rank must be a positive integer, got {i!r}")
    k = alphabet.k
    if k == 1:
        return alphabet.symbols[0] * (i - 1)
    rest = i - 1
    n, block = 0, 1
    while rest >= block:
        rest -= block
        n += 1
        block *= k
    out = []
    for _ in range(n):
        rest, d = divmod(rest, k)
        out.append(alphabet.symbols[d])
    return "".join(reversed(out))


@dataclass(frozen=True)
class LexTrace:
    """Counter snapshots of the four-counter rank computation.

    ``snapshots[0]`` is the initial all-zero state and ``snapshots[i]`` the state
    after the ``i``-th symbol has been folded in.
    """

    snapshots: tuple[tuple[int, int, int, int], ...]
    final_rank: int
    operations: int


class _CounterBank:
    """Four counters restricted to increment, decrement and zero-test."""

    def __init__(self):
        self.c = [0, 0, 0, 0]
        self.ops = 0

    def inc(self, j):
        self.c[j] += 1
        self.ops += 1

    def dec(self, j):
        if self.c[j] == 0:
            raise AssertionError(f"counter C{j + 1} would go negative")
        self.c[j] -= 1
        self.ops += 1

    def is_zero(self, j):
        self.ops += 1
        return self.c[j] == 0


def counter_lex_trace(alphabet: Alphabet, w: str) -> LexTrace:
    """Rank of a nonempty ``w`` computed with counter operations only.

    Each further symbol performs ``C1 <- k*C1 + (2-k) + (lex(sym)-2)``; the
    multiplication drains C1 into C4 (k increments per unit) and refills.
    """
    alphabet.check(w)
    if not w:
        raise InputDomainError("the empty string is decided without counters")
    k = alphabet.k
    bank = _CounterBank()
    snaps = [tuple(bank.c)]
    for _ in range(alphabet.lex(w[0])):
        bank.inc(0)
    snaps.append(tuple(bank.c))
    for sym in w[1:]:
        while not bank.is_zero(0):
            bank.dec(0)
            for _ in range(k):
                bank.inc(3)
        while not bank.is_zero(3):
            bank.dec(3)
            bank.inc(0)
        delta = alphabet.lex(sym) - k
        for _ in range(abs(delta)):
            if delta > 0:
                bank.inc(0)
            else:
                bank.dec(0)
        snaps.append(tuple(bank.c))
    return LexTrace(tuple(snaps), bank.c[0], bank.ops)


# --- builtin languages -----------------------------------------------------

def usquare_root(n: int) -> int | None:
    """``m`` with ``n = m*m`` and ``m > 0``, else None."""
    if n < 1:
        return None
    m = isqrt(n)
    return m if m * m == n else None


def upower64_exponent(n: int) -> int | None:
    """``m > 0`` with ``n = 64**m``, else None."""
    if n < 64:
        return None
    m = 0
    while n % 64 == 0:
        n //= 64
        m += 1
    return m if n == 1 else None


@dataclass(frozen=True)
class Dima2Shape:
    """Zero-block lengths before and after the ``11`` separator of a binary string."""

    prefix: tuple[int, ...]
    post: tuple[int, ...]

    @property
    def prefix_length(self) -> int:
        """Symbols up to and including the ``11`` separator."""
        return sum(self.prefix) + len(self.prefix) + 1


def dima2_member(k: int) -> str:
    """The member ``w_k``: doubling zero-blocks, ``11``, then ``8**k`` blocks of ``8**k`` zeros."""
    if k < 1:
        raise InputDomainError("DIMA2 members are indexed by k >= 1")
    prefix = "1".join("0" * (1 << i) for i in range(3 * k))
    block = "0" * (8**k) + "1"
    return prefix + "11" + block * (8**k)


def dima2_shape(w: str) -> Dima2Shape | None:
    """Coarse shape ``0^{t1}1...0^{tm}11 0^{t'1}1...0^{t'm'}1`` with positive blocks,
    ``t1 = 1`` and ``m`` divisible by 3; None when the shape is violated."""
    cut = w.find("11")
    if cut < 0 or not w.endswith("1") or set(w) - {"0", "1"}:
        return None
    head, tail = w[:cut], w[cut + 2:]
    prefix = head.split("1")
    post = tail.split("1")[:-1]
    if not tail or any(b == "" for b in prefix) or any(b == "" for b in post):
        return None
    if any(set(b) != {"0"} for b in prefix + post):
        return None
    if len(prefix[0]) != 1 or len(prefix) % 3 != 0:
        return None
    return Dima2Shape(tuple(len(b) for b in prefix), tuple(len(b) for b in post))


def dima2_index(w: str) -> int | None:
    shape = dima2_shape(w)
    if shape is None:
        return None
    k = len(shape.prefix) // 3
    if shape.prefix != tuple(1 << i for i in range(3 * k)):
        return None
    side = 8**k
    if len(shape.post) != side or any(b != side for b in shape.post):
        return None
    return k


_BUILTINS = {
    "USQUARE": (UNARY, lambda w: usquare_root(len(w)) is not None),
    "UPOWER64": (UNARY, lambda w: upower64_exponent(len(w)) is not None),
    "DIMA2": (BITS, lambda w: dima2_index(w) is not None),
}

_TAILS = ("all-zero", "all-one", "periodic")


@dataclass(frozen=True)
class LanguageSpec:
    """Finitely described language over ``alphabet``.

    ``kind`` is ``"builtin"`` (``name``), ``"finite"`` (``strings``) or
    ``"bit-rule"`` (explicit ``prefix`` bits, then ``tail``: all-zero, all-one,
    or ``pattern`` repeated).  Bit-rule specs double as index sets ``I``.
    """

    alphabet: Alphabet
    kind: str
    name: str | None = None
    strings: frozenset = frozenset()
    prefix: tuple[int, ...] = ()
    tail: str = "all-zero"
    pattern: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "builtin":
            if self.name not in _BUILTINS:
                raise InputDomainError(f"unknown builtin language {self.name!r}")
            if _BUILTINS[self.name][0] != self.alphabet:
                raise InputDomainError(f"{self.name} is defined over {_BUILTINS[self.name][0].symbols}")
        elif self.kind == "finite":
            object.__setattr__(self, "strings", frozenset(self.strings))
            for s in self.strings:
                self.alphabet.check(s)
        elif self.kind == "bit-rule":
            object.__setattr__(self, "prefix", tuple(int(b) for b in self.prefix))
            object.__setattr__(self, "pattern", tuple(int(b) for b in self.pattern))
            if any(b not in (0, 1) for b in self.prefix + self.pattern):
                raise InputDomainError("bit-rule bits must be 0 or 1")
            if self.tail not in _TAILS:
                raise InputDomainError(f"tail must be one of {_TAILS}, got {self.tail!r}")
            if self.tail == "periodic" and not self.pattern:
                raise InputDomainError("a periodic tail needs a nonempty pattern")
        else:
            raise InputDomainError(f"unknown language kind {self.kind!r}")

    # constructors
    @classmethod
    def builtin(cls, name: str) -> "LanguageSpec":
        if name not in _BUILTINS:
            raise InputDomainError(f"unknown builtin language {name!r}")
        return cls(_BUILTINS[name][0], "builtin", name=name)

    @classmethod
    def finite(cls, strings: Iterable[str], alphabet: Alphabet = UNARY) -> "LanguageSpec":
        return cls(alphabet, "finite", strings=frozenset(strings))

    @classmethod
    def bit_rule(cls, prefix=(), tail="all-zero", pattern=(), alphabet: Alphabet = UNARY) -> "LanguageSpec":
        return cls(alphabet, "bit-rule", prefix=tuple(prefix), tail=tail, pattern=tuple(pattern))

    @classmethod
    def index_set(cls, members: Iterable[int], alphabet: Alphabet = UNARY) -> "LanguageSpec":
        """Finite index set as a bit-rule with an all-zero tail."""
        members = sorted(set(int(m) for m in members))
        if members and members[0] < 1:
            raise InputDomainError("index sets contain positive integers only")
        top = members[-1] if members else 0
        bits = [0] * top
        for m in members:
            bits[m - 1] = 1
        return cls.bit_rule(bits, "all-zero", alphabet=alphabet)

    @classmethod
    def everything(cls, alphabet: Alphabet = UNARY) -> "LanguageSpec":
        return cls.bit_rule((), "all-one", alphabet=alphabet)

    @classmethod
    def nothing(cls, alphabet: Alphabet = UNARY) -> "LanguageSpec":
        return cls.bit_rule((), "all-zero", alphabet=alphabet)

    # queries
    def bit(self, i: int) -> int:
        return membership_bit(self, i)

    def contains(self, w: str) -> bool:
        self.alphabet.check(w)
        if self.kind == "builtin":
            return _BUILTINS[self.name][1](w)
        if self.kind == "finite":
            return w in self.strings
        return self.bit(lex_rank(self.alphabet, w)) == 1

    # serialization
    def to_dict(self) -> dict:
        out = {"alphabet": list(self.alphabet.symbols), "kind": self.kind}
        if self.kind == "builtin":
            out["name"] = self.name
        elif self.kind == "finite":
            out["strings"] = sorted(self.strings, key=lambda s: lex_rank(self.alphabet, s))
        else:
            out["prefix"] = list(self.prefix)
            out["tail"] = self.tail
            if self.tail == "periodic":
                out["pattern"] = list(self.pattern)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "LanguageSpec":
        if not isinstance(data, dict):
            raise InputDomainError("a language spec must be a JSON object")
        kind = data.get("kind")
        if kind == "builtin":
            spec = cls.builtin(data.get("name"))
            if "alphabet" in data and tuple(data["alphabet"]) != spec.alphabet.symbols:
                raise InputDomainError(f"{spec.name} is defined over {spec.alphabet.symbols}")
            return spec
        alphabet = Alphabet(tuple(data.get("alphabet", ("a",))))
        if kind == "finite":
            return cls.finite(data.get("strings", []), alphabet)
        if kind == "bit-rule":
            return cls.bit_rule(data.get("prefix", []), data.get("tail", "all-zero"),
                                data.get("pattern", []), alphabet)
        if kind == "index-set":
            return cls.index_set(data.get("members", []), alphabet)
        raise InputDomainError(f"unknown language kind {kind!r}")


def membership_bit(spec: LanguageSpec, i: int) -> int:
    if isinstance(i, bool) or not isinstance(i, int) or i < 1:
        raise InputDomainError(f"membership index must be a positive integer, got {i!r}")
    if spec.kind == "bit-rule":
        if i <= len(spec.prefix):
            return spec.prefix[i - 1]
        if spec.tail == "all-zero":
            return 0
        if spec.tail == "all-one":
            return 1
        return spec.pattern[(i - len(spec.prefix) - 1) % len(spec.pattern)]
    w = lex_unrank(spec.alphabet, i)
    if spec.kind == "finite":
        return int(w in spec.strings)
    return int(_BUILTINS[spec.name][1](w))
