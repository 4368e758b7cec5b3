"""Small argument checkers used at public entry points."""
from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from .errors import InputDomainError


def check_int(value, name: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (Integral, np.integer)):
        raise InputDomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise InputDomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_fraction(value, name: str, *, low=None, high=None, inclusive=False) -> Fraction:
    """Coerce ints, Fractions and decimal strings such as ``"1/4"`` to a Fraction in range."""
    if isinstance(value, str):
        try:
            value = Fraction(value)
        except ValueError as exc:
            raise InputDomainError(f"{name}: cannot parse {value!r} as a rational") from exc
    elif isinstance(value, float):
        value = Fraction(value).limit_denominator(10**9)
    elif isinstance(value, (Rational, Integral)):
        value = Fraction(value)
    else:
        raise InputDomainError(f"{name} must be rational, got {value!r}")
    if low is not None and (value < low or (value == low and not inclusive)):
        raise InputDomainError(f"{name} must exceed {low}")
    if high is not None and (value > high or (value == high and not inclusive)):
        raise InputDomainError(f"{name} must be below {high}")
    return value


def check_strings(X, name: str = "X") -> list[str]:
    """Accept a 1-D list/array of strings (or a 2-D single-column array) and return a list."""
    if isinstance(X, str):
        raise InputDomainError(f"{name} must be a sequence of strings, not a single string")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InputDomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    out = []
    for item in arr:
        if not isinstance(item, str):
            raise InputDomainError(f"{name} entries must be strings, got {type(item).__name__}")
        out.append(item)
    return out
