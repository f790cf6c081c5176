"""Rational-safe JSON conventions.

Rationals travel as decimal-free "p/q" strings end to end; floats appear
only in solver reports.  Canonical dumps (sorted keys, no whitespace
surprises) back the input-hash provenance of CLI reports.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .errors import InputError


def frac_to_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def frac_from_obj(obj) -> Fraction:
    if isinstance(obj, bool):
        raise InputError(f"expected rational, got {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational string {obj!r}") from exc
    raise InputError(f"expected rational, got {obj!r}")


def int_from_obj(obj) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise InputError(f"expected integer, got {obj!r}")
    return obj


def int_vector(obj, length=None) -> tuple[int, ...]:
    if not isinstance(obj, list):
        raise InputError(f"expected integer vector, got {obj!r}")
    v = tuple(int_from_obj(x) for x in obj)
    if length is not None and len(v) != length:
        raise InputError(f"expected vector of length {length}, got {len(v)}")
    return v


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_of(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()
