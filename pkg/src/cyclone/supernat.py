"""Supernatural numbers and their finite divisor nests.

A supernatural number is a formal product of prime powers whose exponents
may be infinite.  Values are immutable; the top element (every exponent
infinite) is stored as a flag.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache, reduce

from sympy import divisors as _divisors
from sympy import factorint, isprime

INF = math.inf

__all__ = [
    "INF",
    "Supernatural",
    "valuation",
    "divides",
    "mul",
    "meet",
    "join",
    "nest",
    "parse_supernatural",
    "divisors",
    "prime_factors",
    "prime_to_part",
    "covering_primes",
]


@dataclass(frozen=True)
class Supernatural:
    """A formal product of prime powers with exponents in N u {inf}.

    ``valuations`` holds ``(p, v)`` pairs sorted by prime with ``v >= 1``
    (``v`` may be :data:`INF`).  ``top`` marks the maximal element.
    """

    valuations: tuple = ()
    top: bool = False
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vals = tuple(sorted((int(p), v) for p, v in self.valuations if v != 0))
        for p, v in vals:
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
            if v != INF and (not isinstance(v, int) or v < 0):
                raise ValueError(f"bad valuation {v!r} at {p}")
        if self.top:
            vals = ()
        object.__setattr__(self, "valuations", vals)
        object.__setattr__(self, "_lookup", dict(vals))

    @classmethod
    def of(cls, n: int) -> "Supernatural":
        if n < 1:
            raise ValueError("finite supernatural numbers are positive integers")
        return cls(tuple(factorint(n).items()))

    @classmethod
    def infinity(cls) -> "Supernatural":
        return cls(top=True)

    @classmethod
    def prime_power(cls, p: int, v=INF) -> "Supernatural":
        return cls(((p, v),))

    def valuation(self, p: int):
        if self.top:
            return INF
        return self._lookup.get(p, 0)

    @property
    def is_finite(self) -> bool:
        return not self.top and all(v != INF for _, v in self.valuations)

    def __int__(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return math.prod(p**v for p, v in self.valuations)

    def divisible_part(self) -> "Supernatural":
        """The part carrying infinite exponents only."""
        if self.top:
            return self
        return Supernatural(tuple((p, v) for p, v in self.valuations if v == INF))

    def __str__(self) -> str:
        if self.top:
            return "inf"
        if not self.valuations:
            return "1"
        if self.is_finite:
            return str(int(self))
        parts = []
        for p, v in self.valuations:
            if v == INF:
                parts.append(f"{p}^inf")
            elif v == 1:
                parts.append(str(p))
            else:
                parts.append(f"{p}^{v}")
        return "*".join(parts)


def _coerce(n) -> Supernatural:
    if isinstance(n, Supernatural):
        return n
    if isinstance(n, int):
        return Supernatural.of(n)
    if isinstance(n, str):
        return parse_supernatural(n)
    raise TypeError(f"cannot interpret {n!r} as a supernatural number")


def valuation(n, p: int):
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return _coerce(n).valuation(p)


def divides(m, n) -> bool:
    m, n = _coerce(m), _coerce(n)
    if n.top:
        return True
    if m.top:
        return False
    return all(v <= n.valuation(p) for p, v in m.valuations)


def _combine(m, n, op) -> Supernatural:
    m, n = _coerce(m), _coerce(n)
    primes = {p for p, _ in m.valuations} | {p for p, _ in n.valuations}
    return Supernatural(tuple((p, op(m.valuation(p), n.valuation(p))) for p in primes))


def mul(m, n) -> Supernatural:
    m, n = _coerce(m), _coerce(n)
    if m.top or n.top:
        return Supernatural.infinity()
    return _combine(m, n, lambda a, b: a + b)


def meet(m, n) -> Supernatural:
    m, n = _coerce(m), _coerce(n)
    if m.top:
        return n
    if n.top:
        return m
    return _combine(m, n, min)


def join(m, n) -> Supernatural:
    m, n = _coerce(m), _coerce(n)
    if m.top or n.top:
        return Supernatural.infinity()
    return _combine(m, n, max)


def nest(n, bound: int) -> list[int]:
    """Finite divisors of ``n`` that are at most ``bound``, ascending."""
    n = _coerce(n)
    if bound < 1:
        raise ValueError("bound must be positive")
    return [d for d in range(1, bound + 1) if divides(d, n)]


_FACTOR = re.compile(r"^\s*(\d+)\s*(?:\^\s*(inf|\d+))?\s*$")


def parse_supernatural(text: str) -> Supernatural:
    """Parse ``"12"``, ``"2^inf*3"`` or ``"inf"``."""
    text = text.strip()
    if text in ("inf", "0"):
        return Supernatural.infinity()
    vals: dict[int, object] = {}
    for part in text.split("*"):
        match = _FACTOR.match(part)
        if not match:
            raise ValueError(f"cannot parse supernatural factor {part!r}")
        base, exp = int(match.group(1)), match.group(2)
        if exp is None:
            if base < 1:
                raise ValueError("factors must be positive")
            for p, v in factorint(base).items():
                vals[p] = vals.get(p, 0) + v
            continue
        if not isprime(base):
            raise ValueError(f"exponentiated factor {base} must be prime")
        e = INF if exp == "inf" else int(exp)
        vals[base] = vals.get(base, 0) + e
    return Supernatural(tuple(vals.items()))


# Plain-integer helpers shared by the other modules.

@lru_cache(maxsize=4096)
def _divisor_tuple(n: int) -> tuple:
    return tuple(int(d) for d in _divisors(n))


@lru_cache(maxsize=4096)
def _factor_tuple(n: int) -> tuple:
    return tuple(int(p) for p, e in sorted(factorint(n).items()) for _ in range(e))


def divisors(n: int) -> list[int]:
    """Positive divisors of ``n`` in ascending order."""
    return list(_divisor_tuple(n))


def prime_factors(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, ascending."""
    return list(_factor_tuple(n))


def prime_to_part(n: int, p: int) -> int:
    while n % p == 0:
        n //= p
    return n


def covering_primes(n: int) -> list[int]:
    return sorted(int(p) for p in factorint(n))


def lcm(*xs: int) -> int:
    return reduce(math.lcm, xs, 1)
