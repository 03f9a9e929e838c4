"""The presented graded algebra of endomorphisms of cyclonic complexes.

Basis symbols are ``a[b,k,a]`` (alpha, degree 0) and ``e[b,k,a]`` (eps, degree 1),
read as maps from ``a`` to ``b`` through the level ``k | gcd(a, b)``.  The
product ``x * y`` means x after y.  The differential is zero.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .rings import ZZ, ExactRing
from .supernat import divisors

__all__ = [
    "RingMismatch",
    "DgaBasisSymbol",
    "DgaElement",
    "parse_symbol",
    "mul_basis",
    "dga_mul",
    "degree",
    "unit",
    "differential",
    "basis",
    "structure_table",
]

ALPHA, EPS = "a", "e"


class RingMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class DgaBasisSymbol:
    kind: str
    b: int
    k: int
    a: int

    def __post_init__(self):
        if self.kind not in (ALPHA, EPS):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if min(self.a, self.b, self.k) < 1 or math.gcd(self.a, self.b) % self.k:
            raise ValueError(f"{self.k} does not divide gcd({self.a}, {self.b})")

    @property
    def degree(self) -> int:
        return 0 if self.kind == ALPHA else 1

    def __str__(self):
        return f"{self.kind}[{self.b},{self.k},{self.a}]"


_SYMBOL = re.compile(r"^\s*([ae])\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]\s*$")


def parse_symbol(text: str) -> DgaBasisSymbol:
    m = _SYMBOL.match(text)
    if not m:
        raise ValueError(f"cannot parse basis symbol {text!r}")
    kind, b, k, a = m.groups()
    return DgaBasisSymbol(kind, int(b), int(k), int(a))


def mul_basis(x: DgaBasisSymbol, y: DgaBasisSymbol):
    """``(coefficient, symbol)`` for ``x * y``, or None when the product is zero."""
    if x.a != y.b or (x.kind == EPS and y.kind == EPS):
        return None
    l, k, b = x.k, y.k, y.b
    if x.kind == ALPHA and y.kind == ALPHA:
        coeff = b // math.lcm(k, l)
    elif x.kind == EPS:
        coeff = b // k
    else:
        coeff = b // l
    kind = EPS if EPS in (x.kind, y.kind) else ALPHA
    return coeff, DgaBasisSymbol(kind, x.b, math.gcd(k, l), y.a)


@dataclass(frozen=True)
class DgaElement:
    """A finite linear combination of basis symbols with coefficients in ``ring``."""

    ring: ExactRing
    terms: tuple = ()

    def __post_init__(self):
        raw = self.terms.items() if isinstance(self.terms, dict) else self.terms
        acc: dict = {}
        for sym, c in raw:
            if isinstance(sym, str):
                sym = parse_symbol(sym)
            acc[sym] = self.ring.add(acc.get(sym, self.ring.zero), self.ring.coerce(c))
        clean = tuple(sorted((s, c) for s, c in acc.items() if not self.ring.is_zero(c)))
        object.__setattr__(self, "terms", clean)

    @classmethod
    def symbol(cls, sym, ring: ExactRing = ZZ, coeff=None) -> "DgaElement":
        return cls(ring, {sym: ring.one if coeff is None else coeff})

    @classmethod
    def zero(cls, ring: ExactRing = ZZ) -> "DgaElement":
        return cls(ring, ())

    def is_zero(self) -> bool:
        return not self.terms

    def _same_ring(self, other):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring.tag} and {other.ring.tag}")

    def __add__(self, other):
        self._same_ring(other)
        return DgaElement(self.ring, self.terms + other.terms)

    def __neg__(self):
        return DgaElement(self.ring, tuple((s, self.ring.neg(c)) for s, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return DgaElement(self.ring, tuple((s, self.ring.scalar(k, c)) for s, c in self.terms))

    def __mul__(self, other):
        return dga_mul(self, other)

    def to_json(self) -> dict:
        return {str(s): self.ring.encode(c) for s, c in self.terms}

    @classmethod
    def from_json(cls, doc: dict, ring: ExactRing = ZZ) -> "DgaElement":
        return cls(ring, {parse_symbol(k): ring.decode(v) for k, v in doc.items()})


def dga_mul(x: DgaElement, y: DgaElement) -> DgaElement:
    x._same_ring(y)
    ring = x.ring
    out = []
    for sx, cx in x.terms:
        for sy, cy in y.terms:
            hit = mul_basis(sx, sy)
            if hit is not None:
                coeff, sym = hit
                out.append((sym, ring.scalar(coeff, ring.mul(cx, cy))))
    return DgaElement(ring, tuple(out))


def degree(x: DgaElement) -> tuple[DgaElement, DgaElement]:
    """The degree 0 and degree 1 parts."""
    parts = ([], [])
    for s, c in x.terms:
        parts[s.degree].append((s, c))
    return DgaElement(x.ring, tuple(parts[0])), DgaElement(x.ring, tuple(parts[1]))


def unit(bound: int, ring: ExactRing = ZZ) -> DgaElement:
    """``sum_a alpha[a,a,a]`` over the divisors of ``bound``."""
    return DgaElement(ring, tuple((DgaBasisSymbol(ALPHA, a, a, a), ring.one)
                                  for a in divisors(bound)))


def differential(x: DgaElement) -> DgaElement:
    return DgaElement.zero(x.ring)


def basis(bound: int, kinds=(ALPHA, EPS)) -> list[DgaBasisSymbol]:
    ds = divisors(bound)
    return [DgaBasisSymbol(kind, b, k, a) for kind in kinds for b in ds for a in ds
            for k in divisors(math.gcd(a, b))]


def structure_table(bound: int, kinds=(ALPHA, EPS)) -> list[tuple]:
    """Rows ``(x, y, coefficient, product)`` for every nonzero basis product."""
    syms = basis(bound, kinds)
    rows = []
    for x in syms:
        for y in syms:
            hit = mul_basis(x, y)
            if hit is not None:
                rows.append((x, y, hit[0], hit[1]))
    return rows
