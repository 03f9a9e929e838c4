"""Spans of cyclonic orbits, their composition, and the Burnside ring.

Up to 2-isomorphism a span ``<m> <- <l> -> <n>`` only remembers its apex
level ``l``, a divisor of ``gcd(m, n)``; composing basic classes over a
middle level ``b`` gives ``[l] o [k] = (b / lcm(k, l)) [gcd(k, l)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclonic import (LevelMismatch, NotDivisor, Orbit, compose_orbit_maps,
                       make_orbit_map, pullback_cospan)
from .supernat import Supernatural, divisors

__all__ = [
    "Span",
    "HMorphism",
    "BurnsideElement",
    "SpanAutGroup",
    "basic_span",
    "identity_span",
    "span_class",
    "compose_spans",
    "compose_h",
    "burnside_mul",
    "span_aut_group",
    "dual",
    "composition_constant",
    "burnside_table",
]


def composition_constant(k: int, l: int, middle: int) -> tuple[int, int]:
    """``(coefficient, level)`` of ``[l] o [k]`` composed over ``middle``."""
    return middle // math.lcm(k, l), math.gcd(k, l)


@dataclass(frozen=True)
class Span:
    """``source <- apex -> target`` summed over a list of apexes.

    Each apex is ``(orbit, left, right)`` with ``left: orbit -> source`` and
    ``right: orbit -> target``.
    """

    source: Orbit
    target: Orbit
    apexes: tuple = ()

    def __post_init__(self):
        g = math.gcd(self.source.level, self.target.level)
        for orbit, left, right in self.apexes:
            if g % orbit.level:
                raise NotDivisor(f"apex level {orbit.level} does not divide {g}")
            if (left.source, left.target) != (orbit, self.source):
                raise LevelMismatch("left leg does not run from apex to source")
            if (right.source, right.target) != (orbit, self.target):
                raise LevelMismatch("right leg does not run from apex to target")


def basic_span(m: int, n: int, k: int, N=None, left=0, right=0) -> Span:
    N = Supernatural.infinity() if N is None else N
    apex = Orbit(k, N)
    return Span(Orbit(m, N), Orbit(n, N),
                ((apex, make_orbit_map(k, m, left, N), make_orbit_map(k, n, right, N)),))


def identity_span(m: int, N=None) -> Span:
    return basic_span(m, m, m, N)


@dataclass(frozen=True)
class HMorphism:
    """A morphism ``<src> -> <tgt>`` of the homotopy Burnside category.

    ``coeffs`` maps each divisor ``l`` of ``gcd(src, tgt)`` to an integer.
    ``effective`` records whether the value came from an actual span.
    """

    src: int
    tgt: int
    coeffs: tuple = ()
    effective: bool = field(default=False, compare=False)

    def __post_init__(self):
        g = math.gcd(self.src, self.tgt)
        given = dict(self.coeffs) if not isinstance(self.coeffs, dict) else self.coeffs
        for l in given:
            if g % l:
                raise NotDivisor(f"{l} does not divide gcd({self.src}, {self.tgt})")
        full = tuple((d, int(given.get(d, 0))) for d in divisors(g))
        object.__setattr__(self, "coeffs", full)

    @classmethod
    def basis(cls, src: int, tgt: int, l: int) -> "HMorphism":
        return cls(src, tgt, {l: 1}, effective=True)

    @classmethod
    def zero(cls, src: int, tgt: int) -> "HMorphism":
        return cls(src, tgt, {})

    @classmethod
    def identity(cls, m: int) -> "HMorphism":
        return cls.basis(m, m, m)

    def coeff(self, l: int) -> int:
        return dict(self.coeffs).get(l, 0)

    def terms(self):
        return [(l, c) for l, c in self.coeffs if c]

    def __add__(self, other):
        self._same_shape(other)
        return HMorphism(self.src, self.tgt, {l: c + other.coeff(l) for l, c in self.coeffs},
                         self.effective and other.effective)

    def __neg__(self):
        return HMorphism(self.src, self.tgt, {l: -c for l, c in self.coeffs})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return HMorphism(self.src, self.tgt, {l: k * c for l, c in self.coeffs},
                         self.effective and k >= 0)

    def _same_shape(self, other):
        if (self.src, self.tgt) != (other.src, other.tgt):
            raise LevelMismatch("morphisms are not parallel")

    def to_json(self) -> dict:
        return {"src": self.src, "tgt": self.tgt,
                "coeffs": {str(l): c for l, c in self.coeffs if c}}

    @classmethod
    def from_json(cls, doc: dict) -> "HMorphism":
        return cls(int(doc["src"]), int(doc["tgt"]),
                   {int(l): int(c) for l, c in doc.get("coeffs", {}).items()})


def span_class(s: Span) -> HMorphism:
    counts: dict[int, int] = {}
    for orbit, _, _ in s.apexes:
        counts[orbit.level] = counts.get(orbit.level, 0) + 1
    return HMorphism(s.source.level, s.target.level, counts, effective=True)


def compose_spans(s: Span, t: Span) -> Span:
    """``t`` after ``s``, computed by pulling back over the middle orbit."""
    if s.target != t.source:
        raise LevelMismatch(f"cannot compose spans through {s.target} and {t.source}")
    apexes = []
    for a, a_left, a_right in s.apexes:
        for b, b_left, b_right in t.apexes:
            _, comps = pullback_cospan(a_right, b_left)
            for pr1, pr2 in comps:
                apexes.append((pr1.source, compose_orbit_maps(pr1, a_left),
                               compose_orbit_maps(pr2, b_right)))
    return Span(s.source, t.target, tuple(apexes))


def compose_h(h1: HMorphism, h2: HMorphism) -> HMorphism:
    """``h2`` after ``h1``."""
    if h1.tgt != h2.src:
        raise LevelMismatch(f"cannot compose through {h1.tgt} and {h2.src}")
    out: dict[int, int] = {}
    for k, a in h1.terms():
        for l, b in h2.terms():
            c, g = composition_constant(k, l, h1.tgt)
            out[g] = out.get(g, 0) + a * b * c
    return HMorphism(h1.src, h2.tgt, out, h1.effective and h2.effective)


def dual(h: HMorphism) -> HMorphism:
    return HMorphism(h.tgt, h.src, dict(h.coeffs), h.effective)


@dataclass(frozen=True)
class BurnsideElement:
    """An element of the Burnside ring of ``C_level``; ``[k]`` has stabilizer order k."""

    level: int
    coeffs: tuple = ()

    def __post_init__(self):
        given = dict(self.coeffs) if not isinstance(self.coeffs, dict) else self.coeffs
        for k in given:
            if self.level % k:
                raise NotDivisor(f"{k} does not divide {self.level}")
        object.__setattr__(self, "coeffs",
                           tuple((d, int(given.get(d, 0))) for d in divisors(self.level)))

    @classmethod
    def orbit(cls, level: int, k: int) -> "BurnsideElement":
        return cls(level, {k: 1})

    @classmethod
    def one(cls, level: int) -> "BurnsideElement":
        return cls.orbit(level, level)

    def coeff(self, k):
        return dict(self.coeffs).get(k, 0)

    def vector(self) -> list[int]:
        return [c for _, c in self.coeffs]

    def __add__(self, other):
        if self.level != other.level:
            raise LevelMismatch("levels differ")
        return BurnsideElement(self.level, {k: c + other.coeff(k) for k, c in self.coeffs})

    def __neg__(self):
        return BurnsideElement(self.level, {k: -c for k, c in self.coeffs})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return BurnsideElement(self.level, {k: n * c for k, c in self.coeffs})

    def __mul__(self, other):
        return burnside_mul(self, other)

    def to_json(self) -> dict:
        return {"level": self.level, "coeffs": {str(k): c for k, c in self.coeffs if c}}

    @classmethod
    def from_json(cls, doc: dict) -> "BurnsideElement":
        return cls(int(doc["level"]), {int(k): int(c) for k, c in doc.get("coeffs", {}).items()})


def burnside_mul(x: BurnsideElement, y: BurnsideElement) -> BurnsideElement:
    if x.level != y.level:
        raise LevelMismatch("levels differ")
    m = x.level
    out: dict[int, int] = {}
    for k, a in x.coeffs:
        if not a:
            continue
        for l, b in y.coeffs:
            if b:
                c, g = composition_constant(k, l, m)
                out[g] = out.get(g, 0) + a * b * c
    return BurnsideElement(m, out)


@dataclass(frozen=True)
class SpanAutGroup:
    """Automorphisms of a basic span: ``(s, t)`` modulo the diagonal.

    The class of ``(s, t)`` is ``s - t``; the group is free of rank one on
    ``generator``.
    """

    m: int
    n: int
    l: int
    rank: int = 1
    generator: Fraction = Fraction(0)

    def class_of(self, s, t) -> Fraction:
        s, t = Fraction(s), Fraction(t)
        if (s * self.m).denominator != 1 or (t * self.n).denominator != 1:
            raise ValueError("need s in (1/m)Z and t in (1/n)Z")
        return s - t

    def to_json(self) -> dict:
        g = self.generator
        return {"m": self.m, "n": self.n, "l": self.l, "rank": self.rank,
                "generator": f"{g.numerator}/{g.denominator}"}


def span_aut_group(m: int, n: int, l: int) -> SpanAutGroup:
    if math.gcd(m, n) % l:
        raise NotDivisor(f"{l} does not divide gcd({m}, {n})")
    return SpanAutGroup(m, n, l, 1, Fraction(1, math.lcm(m, n)))


def burnside_table(m: int) -> list[tuple[int, int, dict]]:
    """Products of all pairs of basis orbits of the Burnside ring at level m."""
    ds = divisors(m)
    return [(k, l, {g: c} if c else {}) for k in ds for l in ds
            for c, g in [composition_constant(k, l, m)]]
