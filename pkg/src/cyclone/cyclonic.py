"""The degree-N cyclonic orbit 2-category at the level of exact rationals.

The orbit ``<m>_N`` is ``(1/N)Z / (1/m)Z``; its stabilizers have order m.
An equivariant map ``<m> -> <n>`` exists iff ``m | n`` and is ``z -> z + r``
for an offset ``r`` taken modulo ``1/n``.  Two-cells (intertwiners) are
rationals, never reduced.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .supernat import Supernatural, divides, parse_supernatural

__all__ = [
    "NotDivisor",
    "BadDenominator",
    "LevelMismatch",
    "Orbit",
    "OrbitMap",
    "Intertwiner",
    "IntertwinerCoset",
    "FiniteCyclonicSet",
    "make_orbit_map",
    "identity_map",
    "compose_orbit_maps",
    "intertwiners",
    "pullback_cospan",
    "check_simplex3",
    "Simplex3Report",
    "iota",
    "iota_cell",
    "parse_orbit",
    "parse_rational",
    "format_rational",
]


class NotDivisor(ValueError):
    pass


class BadDenominator(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str) and re.fullmatch(r"\s*-?\d+\s*(/\s*\d+\s*)?", text):
        return Fraction(text.replace(" ", ""))
    raise ValueError(f"not an exact rational: {text!r}")


def format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def _in_lattice(r: Fraction, n: int) -> bool:
    """Whether r lies in (1/n)Z."""
    return (r * n).denominator == 1


def _mod(r: Fraction, n: int) -> Fraction:
    """Reduce r into [0, 1/n)."""
    step = Fraction(1, n)
    return r - step * math.floor(r / step)


@dataclass(frozen=True)
class Orbit:
    level: int
    N: Supernatural = Supernatural.infinity()

    def __post_init__(self):
        if not isinstance(self.N, Supernatural):
            object.__setattr__(self, "N", parse_supernatural(str(self.N)))
        if not isinstance(self.level, int) or self.level < 1:
            raise ValueError("orbit level must be a positive integer")
        if not divides(self.level, self.N):
            raise NotDivisor(f"{self.level} does not divide {self.N}")

    def __str__(self):
        return f"<{self.level}>@{self.N}"


def parse_orbit(text: str) -> Orbit:
    match = re.fullmatch(r"\s*<\s*(\d+)\s*>\s*(?:@\s*(\S+))?\s*", text)
    if not match:
        raise ValueError(f"cannot parse orbit {text!r}")
    n = parse_supernatural(match.group(2)) if match.group(2) else Supernatural.infinity()
    return Orbit(int(match.group(1)), n)


@dataclass(frozen=True)
class OrbitMap:
    """The equivariant map ``z -> z + offset (mod 1/target.level)``."""

    source: Orbit
    target: Orbit
    offset: Fraction

    def __call__(self, z: Fraction) -> Fraction:
        return _mod(z + self.offset, self.target.level)

    def to_json(self) -> dict:
        return {"src": self.source.level, "tgt": self.target.level,
                "offset": format_rational(self.offset)}


def _check_in_N(r: Fraction, N: Supernatural):
    if not divides(r.denominator, N):
        raise BadDenominator(f"{format_rational(r)} is not in (1/{N})Z")


def make_orbit_map(m: int, n: int, r, N=None) -> OrbitMap:
    N = Supernatural.infinity() if N is None else N
    if not isinstance(N, Supernatural):
        N = parse_supernatural(str(N))
    r = parse_rational(r)
    src, tgt = Orbit(m, N), Orbit(n, N)
    if n % m:
        raise NotDivisor(f"no equivariant map <{m}> -> <{n}>: {m} does not divide {n}")
    off = _mod(r, n)
    _check_in_N(off, N)
    return OrbitMap(src, tgt, off)


def identity_map(orbit: Orbit) -> OrbitMap:
    return OrbitMap(orbit, orbit, Fraction(0))


def compose_orbit_maps(f: OrbitMap, g: OrbitMap) -> OrbitMap:
    """``g`` after ``f``."""
    if f.target != g.source:
        raise LevelMismatch(f"cannot compose {f.target} with {g.source}")
    return OrbitMap(f.source, g.target, _mod(f.offset + g.offset, g.target.level))


@dataclass(frozen=True)
class IntertwinerCoset:
    """All intertwiners between a parallel pair: ``base + period * Z``."""

    base: Fraction
    period: Fraction

    def __contains__(self, r) -> bool:
        return ((parse_rational(r) - self.base) / self.period).denominator == 1


def intertwiners(u: OrbitMap, v: OrbitMap) -> IntertwinerCoset:
    if (u.source, u.target) != (v.source, v.target):
        raise LevelMismatch("intertwiners need parallel maps")
    n = u.target.level
    return IntertwinerCoset(_mod(v.offset - u.offset, n), Fraction(1, n))


@dataclass(frozen=True)
class Intertwiner:
    source: OrbitMap
    target: OrbitMap
    value: Fraction

    def __post_init__(self):
        _check_in_N(self.value, self.source.target.N)
        if self.value not in intertwiners(self.source, self.target):
            raise ValueError(f"{format_rational(self.value)} is not an intertwiner")


@dataclass(frozen=True)
class FiniteCyclonicSet:
    orbits: tuple = ()

    def __post_init__(self):
        if len({o.N for o in self.orbits}) > 1:
            raise ValueError("orbits must share the ambient N")

    def level_counts(self) -> Counter:
        return Counter(o.level for o in self.orbits)

    def __len__(self):
        return len(self.orbits)


def pullback_cospan(f: OrbitMap, g: OrbitMap):
    """Decompose the pullback of ``<k> -f-> <m> <-g- <l>`` into orbits.

    Returns the apex :class:`FiniteCyclonicSet` and, per orbit, the pair of
    projections ``(pr1 to <k>, pr2 to <l>)`` with ``f pr1 == g pr2``.
    There are ``m / lcm(k, l)`` components, each of level ``gcd(k, l)``.
    """
    if f.target != g.target:
        raise LevelMismatch("cospan legs must share a target")
    k, l, m = f.source.level, g.source.level, f.target.level
    N = f.target.N
    apex = Orbit(math.gcd(k, l), N)
    base = g.offset - f.offset
    comps = []
    for j in range(m // math.lcm(k, l)):
        s = base + Fraction(j, m)
        comps.append((make_orbit_map(apex.level, k, s, N),
                      OrbitMap(apex, g.source, Fraction(0))))
    return FiniteCyclonicSet(tuple(apex for _ in comps)), comps


@dataclass
class Simplex3Report:
    ok: bool
    failures: list

    def __bool__(self):
        return self.ok


_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def check_simplex3(objects, maps, fillers) -> Simplex3Report:
    """Check a 3-simplex of the 2-nerve.

    ``maps[(i, j)]`` is the 1-morphism ``X_i -> X_j``; ``fillers[(i, j, k)]``
    claims to be an intertwiner from ``maps[i, k]`` to
    ``maps[j, k] o maps[i, j]``.  Whiskering preserves intertwiner values,
    so the cocycle condition reads ``a_ikl + a_ijk == a_ijl + a_jkl``.
    """
    failures = []
    for (i, j), phi in maps.items():
        if phi.source != objects[i] or phi.target != objects[j]:
            failures.append({"face": (i, j), "check": "map endpoints"})
    for face in _FACES:
        i, j, k = face
        comp = compose_orbit_maps(maps[i, j], maps[j, k])
        a = parse_rational(fillers[face])
        if a not in intertwiners(maps[i, k], comp):
            failures.append({"face": face, "check": "intertwiner", "value": format_rational(a)})
        elif not divides(a.denominator, objects[k].N):
            failures.append({"face": face, "check": "denominator", "value": format_rational(a)})
    lhs = parse_rational(fillers[0, 2, 3]) + parse_rational(fillers[0, 1, 2])
    rhs = parse_rational(fillers[0, 1, 3]) + parse_rational(fillers[1, 2, 3])
    if lhs != rhs:
        failures.append({"face": (0, 1, 2, 3), "check": "cocycle",
                         "difference": format_rational(lhs - rhs)})
    return Simplex3Report(not failures, failures)


# -- reindexing along multiplication by n ------------------------------------


def iota(f: OrbitMap, n: int) -> OrbitMap:
    """Pull the action back along multiplication by ``n``: ``<m> -> <mn>``."""
    N = f.source.N
    src, tgt = Orbit(f.source.level * n, N), Orbit(f.target.level * n, N)
    off = f.offset / n
    _check_in_N(off, N)
    return OrbitMap(src, tgt, off)


def iota_cell(r: Fraction, n: int) -> Fraction:
    return parse_rational(r) / n
