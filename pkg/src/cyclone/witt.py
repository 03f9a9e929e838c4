"""Big Witt vectors relative to the divisor truncation sets N_m.

A Witt vector at level m is a family ``(w_k)`` indexed by the divisors of m.
Its ghost components ``z_k = sum_{l | k} l * w_l^(k/l)`` turn Witt addition
and multiplication into componentwise operations.

Three computation routes exist for the ring operations:

* ``ghost``: through ghost components and back (torsion-free rings);
* ``lift``: lift ``Z/n`` components to ``Z``, compute there and reduce;
* ``poly``: evaluate the universal integral polynomials (any ring).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from .abgrp import FGAbelianGroup, GroupMorphism, Matrix, lattice_basis
from .burnside import BurnsideElement
from .cyclonic import LevelMismatch, NotDivisor
from .mackey import MackeyRule
from .rings import (ExactRing, IntegerModRing, IntegerRing, NotDivisible, PolynomialRing, ZZ,
                    ring_from_tag)
from .supernat import divisors

__all__ = [
    "NonIntegral",
    "TorsionRing",
    "IntegralityFailure",
    "UnsupportedRing",
    "WittVector",
    "GhostVector",
    "ghost",
    "ghost_solve",
    "universal_polys",
    "frobenius_polys",
    "witt_add",
    "witt_mul",
    "witt_neg",
    "witt_sub",
    "frobenius",
    "verschiebung",
    "literal_verschiebung",
    "restriction",
    "witt_coordinates",
    "witt_from_coordinates",
    "witt_group",
    "witt_mackey",
    "witt_mackey_rule",
    "dress_siebeneicher",
    "dress_siebeneicher_morphism",
    "fixed_point_ghost",
]


class NonIntegral(ArithmeticError):
    def __init__(self, k: int, message: str = ""):
        super().__init__(message or f"ghost solve is not integral at k={k}")
        self.k = k


class TorsionRing(ArithmeticError):
    def __init__(self, k: int, message: str = ""):
        super().__init__(message or f"division by {k} is ambiguous in a ring with torsion")
        self.k = k


class IntegralityFailure(RuntimeError):
    """A universal polynomial came out non-integral; this is a bug."""


class UnsupportedRing(ValueError):
    pass


@dataclass(frozen=True)
class WittVector:
    ring: ExactRing
    level: int
    components: tuple

    def __post_init__(self):
        if isinstance(self.components, dict):
            comps = tuple(self.ring.coerce(self.components.get(k, self.ring.zero))
                          for k in divisors(self.level))
        else:
            comps = tuple(self.ring.coerce(c) for c in self.components)
        if len(comps) != len(divisors(self.level)):
            raise ValueError(f"level {self.level} needs {len(divisors(self.level))} components")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, ring: ExactRing, level: int) -> "WittVector":
        return cls(ring, level, (ring.zero,) * len(divisors(level)))

    @classmethod
    def one(cls, ring: ExactRing, level: int) -> "WittVector":
        n = len(divisors(level))
        return cls(ring, level, (ring.one,) + (ring.zero,) * (n - 1))

    @classmethod
    def unit_vector(cls, ring: ExactRing, level: int, d: int, value=None) -> "WittVector":
        """The vector with ``value`` (default 1) at index d and 0 elsewhere."""
        value = ring.one if value is None else ring.coerce(value)
        return cls(ring, level, tuple(value if k == d else ring.zero for k in divisors(level)))

    def component(self, k: int):
        return self.components[divisors(self.level).index(k)]

    def as_dict(self) -> dict:
        return dict(zip(divisors(self.level), self.components))

    def __eq__(self, other):
        return (isinstance(other, WittVector) and self.ring == other.ring
                and self.level == other.level
                and all(self.ring.eq(a, b) for a, b in zip(self.components, other.components)))

    def __hash__(self):
        return hash((self.ring, self.level))

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_sub(self, other)

    def to_json(self) -> dict:
        return {"ring": self.ring.tag, "level": self.level,
                "components": {str(k): self.ring.encode(c) for k, c in self.as_dict().items()}}

    @classmethod
    def from_json(cls, doc: dict, ring: ExactRing | None = None) -> "WittVector":
        ring = ring or ring_from_tag(doc.get("ring", "Z"))
        level = int(doc["level"])
        comps = doc["components"]
        if isinstance(comps, dict):
            comps = {int(k): ring.decode(v) for k, v in comps.items()}
        else:
            comps = [ring.decode(v) for v in comps]
        return cls(ring, level, comps)


@dataclass(frozen=True)
class GhostVector:
    ring: ExactRing
    level: int
    values: tuple

    def value(self, k: int):
        return self.values[divisors(self.level).index(k)]

    def as_dict(self) -> dict:
        return dict(zip(divisors(self.level), self.values))

    def __eq__(self, other):
        return (isinstance(other, GhostVector) and self.level == other.level
                and all(self.ring.eq(a, b) for a, b in zip(self.values, other.values)))

    def __hash__(self):
        return hash(self.level)


def _ghost_values(comps: dict, ring: ExactRing, level: int) -> list:
    out = []
    for k in divisors(level):
        total = ring.zero
        for l in divisors(k):
            total = ring.add(total, ring.scalar(l, ring.pow(comps[l], k // l)))
        out.append(total)
    return out


def ghost(w: WittVector) -> GhostVector:
    return GhostVector(w.ring, w.level, tuple(_ghost_values(w.as_dict(), w.ring, w.level)))


def ghost_solve(z, ring: ExactRing | None = None, level: int | None = None) -> WittVector:
    """The Witt vector with ghost components ``z``.

    Solves ``w_k = (z_k - sum_{l | k, l < k} l w_l^(k/l)) / k`` upwards.
    Raises :class:`NonIntegral` or, in rings with torsion, :class:`TorsionRing`.
    """
    if isinstance(z, GhostVector):
        ring, level, values = z.ring, z.level, z.values
    else:
        values = tuple(z)
    ring = ZZ if ring is None else ring
    if level is None:
        raise ValueError("level is required for a bare ghost tuple")
    ds = divisors(level)
    zs = dict(zip(ds, values))
    w: dict = {}
    for k in ds:
        acc = zs[k]
        for l in divisors(k)[:-1]:
            acc = ring.sub(acc, ring.scalar(l, ring.pow(w[l], k // l)))
        try:
            w[k] = ring.exact_div(acc, k) if k > 1 else acc
        except NotDivisible as exc:
            if ring.torsion_free:
                raise NonIntegral(k) from exc
            raise TorsionRing(k) from exc
    return WittVector(ring, level, tuple(w[k] for k in ds))


# -- universal polynomials ----------------------------------------------------

_poly_lock = threading.Lock()
_poly_cache: dict = {}


def _variables(level: int, names=("x", "y")) -> list[str]:
    return [f"{n}{d}" for n in names for d in divisors(level)]


def _solve_poly(ghosts: list, ring: PolynomialRing, level: int) -> dict:
    try:
        w = ghost_solve(ghosts, ring, level)
    except NonIntegral as exc:
        raise IntegralityFailure(f"universal polynomial not integral at k={exc.k}") from exc
    out = dict(zip(divisors(level), w.components))
    for k, p in out.items():
        if not p.is_integral():
            raise IntegralityFailure(f"universal polynomial not integral at k={k}")
    if ring.base == "Q":
        zring = PolynomialRing(ring.variables, "Z")
        out = {k: zring.decode(ring.encode(p)) for k, p in out.items()}
    return out


def universal_polys(level: int, op: str, base: str = "Z") -> dict:
    """Integral polynomials in ``x_d, y_d`` giving each Witt component of ``op``.

    ``op`` is ``"sum"``, ``"product"`` or ``"negation"`` (which only uses x).
    With ``base="Q"`` the ghost solve runs over rational polynomials and the
    result is checked integral afterwards; with ``base="Z"`` every division
    is checked exact on the way.
    """
    if op not in ("sum", "product", "negation"):
        raise ValueError(f"unknown operation {op!r}")
    key = ("op", level, op, base)
    with _poly_lock:
        if key in _poly_cache:
            return _poly_cache[key]
        ring = PolynomialRing(_variables(level), base)
        xs = {d: ring.gen(f"x{d}") for d in divisors(level)}
        ys = {d: ring.gen(f"y{d}") for d in divisors(level)}
        gx = _ghost_values(xs, ring, level)
        if op == "negation":
            ghosts = [-a for a in gx]
        else:
            gy = _ghost_values(ys, ring, level)
            ghosts = [a + b if op == "sum" else a * b for a, b in zip(gx, gy)]
        result = _solve_poly(ghosts, ring, level)
        _poly_cache[key] = result
        return result


def frobenius_polys(m: int, n: int) -> dict:
    """Polynomials in ``x_l`` (l | n) giving the components of ``F_{m|n}``."""
    if n % m:
        raise NotDivisor(f"{m} does not divide {n}")
    key = ("frob", m, n)
    with _poly_lock:
        if key in _poly_cache:
            return _poly_cache[key]
        src = PolynomialRing(_variables(n, ("x",)), "Z")
        xs = {d: src.gen(f"x{d}") for d in divisors(n)}
        gx = dict(zip(divisors(n), _ghost_values(xs, src, n)))
        ghosts = [gx[k * (n // m)] for k in divisors(m)]
        result = _solve_poly(ghosts, src, m)
        _poly_cache[key] = result
        return result


# -- arithmetic ------------------------------------------------------------------


def _check_pair(x: WittVector, y: WittVector):
    if x.level != y.level:
        raise LevelMismatch(f"levels {x.level} and {y.level} differ")
    if x.ring != y.ring:
        raise ValueError("Witt vectors over different rings")


def _route(ring: ExactRing, method: str) -> str:
    if method != "auto":
        return method
    if ring.torsion_free:
        return "ghost"
    if isinstance(ring, IntegerModRing):
        return "lift"
    return "poly"


def _lift(w: WittVector) -> WittVector:
    return WittVector(ZZ, w.level, tuple(w.ring.lift(c) for c in w.components))


def _reduce(w: WittVector, ring: ExactRing) -> WittVector:
    return WittVector(ring, w.level, tuple(ring.from_int(c) for c in w.components))


def _binary(x: WittVector, y: WittVector, op: str, method: str) -> WittVector:
    _check_pair(x, y)
    ring, route = x.ring, _route(x.ring, method)
    if route == "ghost":
        gx, gy = ghost(x).values, ghost(y).values
        f = ring.add if op == "sum" else ring.mul
        return ghost_solve([f(a, b) for a, b in zip(gx, gy)], ring, x.level)
    if route == "lift":
        return _reduce(_binary(_lift(x), _lift(y), op, "ghost"), ring)
    if route == "poly":
        polys = universal_polys(x.level, op)
        values = list(x.components) + list(y.components)
        return WittVector(ring, x.level, tuple(polys[k].evaluate(values, ring)
                                               for k in divisors(x.level)))
    raise ValueError(f"unknown method {method!r}")


def witt_add(x: WittVector, y: WittVector, method: str = "auto") -> WittVector:
    return _binary(x, y, "sum", method)


def witt_mul(x: WittVector, y: WittVector, method: str = "auto") -> WittVector:
    return _binary(x, y, "product", method)


def witt_neg(x: WittVector, method: str = "auto") -> WittVector:
    ring, route = x.ring, _route(x.ring, method)
    if route == "ghost":
        return ghost_solve([ring.neg(a) for a in ghost(x).values], ring, x.level)
    if route == "lift":
        return _reduce(witt_neg(_lift(x), "ghost"), ring)
    polys = universal_polys(x.level, "negation")
    values = list(x.components) + [ring.zero] * len(x.components)
    return WittVector(ring, x.level, tuple(polys[k].evaluate(values, ring)
                                           for k in divisors(x.level)))


def witt_sub(x: WittVector, y: WittVector, method: str = "auto") -> WittVector:
    return witt_add(x, witt_neg(y, method), method)


def witt_scale(k: int, x: WittVector) -> WittVector:
    """``k`` times ``x`` in the additive group."""
    if k < 0:
        return witt_scale(-k, witt_neg(x))
    out, base = WittVector.zero(x.ring, x.level), x
    while k:
        if k & 1:
            out = witt_add(out, base)
        k >>= 1
        if k:
            base = witt_add(base, base)
    return out


def frobenius(w: WittVector, m: int, method: str = "auto") -> WittVector:
    """``F_{m|n}``: on ghosts ``z'_k = z_{k n / m}``."""
    n = w.level
    if n % m:
        raise NotDivisor(f"{m} does not divide {n}")
    ring, route = w.ring, _route(w.ring, method)
    if route == "ghost":
        z = ghost(w).as_dict()
        return ghost_solve([z[k * (n // m)] for k in divisors(m)], ring, m)
    if route == "lift":
        return _reduce(frobenius(_lift(w), m, "ghost"), ring)
    polys = frobenius_polys(m, n)
    return WittVector(ring, m, tuple(polys[k].evaluate(list(w.components), ring)
                                     for k in divisors(m)))


def verschiebung(w: WittVector, n: int) -> WittVector:
    """``V_{m|n}``: ``(V w)_l = w_{l m / n}`` when ``n/m`` divides l, else 0."""
    m = w.level
    if n % m:
        raise NotDivisor(f"{m} does not divide {n}")
    r = n // m
    comps = w.as_dict()
    return WittVector(w.ring, n, tuple(comps[l // r] if l % r == 0 else w.ring.zero
                                       for l in divisors(n)))


def literal_verschiebung(w: WittVector, n: int) -> WittVector:
    """Extension by zero along ``N_m`` inside ``N_n``; kept as a regression witness."""
    m = w.level
    if n % m:
        raise NotDivisor(f"{m} does not divide {n}")
    comps = w.as_dict()
    return WittVector(w.ring, n, tuple(comps[l] if m % l == 0 else w.ring.zero
                                       for l in divisors(n)))


def restriction(w: WittVector, m: int) -> WittVector:
    """Truncate the components to the divisors of m."""
    if w.level % m:
        raise NotDivisor(f"{m} does not divide {w.level}")
    comps = w.as_dict()
    return WittVector(w.ring, m, tuple(comps[k] for k in divisors(m)))


# -- additive carriers over Z and Z/n ----------------------------------------------
#
# The ghost image of W_<m>(Z) is the lattice with basis b_d = ghost(e_d),
# (b_d)_k = d if d | k else 0, where e_d is the unit Witt vector at index d.
# Coordinates in this basis make Witt addition literal vector addition.


def _coords_from_ghost(z: Sequence[int], level: int) -> tuple:
    ds = divisors(level)
    zs = dict(zip(ds, z))
    c: dict = {}
    for k in ds:
        acc = zs[k] - sum(d * c[d] for d in divisors(k)[:-1])
        q, r = divmod(acc, k)
        if r:
            raise NonIntegral(k, f"ghost vector is outside the Witt lattice at k={k}")
        c[k] = q
    return tuple(c[k] for k in ds)


def _ghost_from_coords(c: Sequence[int], level: int) -> list:
    ds = divisors(level)
    cs = dict(zip(ds, c))
    return [sum(d * cs[d] for d in divisors(k)) for k in ds]


def _carrier_ring(ring: ExactRing) -> ExactRing:
    if isinstance(ring, (IntegerRing, IntegerModRing)):
        return ring
    raise UnsupportedRing(f"no finitely generated carrier for {ring.tag}")


def witt_coordinates(w: WittVector) -> tuple:
    """Coordinates of ``w`` (over Z or Z/n) in the unit-vector basis."""
    _carrier_ring(w.ring)
    lifted = _lift(w) if not isinstance(w.ring, IntegerRing) else w
    return _coords_from_ghost(ghost(lifted).values, w.level)


def witt_from_coordinates(c: Sequence[int], ring: ExactRing, level: int) -> WittVector:
    _carrier_ring(ring)
    w = ghost_solve(_ghost_from_coords(c, level), ZZ, level)
    return w if isinstance(ring, IntegerRing) else _reduce(w, ring)


_group_cache: dict = {}


def witt_group(ring: ExactRing, level: int) -> FGAbelianGroup:
    """The additive group of ``W_<level>(ring)`` on unit-vector coordinates.

    Over ``Z/n`` the relations are the coordinates of ``V_d[n t]`` for
    ``0 <= t <= level/d``, which span the kernel of reduction mod n.
    """
    ring = _carrier_ring(ring)
    ds = divisors(level)
    if isinstance(ring, IntegerRing):
        return FGAbelianGroup.free(len(ds))
    key = (ring.n, level)
    with _poly_lock:
        g = _group_cache.get(key)
        if g is not None:
            return g
    n = ring.n
    rows = []
    for d in ds:
        for t in range(1, level // d + 1):
            z = [d * (n * t) ** (k // d) if k % d == 0 else 0 for k in ds]
            rows.append(_coords_from_ghost(z, level))
    order = n ** len(ds)
    basis = lattice_basis(rows, len(ds), modulus=order)
    g = FGAbelianGroup(len(ds), basis)
    if g.order() != order:
        raise AssertionError(f"W_<{level}>(Z/{n}) came out with order {g.order()}")
    with _poly_lock:
        _group_cache[key] = g
    return g


def _frobenius_coords(m: int, p: int) -> list[list[int]]:
    """Columns of F_{m|mp} on unit-vector coordinates."""
    n = m * p
    cols = []
    for d in divisors(n):
        z = [d if (k * p) % d == 0 else 0 for k in divisors(m)]
        cols.append(list(_coords_from_ghost(z, m)))
    return cols


def _verschiebung_coords(m: int, p: int) -> list[list[int]]:
    tgt = divisors(m * p)
    return [[int(t == d * p) for t in tgt] for d in divisors(m)]


def witt_mackey_rule(ring: ExactRing) -> MackeyRule:
    """The unbounded Witt Mackey functor: push is V, pull is F."""
    ring = _carrier_ring(ring)
    group = lambda m: witt_group(ring, m)
    rule = MackeyRule(
        group,
        lambda m, p: GroupMorphism(rule.group(m), rule.group(m * p),
                                   Matrix.from_columns(_verschiebung_coords(m, p), len(divisors(m * p)))),
        lambda m, p: GroupMorphism(rule.group(m * p), rule.group(m),
                                   Matrix.from_columns(_frobenius_coords(m, p), len(divisors(m)))),
        name=f"witt[{ring.tag}]",
    )
    rule.ring = ring
    return rule


def witt_mackey(ring: ExactRing, bound: int | None = None):
    """Witt vectors as a Mackey functor; a rule when ``bound`` is None."""
    if isinstance(ring, str):
        ring = ring_from_tag(ring)
    try:
        rule = witt_mackey_rule(ring)
    except UnsupportedRing:
        if bound is not None:
            raise
        return _abstract_witt_rule(ring)
    if bound is None:
        return rule
    data = rule.truncate(bound)
    data.name = rule.name
    data.ring = ring
    return data


class _AbstractWittRule:
    """Rule-form Witt functor over rings without a finite presentation."""

    def __init__(self, ring):
        self.ring = ring
        self.name = f"witt[{ring.tag}]"

    def carrier(self, m):
        return ("W", m, self.ring.tag)

    def push(self, m, n):
        return lambda w: verschiebung(w, n)

    def pull(self, m, n):
        return lambda w: frobenius(w, m)


def _abstract_witt_rule(ring):
    return _AbstractWittRule(ring)


# -- Burnside ring comparison -----------------------------------------------------


def fixed_point_ghost(level: int, n: int) -> list[int]:
    """Ghost of the orbit ``[n]``: ``z_k = |<n>^{C_{m/k}}|``."""
    return [level // n if n % (level // k) == 0 else 0 for k in divisors(level)]


def dress_siebeneicher(x: BurnsideElement) -> WittVector:
    """The ring isomorphism from the Burnside ring of C_m to ``W_<m>(Z)``."""
    m = x.level
    z = [0] * len(divisors(m))
    for n, c in x.coeffs:
        if c:
            z = [a + c * b for a, b in zip(z, fixed_point_ghost(m, n))]
    return ghost_solve(z, ZZ, m)


def dress_siebeneicher_morphism(level: int) -> GroupMorphism:
    """The additive map from the Burnside group to unit-vector coordinates."""
    ds = divisors(level)
    cols = [witt_coordinates(dress_siebeneicher(BurnsideElement.orbit(level, n))) for n in ds]
    g = FGAbelianGroup.free(len(ds))
    return GroupMorphism(g, witt_group(ZZ, level), Matrix.from_columns(cols, len(ds)))
