"""Geometric fixed points, recollement, cyclotomic structures and twisted maps.

For a prime p and ``n = a p^v`` with p not dividing a, the geometric fixed
points are ``(Phi^p X)<n> = X<pn> / push(X<a>)``.  A cyclotomic structure is
a family of isomorphisms ``r_p<n>: X<n> -> (Phi^p X)<n>`` compatible with
push, pull and each other; it induces restriction maps ``rho_{m|n}``.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .abgrp import (FGAbelianGroup, GroupMorphism, Matrix, NotWellDefined, cokernel,
                    induced_on_quotient, is_isomorphism, kernel, subgroup_contains)
from .cyclonic import (LevelMismatch, NotDivisor, Orbit, OrbitMap, compose_orbit_maps,
                       format_rational, identity_map, intertwiners, iota, iota_cell)
from .mackey import (MackeyFunctor, MackeyReport, j_lower_shriek, j_upper_star,
                     mackey_morphism_failures, validate_mackey)
from .rings import ExactRing, ring_from_tag
from .supernat import divisors, prime_factors, prime_to_part
from .witt import witt_group, witt_mackey_rule

__all__ = [
    "GeometricFixedPoints",
    "geometric_fixed_points",
    "recollement_check",
    "CyclotomicData",
    "verify_cyclotomic",
    "derived_restriction",
    "derived_restrictions",
    "witt_cyclotomic",
    "witt_truncation",
    "TwistedMorphism",
    "twisted_compose",
    "twisted_cell_compose",
    "twisted_cell_audit",
    "CELL_FORMULAS",
    "PAPER_CELL_FORMULA",
]


class GeometricFixedPoints(MackeyFunctor):
    """``Phi^{C_p}`` of a Mackey functor, computed lazily level by level."""

    def __init__(self, base: MackeyFunctor, p: int):
        super().__init__()
        self.base = base
        self.p = p
        self.name = f"Phi{p}({getattr(base, 'name', '')})"
        self._quotients: dict = {}

    def has_level(self, n: int) -> bool:
        return self.base.has_level(n * self.p)

    def levels(self, bound=None):
        if bound is None:
            bound = self.base.bound // self.p
        return [m for m in divisors(bound) if self.has_level(m)]

    def quotient(self, n: int):
        """``(Q, q)`` with ``q: X<pn> -> Q`` the canonical projection."""
        self._require(n)
        hit = self._quotients.get(n)
        if hit is None:
            a = prime_to_part(n, self.p)
            hit = cokernel(self.base.push(a, n * self.p))
            with self._lock:
                hit = self._quotients.setdefault(n, hit)
        return hit

    def projection(self, n: int) -> GroupMorphism:
        return self.quotient(n)[1]

    def _group(self, n):
        return self.quotient(n)[0]

    def _push_step(self, m, q):
        p = self.p
        return induced_on_quotient(self.base.push(p * m, p * m * q),
                                   self.projection(m), self.projection(m * q))

    def _pull_step(self, m, q):
        p = self.p
        return induced_on_quotient(self.base.pull(p * m, p * m * q),
                                   self.projection(m * q), self.projection(m))


def geometric_fixed_points(d: MackeyFunctor, p: int) -> GeometricFixedPoints:
    return GeometricFixedPoints(d, p)


# -- recollement -------------------------------------------------------------------


def _coverings(levels):
    level_set = set(levels)
    top = max(levels)
    for m in levels:
        for q in sorted(set(prime_factors(top // m))):
            if m * q in level_set:
                yield m, m * q


def recollement_check(d: MackeyFunctor, p: int, bound: int | None = None) -> MackeyReport:
    """Right exactness of ``j_! j^* X -> X -> i_* Phi^p X -> 0`` at every level.

    Violations carry the level (or covering pair), the failing check and a
    witness vector or matrix difference.
    """
    bound = bound if bound is not None else d.bound
    levels = [n for n in divisors(bound) if d.has_level(n)]
    report = MackeyReport()
    lower = j_lower_shriek(j_upper_star(d, p, bound), p, bound)
    inner = validate_mackey(lower, bound)
    report.checked += inner.checked
    for v in inner.violations:
        report.violations.append({"check": "j_!j^* Mackey", **v})

    lam = {n: d.push(prime_to_part(n, p), n) for n in levels}
    quotients = {n: cokernel(lam[n]) for n in levels}
    for v in mackey_morphism_failures(lam, lower, d, levels):
        report.violations.append({"check": f"lambda {v['check']}", "pair": v["pair"],
                                  "difference": v["difference"]})
    report.checked += 2 * sum(1 for _ in _coverings(levels))

    for m, n in _coverings(levels):
        for kind, f, qs, qt in (("push", d.push(m, n), quotients[m], quotients[n]),
                                ("pull", d.pull(m, n), quotients[n], quotients[m])):
            try:
                induced_on_quotient(f, qs[1], qt[1])
            except NotWellDefined as exc:
                report.violations.append({"check": f"quotient {kind}", "pair": [m, n],
                                          "witness": list(exc.generator)})
        report.checked += 2

    for n in levels:
        f, (qgrp, q) = lam[n], quotients[n]
        report.checked += 1
        comp = q @ f
        if not comp.is_zero():
            report.violations.append({"check": "composite zero", "level": n,
                                      "difference": comp.matrix.to_list()})
            continue
        _, inc = kernel(q)
        cols = f.matrix.columns()
        for c in inc.matrix.columns():
            if not subgroup_contains(d.group(n), cols, c):
                report.violations.append({"check": "kernel in image", "level": n,
                                          "witness": list(c)})
                break
        for j in range(qgrp.ngens):
            e = [int(i == j) for i in range(qgrp.ngens)]
            if not subgroup_contains(qgrp, q.matrix.columns(), e):
                report.violations.append({"check": "surjective", "level": n, "witness": e})
                break
    return report


# -- cyclotomic structures -----------------------------------------------------------


@dataclass
class CyclotomicData:
    """A Mackey functor with structure isomorphisms ``r_p`` for a set of primes.

    ``structure(p, n)`` returns ``r_p<n>: X<n> -> Phi^p X<n>``, targeting the
    canonical carrier of ``phi(p).group(n)``.
    """

    base: MackeyFunctor
    primes: tuple
    structure: object
    name: str = ""
    _phi: dict = field(default_factory=dict, repr=False)
    _r: dict = field(default_factory=dict, repr=False)
    _inv: dict = field(default_factory=dict, repr=False)
    _lock: object = field(default_factory=threading.Lock, repr=False)

    def phi(self, p: int) -> GeometricFixedPoints:
        if p not in self.primes:
            raise ValueError(f"prime {p} is not in the structure's prime set")
        with self._lock:
            if p not in self._phi:
                self._phi[p] = GeometricFixedPoints(self.base, p)
            return self._phi[p]

    def r(self, p: int, n: int) -> GroupMorphism:
        key = (p, n)
        f = self._r.get(key)
        if f is None:
            f = self.structure(self, p, n)
            with self._lock:
                f = self._r.setdefault(key, f)
        return f

    def r_inverse(self, p: int, n: int) -> GroupMorphism:
        key = (p, n)
        f = self._inv.get(key)
        if f is None:
            res = is_isomorphism(self.r(p, n))
            if not res.ok:
                raise ArithmeticError(f"r_{p}<{n}> is not invertible: {res.reason}")
            f = res.inverse
            with self._lock:
                f = self._inv.setdefault(key, f)
        return f

    def with_structure(self, override) -> "CyclotomicData":
        """A copy whose ``r`` is ``override(self, p, n)``, or the original map when that is None."""
        original = self

        def structure(_, p, n):
            f = override(original, p, n)
            return original.r(p, n) if f is None else f

        return CyclotomicData(self.base, self.primes, structure, self.name + "'")


def _iterated_quotient(c: CyclotomicData, p1: int, p2: int, n: int):
    """``X<p1 p2 n>`` modulo both transfer images, with its projection."""
    x = c.base
    top = p1 * p2 * n
    cols = (x.push(prime_to_part(p1 * n, p2), top).matrix.columns()
            + x.push(prime_to_part(p2 * n, p1), top).matrix.columns())
    g = x.group(top)
    rel = g.relations.vstack(Matrix(cols, len(cols), g.ngens)) if cols else g.relations
    w, to, _ = FGAbelianGroup(g.ngens, rel).canonical()
    return w, GroupMorphism(g, w, to.matrix, check=False)


def _square_leg(c: CyclotomicData, first: int, second: int, n: int, w_proj):
    """``Phi^first(r_second) o r_first`` at level n, moved into the common quotient."""
    outer = c.phi(first)
    inner = c.phi(second)
    twice = GeometricFixedPoints(inner, first)
    lifted = induced_on_quotient(c.r(second, first * n), outer.projection(n),
                                 twice.projection(n))
    leg = lifted @ c.r(first, n)
    top = first * second * n
    to_top = twice.projection(n) @ inner.projection(first * n)
    ident = GroupMorphism.identity(c.base.group(top))
    iso = induced_on_quotient(ident, to_top, w_proj)
    return iso @ leg


def verify_cyclotomic(c: CyclotomicData, bound: int) -> MackeyReport:
    """Isomorphism, push/pull naturality and prime-pair squares up to ``bound``."""
    report = MackeyReport()
    levels = divisors(bound)
    for p in sorted(c.primes):
        phi = c.phi(p)
        for n in levels:
            report.checked += 1
            res = is_isomorphism(c.r(p, n))
            if not res.ok:
                report.violations.append({"check": "isomorphism", "prime": p, "level": n,
                                          "witness": list(res.witness or ())})
        for m, n in _coverings(levels):
            report.checked += 2
            a = phi.push(m, n) @ c.r(p, m)
            b = c.r(p, n) @ c.base.push(m, n)
            if not a.equals(b):
                report.violations.append({"check": "push", "prime": p, "pair": [m, n],
                                          "difference": a.difference(b)})
            a = phi.pull(m, n) @ c.r(p, n)
            b = c.r(p, m) @ c.base.pull(m, n)
            if not a.equals(b):
                report.violations.append({"check": "pull", "prime": p, "pair": [m, n],
                                          "difference": a.difference(b)})
    for p1, p2 in itertools.combinations(sorted(c.primes), 2):
        for n in levels:
            report.checked += 1
            w, w_proj = _iterated_quotient(c, p1, p2, n)
            try:
                a = _square_leg(c, p1, p2, n, w_proj)
                b = _square_leg(c, p2, p1, n, w_proj)
            except NotWellDefined as exc:
                report.violations.append({"check": "square", "primes": [p1, p2], "level": n,
                                          "witness": list(exc.generator)})
                continue
            if not a.equals(b):
                report.violations.append({"check": "square", "primes": [p1, p2], "level": n,
                                          "difference": a.difference(b)})
    report.violations.sort(key=lambda v: (v.get("level", v.get("pair", [0])[0]),
                                          v.get("prime", 0)))
    return report


def derived_restriction(c: CyclotomicData, m: int, n: int, order=None) -> GroupMorphism:
    """``rho_{m|n}``, composed one prime at a time in ``order`` (default ascending).

    For ``n = mp`` this is ``r_p<m>^{-1}`` after the projection
    ``X<mp> -> Phi^p X<m>``.
    """
    if n % m:
        raise NotDivisor(f"{m} does not divide {n}")
    order = list(order) if order is not None else prime_factors(n // m)
    if sorted(order) != sorted(prime_factors(n // m)):
        raise ValueError(f"{order} is not a factorization of {n // m}")
    f = GroupMorphism.identity(c.base.group(n))
    level = n
    for p in order:
        step = c.r_inverse(p, level // p) @ c.phi(p).projection(level // p)
        f = step @ f
        level //= p
    return f


def derived_restrictions(c: CyclotomicData, m: int, n: int) -> GroupMorphism:
    """``rho_{m|n}``, after checking every prime ordering gives the same map."""
    base = derived_restriction(c, m, n)
    for order in set(itertools.permutations(prime_factors(n // m))):
        other = derived_restriction(c, m, n, order)
        if not other.equals(base):
            raise ArithmeticError(f"rho_{m}|{n} depends on the order {order}")
    return base


def _witt_structure(c: CyclotomicData, p: int, n: int) -> GroupMorphism:
    # e_d at level n goes to e_d at level pn, then to the quotient.
    src, top = divisors(n), divisors(p * n)
    inc = Matrix([[int(t == d) for d in src] for t in top], len(top), len(src))
    proj = c.phi(p).projection(n)
    return GroupMorphism(c.base.group(n), proj.target, proj.matrix @ inc)


def witt_cyclotomic(ring, primes=(2, 3, 5)) -> CyclotomicData:
    """The cyclotomic structure on Witt vectors: ``w`` goes to the class of ``(w, 0)``."""
    if isinstance(ring, str):
        ring = ring_from_tag(ring)
    rule = witt_mackey_rule(ring)
    return CyclotomicData(rule, tuple(sorted(primes)), _witt_structure, f"witt[{ring.tag}]")


def witt_truncation(ring: ExactRing, m: int, n: int) -> GroupMorphism:
    """Component truncation ``W<n> -> W<m>`` on unit-vector coordinates."""
    src, tgt = divisors(n), divisors(m)
    mat = Matrix([[int(t == d) for d in src] for t in tgt], len(tgt), len(src))
    return GroupMorphism(witt_group(ring, n), witt_group(ring, m), mat)


# -- twisted composition ---------------------------------------------------------------


@dataclass(frozen=True)
class TwistedMorphism:
    """``(scale, map)`` from ``<map.source.level / scale>`` to ``<map.target.level>``.

    The underlying map runs out of the source reindexed by ``iota_scale``.
    """

    scale: int
    map: OrbitMap

    def __post_init__(self):
        if self.scale < 1 or self.map.source.level % self.scale:
            raise LevelMismatch(f"scale {self.scale} does not divide the source level "
                                f"{self.map.source.level}")

    @property
    def source_level(self) -> int:
        return self.map.source.level // self.scale

    @property
    def target_level(self) -> int:
        return self.map.target.level

    @classmethod
    def identity(cls, level: int) -> "TwistedMorphism":
        return cls(1, identity_map(Orbit(level)))

    def to_json(self) -> dict:
        return {"scale": self.scale, "map": self.map.to_json()}


def twisted_compose(a: TwistedMorphism, b: TwistedMorphism) -> TwistedMorphism:
    """``b`` after ``a``: ``(n, g) o (m, f) = (nm, g iota_n(f))``."""
    if a.target_level != b.source_level:
        raise LevelMismatch(f"cannot compose through <{a.target_level}> and <{b.source_level}>")
    return TwistedMorphism(a.scale * b.scale, compose_orbit_maps(iota(a.map, b.scale), b.map))


def _cell_b(r, s, m, n):
    return iota_cell(r, n) + s


def _cell_a(r, s, m, n):
    return Fraction(r) / m + s


CELL_FORMULAS = {"r/n + s": _cell_b, "r/m + s": _cell_a}
PAPER_CELL_FORMULA = "r/m + s"


def twisted_cell_compose(a: TwistedMorphism, r, b: TwistedMorphism, s,
                         formula: str = "r/n + s") -> Fraction:
    """Horizontal composite of 2-cells ``r`` on ``a`` and ``s`` on ``b``."""
    return CELL_FORMULAS[formula](Fraction(r), Fraction(s), a.scale, b.scale)


def _shift(t: TwistedMorphism, r) -> TwistedMorphism:
    f = t.map
    return TwistedMorphism(t.scale, OrbitMap(f.source, f.target,
                                             (f.offset + r) % Fraction(1, f.target.level)))


def _audit_data(max_product: int):
    """Composable triples ``<1> -> <m1> -> <m1 m2> -> <m1 m2 m3>`` with offsets and cells."""
    for m1 in range(1, max_product + 1):
        for m2 in range(1, max_product // m1 + 1):
            for m3 in range(1, max_product // (m1 * m2) + 1):
                levels = (m1, m1 * m2, m1 * m2 * m3)
                choices = []
                for scale, tgt in zip((m1, m2, m3), levels):
                    opts = []
                    for j in range(2):
                        off = Fraction(j, 2 * tgt)
                        f = OrbitMap(Orbit(tgt), Orbit(tgt), off)
                        for k in range(2):
                            opts.append((TwistedMorphism(scale, f), Fraction(k, tgt)))
                    choices.append(opts)
                yield from itertools.product(*choices)


def twisted_cell_audit(max_product: int = 24) -> dict:
    """Check each candidate 2-cell rule for associativity and validity.

    A composite cell is valid when it is an intertwiner between the composite
    maps.  The rule that is associative is selected; the report records the
    status of the paper's rule.
    """
    results = {}
    triples = list(_audit_data(max_product))
    for name, rule in CELL_FORMULAS.items():
        assoc_fail = valid_fail = None
        checked = 0
        for (a, r), (b, s), (c, t) in triples:
            checked += 1
            ab, bc = twisted_compose(a, b), twisted_compose(b, c)
            if twisted_compose(ab, c) != twisted_compose(a, bc):
                raise ArithmeticError("underlying twisted composition is not associative")
            left = rule(rule(r, s, a.scale, b.scale), t, ab.scale, c.scale)
            right = rule(r, rule(s, t, b.scale, c.scale), a.scale, bc.scale)
            if assoc_fail is None and left != right:
                assoc_fail = {"scales": [a.scale, b.scale, c.scale],
                              "cells": [format_rational(x) for x in (r, s, t)],
                              "left": format_rational(left), "right": format_rational(right)}
            cell = rule(r, s, a.scale, b.scale)
            moved = twisted_compose(_shift(a, r), _shift(b, s))
            if valid_fail is None and cell not in intertwiners(ab.map, moved.map):
                valid_fail = {"scales": [a.scale, b.scale],
                              "cells": [format_rational(r), format_rational(s)],
                              "composite": format_rational(cell)}
        results[name] = {"associative": assoc_fail is None, "valid": valid_fail is None,
                         "checked": checked, "associativity_witness": assoc_fail,
                         "validity_witness": valid_fail}
    good = [n for n, v in results.items() if v["associative"]]
    unit_ok = all(twisted_compose(TwistedMorphism.identity(a.source_level), a) == a
                  and twisted_compose(a, TwistedMorphism.identity(a.target_level)) == a
                  for (a, _), _, _ in triples)
    return {
        "candidates": results,
        "selected": good[0] if len(good) == 1 else None,
        "unique": len(good) == 1,
        "unital": unit_ok,
        "paper_formula": PAPER_CELL_FORMULA,
        "paper_formula_associative": results[PAPER_CELL_FORMULA]["associative"],
    }
