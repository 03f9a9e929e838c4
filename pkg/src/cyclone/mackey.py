"""Cyclonic Mackey functors valued in finitely generated abelian groups.

A Mackey functor over the divisibility poset assigns a group ``X<m>`` to each
level and, for ``m | n``, a push (transfer) ``X<m> -> X<n>`` and a pull
``X<n> -> X<m>``.  Only prime-ratio steps are stored; general maps are
composed along the prime factorization of ``n / m`` in ascending order.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from .abgrp import FGAbelianGroup, GroupMorphism, Matrix
from .burnside import HMorphism
from .supernat import divisors, prime_factors, prime_to_part

__all__ = [
    "OutOfBound",
    "MackeyFunctor",
    "MackeyData",
    "MackeyRule",
    "MackeyReport",
    "validate_mackey",
    "burnside_mackey",
    "eval_h",
    "j_lower_shriek",
    "j_upper_star",
    "twist",
    "mackey_morphism_failures",
]


class OutOfBound(ValueError):
    pass


class MackeyFunctor:
    """Shared machinery: derived maps from prime-ratio steps, with memoization."""

    def __init__(self):
        self._lock = threading.Lock()
        self._push_cache: dict = {}
        self._pull_cache: dict = {}
        self._group_cache: dict = {}

    # subclasses provide these three plus has_level
    def _group(self, m: int) -> FGAbelianGroup:
        raise NotImplementedError

    def _push_step(self, m: int, p: int) -> GroupMorphism:
        raise NotImplementedError

    def _pull_step(self, m: int, p: int) -> GroupMorphism:
        raise NotImplementedError

    def has_level(self, m: int) -> bool:
        raise NotImplementedError

    def _require(self, *levels):
        for m in levels:
            if not self.has_level(m):
                raise OutOfBound(f"level {m} is not available")

    def group(self, m: int) -> FGAbelianGroup:
        self._require(m)
        g = self._group_cache.get(m)
        if g is None:
            g = self._group(m)
            with self._lock:
                g = self._group_cache.setdefault(m, g)
        return g

    def push_step(self, m: int, p: int) -> GroupMorphism:
        return self.push(m, m * p)

    def pull_step(self, m: int, p: int) -> GroupMorphism:
        return self.pull(m, m * p)

    def push(self, m: int, n: int) -> GroupMorphism:
        """``X<m> -> X<n>``."""
        if n % m:
            raise ValueError(f"{m} does not divide {n}")
        self._require(m, n)
        key = (m, n)
        f = self._push_cache.get(key)
        if f is not None:
            return f
        if m == n:
            f = GroupMorphism.identity(self.group(m))
        else:
            primes = prime_factors(n // m)
            p = primes[-1]
            f = self._push_step(n // p, p) @ self.push(m, n // p)
        with self._lock:
            return self._push_cache.setdefault(key, f)

    def pull(self, m: int, n: int) -> GroupMorphism:
        """``X<n> -> X<m>``."""
        if n % m:
            raise ValueError(f"{m} does not divide {n}")
        self._require(m, n)
        key = (m, n)
        f = self._pull_cache.get(key)
        if f is not None:
            return f
        if m == n:
            f = GroupMorphism.identity(self.group(m))
        else:
            primes = prime_factors(n // m)
            p = primes[-1]
            f = self.pull(m, n // p) @ self._pull_step(n // p, p)
        with self._lock:
            return self._pull_cache.setdefault(key, f)

    def levels(self, bound: int | None = None) -> list[int]:
        raise NotImplementedError

    def truncate(self, bound: int) -> "MackeyData":
        levels = divisors(bound)
        push, pull = {}, {}
        for m in levels:
            for p in sorted(set(prime_factors(bound // m))):
                push[m, m * p] = self._push_step(m, p)
                pull[m, m * p] = self._pull_step(m, p)
        return MackeyData(bound, {m: self.group(m) for m in levels}, push, pull)


class MackeyData(MackeyFunctor):
    """Mackey data on the divisors of ``bound`` with stored covering maps."""

    def __init__(self, bound: int, groups: dict, push: dict, pull: dict, name: str = ""):
        super().__init__()
        self.bound = bound
        self.name = name
        self._levels = [m for m in divisors(bound) if m in groups] if groups else []
        self.groups = dict(groups)
        self.push_steps = dict(push)
        self.pull_steps = dict(pull)
        for (m, n), f in list(push.items()) + list(pull.items()):
            if n % m or len(prime_factors(n // m)) != 1:
                raise ValueError(f"{m}|{n} is not a covering pair")

    def has_level(self, m: int) -> bool:
        return m in self.groups

    def levels(self, bound=None):
        return [m for m in self._levels if bound is None or m <= bound]

    def _group(self, m):
        return self.groups[m]

    def _push_step(self, m, p):
        try:
            return self.push_steps[m, m * p]
        except KeyError:
            raise OutOfBound(f"no push stored for {m}|{m * p}") from None

    def _pull_step(self, m, p):
        try:
            return self.pull_steps[m, m * p]
        except KeyError:
            raise OutOfBound(f"no pull stored for {m}|{m * p}") from None

    def replace(self, push=None, pull=None, groups=None) -> "MackeyData":
        """A copy with some covering maps or groups replaced."""
        return MackeyData(self.bound, {**self.groups, **(groups or {})},
                          {**self.push_steps, **(push or {})},
                          {**self.pull_steps, **(pull or {})}, self.name)

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "groups": {str(m): g.to_json(presented=True) for m, g in sorted(self.groups.items())},
            "push": {f"{m}|{n}": f.matrix.to_list() for (m, n), f in sorted(self.push_steps.items())},
            "pull": {f"{m}|{n}": f.matrix.to_list() for (m, n), f in sorted(self.pull_steps.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MackeyData":
        bound = int(doc["bound"])
        groups = {int(m): FGAbelianGroup.from_json(g) for m, g in doc["groups"].items()}

        def maps(key, forward):
            out = {}
            for pair, mat in doc.get(key, {}).items():
                m, n = (int(x) for x in pair.split("|"))
                src, tgt = (groups[m], groups[n]) if forward else (groups[n], groups[m])
                out[m, n] = GroupMorphism(src, tgt, Matrix(mat, tgt.ngens, src.ngens))
            return out

        return cls(bound, groups, maps("push", True), maps("pull", False))


class MackeyRule(MackeyFunctor):
    """Mackey data computed on demand for any level accepted by ``domain``."""

    def __init__(self, group, push_step, pull_step, domain=None, name: str = ""):
        super().__init__()
        self._group_fn = group
        self._push_fn = push_step
        self._pull_fn = pull_step
        self._domain = domain or (lambda m: m >= 1)
        self.name = name

    def has_level(self, m):
        return self._domain(m)

    def levels(self, bound=None):
        if bound is None:
            raise ValueError("a rule needs an explicit bound to enumerate levels")
        return [m for m in divisors(bound) if self.has_level(m)]

    def _group(self, m):
        return self._group_fn(m)

    def _push_step(self, m, p):
        key = ("push", m, p)
        f = self._group_cache.get(key)
        if f is None:
            f = self._push_fn(m, p)
            with self._lock:
                f = self._group_cache.setdefault(key, f)
        return f

    def _pull_step(self, m, p):
        key = ("pull", m, p)
        f = self._group_cache.get(key)
        if f is None:
            f = self._pull_fn(m, p)
            with self._lock:
                f = self._group_cache.setdefault(key, f)
        return f


@dataclass
class MackeyReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"pass": self.ok, "checked": self.checked, "violations": self.violations}


def validate_mackey(d: MackeyFunctor, bound: int | None = None) -> MackeyReport:
    """Check transitivity and the double coset identity on all levels.

    Transitivity is checked on every chain ``u | v | w``; the double coset
    identity ``pull(l,m) push(k,m) == (m / lcm(k,l)) push(g,l) pull(g,k)``
    for all ``k, l | m`` with ``g = gcd(k, l)``.
    """
    if bound is None:
        bound = d.bound
    levels = d.levels(bound)
    report = MackeyReport()
    level_set = set(levels)
    for u in levels:
        for v in levels:
            if v % u:
                continue
            for w in levels:
                if w % v:
                    continue
                report.checked += 2
                lhs, rhs = d.push(v, w) @ d.push(u, v), d.push(u, w)
                if not lhs.equals(rhs):
                    report.violations.append({"identity": "push transitivity", "triple": [u, v, w],
                                              "difference": lhs.difference(rhs)})
                lhs, rhs = d.pull(u, v) @ d.pull(v, w), d.pull(u, w)
                if not lhs.equals(rhs):
                    report.violations.append({"identity": "pull transitivity", "triple": [u, v, w],
                                              "difference": lhs.difference(rhs)})
    for m in levels:
        for k in divisors(m):
            for l in divisors(m):
                if k not in level_set or l not in level_set:
                    continue
                g = math.gcd(k, l)
                report.checked += 1
                lhs = d.pull(l, m) @ d.push(k, m)
                rhs = (m // math.lcm(k, l)) * (d.push(g, l) @ d.pull(g, k))
                if not lhs.equals(rhs):
                    report.violations.append({"identity": "double coset", "triple": [k, l, m],
                                              "difference": lhs.difference(rhs)})
    return report


# -- examples -----------------------------------------------------------------


def _burnside_push(m: int, p: int, groups) -> GroupMorphism:
    src, tgt = divisors(m), divisors(m * p)
    cols = [[int(t == k) for t in tgt] for k in src]
    return GroupMorphism(groups(m), groups(m * p), Matrix.from_columns(cols, len(tgt)), check=False)


def _burnside_pull(m: int, p: int, groups) -> GroupMorphism:
    n = m * p
    src, tgt = divisors(n), divisors(m)
    cols = []
    for k in src:
        col = [0] * len(tgt)
        col[tgt.index(math.gcd(m, k))] = n // math.lcm(m, k)
        cols.append(col)
    return GroupMorphism(groups(n), groups(m), Matrix.from_columns(cols, len(tgt)), check=False)


def burnside_mackey(bound: int | None = None):
    """The Burnside Mackey functor: ``X<m>`` free on the divisors of m.

    Push is induction ``[k]_m -> [k]_n``; pull is restriction
    ``[k]_n -> (n / lcm(m, k)) [gcd(m, k)]_m``.  Without a bound the
    unbounded rule is returned.
    """
    groups = lambda m: FGAbelianGroup.free(len(divisors(m)))
    rule = MackeyRule(groups, lambda m, p: _burnside_push(m, p, rule.group),
                      lambda m, p: _burnside_pull(m, p, rule.group), name="burnside")
    if bound is None:
        return rule
    data = rule.truncate(bound)
    data.name = "burnside"
    return data


def eval_h(d: MackeyFunctor, h: HMorphism) -> GroupMorphism:
    """Act by ``[k] -> push(k, tgt) pull(k, src)`` extended additively."""
    for m in (h.src, h.tgt):
        if not d.has_level(m):
            raise OutOfBound(f"level {m} is outside the data")
    total = GroupMorphism.zero(d.group(h.src), d.group(h.tgt))
    for k, c in h.terms():
        total = total + c * (d.push(k, h.tgt) @ d.pull(k, h.src))
    return total


def j_lower_shriek(d: MackeyFunctor, p: int, bound: int) -> MackeyData:
    """Extend data on p-coprime levels to all divisors of ``bound``.

    ``X<n>`` becomes ``X<n(p')>``; a step by p pushes by the identity and
    pulls by multiplication by p; other steps are the original maps.
    """
    levels = divisors(bound)
    groups = {n: d.group(prime_to_part(n, p)) for n in levels}
    push, pull = {}, {}
    for m in levels:
        for q in sorted(set(prime_factors(bound // m))):
            n, a = m * q, prime_to_part(m, p)
            if q == p:
                ident = GroupMorphism.identity(groups[m])
                push[m, n] = ident
                pull[m, n] = p * ident
            else:
                push[m, n] = d.push(a, a * q)
                pull[m, n] = d.pull(a, a * q)
    return MackeyData(bound, groups, push, pull, name=f"j{p}!")


def j_upper_star(d: MackeyFunctor, p: int, bound: int | None = None) -> MackeyData:
    """Restrict to the levels prime to ``p``."""
    if bound is None:
        bound = d.bound
    bound = prime_to_part(bound, p)
    levels = [m for m in divisors(bound) if d.has_level(m)]
    push, pull = {}, {}
    for m in levels:
        for q in sorted(set(prime_factors(bound // m))):
            push[m, m * q] = d.push(m, m * q)
            pull[m, m * q] = d.pull(m, m * q)
    return MackeyData(bound, {m: d.group(m) for m in levels}, push, pull, name=f"j{p}*")


def twist(d: MackeyData, bases: dict) -> MackeyData:
    """Change generators at each level by a unimodular matrix ``B_m``.

    New coordinates are ``B_m x``; relations and covering maps are
    transported accordingly, so the result is isomorphic to ``d``.
    """
    from .abgrp import _unimodular_inverse

    inv = {m: Matrix(_unimodular_inverse(b.to_list()), b.rows, b.cols) for m, b in bases.items()}
    groups = {}
    for m, g in d.groups.items():
        b = bases.get(m, Matrix.identity(g.ngens))
        inv.setdefault(m, Matrix.identity(g.ngens))
        rel = (b @ g.relations.T).T if g.relations.rows else g.relations
        groups[m] = FGAbelianGroup(g.ngens, rel)

    def move(f, m, n):
        b = bases.get(n, Matrix.identity(f.target.ngens))
        return GroupMorphism(groups[m], groups[n], b @ f.matrix @ inv[m])

    push = {(m, n): move(f, m, n) for (m, n), f in d.push_steps.items()}
    pull = {(m, n): move(f, n, m) for (m, n), f in d.pull_steps.items()}
    return MackeyData(d.bound, groups, push, pull, name=d.name + "~")


def mackey_morphism_failures(psi: dict, x: MackeyFunctor, y: MackeyFunctor, levels) -> list:
    """Covering pairs where ``psi`` fails to commute with push or pull."""
    out = []
    level_set = set(levels)
    for m in levels:
        for q in sorted(set(prime_factors(max(levels) // m))) if levels else []:
            n = m * q
            if n not in level_set:
                continue
            a, b = psi[n] @ x.push(m, n), y.push(m, n) @ psi[m]
            if not a.equals(b):
                out.append({"check": "push", "pair": [m, n], "difference": a.difference(b)})
            a, b = psi[m] @ x.pull(m, n), y.pull(m, n) @ psi[n]
            if not a.equals(b):
                out.append({"check": "pull", "pair": [m, n], "difference": a.difference(b)})
    return out
