"""Exact commutative rings used as Witt vector coefficients.

Elements are plain Python values (``int``, ``Fraction``) or :class:`Poly`;
the ring object carries the operations.  Ring tags: ``Z``, ``Zmod:<n>``,
``Q``, ``PolyZ:<vars>``, ``PolyQ:<vars>`` with comma-separated variables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

__all__ = [
    "ExactRing",
    "IntegerRing",
    "IntegerModRing",
    "RationalField",
    "PolynomialRing",
    "Poly",
    "ZZ",
    "QQ",
    "ring_from_tag",
    "NotDivisible",
]


class NotDivisible(ArithmeticError):
    """An exact division by an integer has no (unique) solution."""


class ExactRing:
    tag = "?"
    torsion_free = True
    characteristic = 0

    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, e: int):
        return a ** e

    def from_int(self, k: int):
        return k

    def scalar(self, k: int, a):
        return self.mul(self.from_int(k), a)

    def exact_div(self, a, k: int):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero)

    def eq(self, a, b) -> bool:
        return a == b

    def coerce(self, a):
        return a

    def encode(self, a):
        return a

    def decode(self, doc):
        return self.coerce(doc)

    def lift(self, a) -> int:
        """An integer representative (rings generated by 1 only)."""
        raise TypeError(f"{self.tag} elements have no integer lift")

    def __eq__(self, other):
        return isinstance(other, ExactRing) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"<ring {self.tag}>"


class IntegerRing(ExactRing):
    tag = "Z"

    def coerce(self, a):
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise ValueError(f"{a} is not an integer")
            return a.numerator
        return int(a)

    def exact_div(self, a, k):
        q, r = divmod(a, k)
        if r:
            raise NotDivisible(f"{a} is not divisible by {k}")
        return q

    def lift(self, a):
        return a


class IntegerModRing(ExactRing):
    torsion_free = False

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("modulus must be positive")
        self.n = n
        self.tag = f"Zmod:{n}"
        self.characteristic = n
        self.zero = 0
        self.one = 1 % n

    def add(self, a, b):
        return (a + b) % self.n

    def sub(self, a, b):
        return (a - b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def pow(self, a, e):
        return pow(a, e, self.n)

    def from_int(self, k):
        return k % self.n

    def coerce(self, a):
        return int(a) % self.n

    def exact_div(self, a, k):
        import math

        if math.gcd(k, self.n) != 1:
            raise NotDivisible(f"division by {k} is ambiguous in Z/{self.n}")
        return (a * pow(k, -1, self.n)) % self.n

    def lift(self, a):
        return a


class RationalField(ExactRing):
    tag = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, k):
        return Fraction(k)

    def coerce(self, a):
        if isinstance(a, str):
            return Fraction(a)
        return Fraction(a)

    def exact_div(self, a, k):
        return a / k

    def encode(self, a):
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


ZZ = IntegerRing()
QQ = RationalField()


class Poly:
    """Sparse polynomial: ``{exponent tuple: coefficient}`` over fixed variables."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: "PolynomialRing", terms: dict):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c}

    def _wrap(self, other):
        if isinstance(other, Poly):
            return other
        return self.ring.constant(other)

    def __add__(self, other):
        other = self._wrap(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.ring, {m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._wrap(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_integral(self) -> bool:
        return all(isinstance(c, int) or c.denominator == 1 for c in self.terms.values())

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def evaluate(self, values: Sequence, ring: ExactRing):
        """Substitute ``values`` (one per variable) computed in ``ring``."""
        total = ring.zero
        cache: dict = {}
        for mono, c in self.terms.items():
            c = Fraction(c)
            term = ring.from_int(c.numerator)
            if c.denominator != 1:
                term = ring.exact_div(term, c.denominator)
            for i, e in enumerate(mono):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = ring.pow(values[i], e)
                    term = ring.mul(term, cache[key])
            total = ring.add(total, term)
        return total

    def __repr__(self):
        return f"Poly({self.ring.format(self)})"


class PolynomialRing(ExactRing):
    def __init__(self, variables: Sequence[str], base: str = "Z"):
        if base not in ("Z", "Q"):
            raise ValueError("polynomial coefficients must be Z or Q")
        self.variables = tuple(variables)
        self.base = base
        self.tag = f"Poly{base}:{','.join(self.variables)}"
        self._index = {v: i for i, v in enumerate(self.variables)}
        n = len(self.variables)
        self.zero = Poly(self, {})
        self.one = Poly(self, {(0,) * n: 1})

    def gen(self, name: str) -> Poly:
        e = [0] * len(self.variables)
        e[self._index[name]] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self):
        return [self.gen(v) for v in self.variables]

    def constant(self, c) -> Poly:
        if self.base == "Q":
            c = Fraction(c)
        return Poly(self, {(0,) * len(self.variables): c})

    def from_int(self, k):
        return self.constant(k)

    def coerce(self, a):
        if isinstance(a, Poly):
            if a.ring.variables == self.variables:
                return Poly(self, dict(a.terms))
            return self._remap(a)
        if isinstance(a, dict):
            return self.decode(a)
        return self.constant(a)

    def _remap(self, a: Poly) -> Poly:
        out = {}
        for mono, c in a.terms.items():
            e = [0] * len(self.variables)
            for v, k in zip(a.ring.variables, mono):
                if k:
                    e[self._index[v]] = k
            out[tuple(e)] = c
        return Poly(self, out)

    def pow(self, a, e):
        return a ** e

    def exact_div(self, a: Poly, k: int) -> Poly:
        if self.base == "Q":
            return Poly(self, {m: Fraction(c) / k for m, c in a.terms.items()})
        out = {}
        for m, c in a.terms.items():
            q, r = divmod(c, k)
            if r:
                raise NotDivisible(f"coefficient {c} is not divisible by {k}")
            out[m] = q
        return Poly(self, out)

    def eq(self, a, b):
        return a.terms == b.terms

    def format(self, p: Poly) -> str:
        if not p.terms:
            return "0"
        parts = []
        for mono, c in sorted(p.terms.items(), reverse=True):
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, mono) if e]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def encode(self, p: Poly):
        """Sparse monomial map: ``{"x1^2*y2": c}`` with ``"1"`` for constants."""
        out = {}
        for mono, c in p.terms.items():
            key = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, mono) if e)
            c = Fraction(c)
            out[key or "1"] = c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return dict(sorted(out.items()))

    def decode(self, doc) -> Poly:
        if isinstance(doc, Poly):
            return self.coerce(doc)
        if not isinstance(doc, dict):
            return self.constant(Fraction(doc) if self.base == "Q" else int(doc))
        out = {}
        for key, c in doc.items():
            e = [0] * len(self.variables)
            if key != "1":
                for factor in key.split("*"):
                    name, _, power = factor.partition("^")
                    e[self._index[name]] += int(power) if power else 1
            c = Fraction(c) if self.base == "Q" else int(c)
            out[tuple(e)] = out.get(tuple(e), 0) + c
        return Poly(self, out)


def ring_from_tag(tag: str) -> ExactRing:
    tag = tag.strip()
    if tag == "Z":
        return ZZ
    if tag == "Q":
        return QQ
    if tag.startswith("Zmod:"):
        return IntegerModRing(int(tag[5:]))
    if tag.startswith("PolyZ:") or tag.startswith("PolyQ:"):
        names = [v.strip() for v in tag[6:].split(",") if v.strip()]
        if not names:
            raise ValueError("polynomial ring needs at least one variable")
        return PolynomialRing(names, tag[4])
    raise ValueError(f"unknown ring tag {tag!r}")
