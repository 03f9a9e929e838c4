import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cyclone.burnside import (BurnsideElement, HMorphism, Span, basic_span,
                              compose_h, compose_spans, dual, identity_span, span_aut_group,
                              span_class)
from cyclone.cyclonic import LevelMismatch, NotDivisor, Orbit
from cyclone.supernat import divisors
from oracles import brute_orbit_product, brute_pullback, fixed_points


def test_span_class_examples():
    assert span_class(basic_span(4, 6, 2)) == HMorphism.basis(4, 6, 2)
    assert span_class(Span(Orbit(4), Orbit(6))) == HMorphism.zero(4, 6)
    two = basic_span(4, 6, 1).apexes + basic_span(4, 6, 2).apexes
    assert span_class(Span(Orbit(4), Orbit(6), two)) == HMorphism(4, 6, {1: 1, 2: 1})
    with pytest.raises(NotDivisor):
        basic_span(4, 6, 4)


def test_compose_examples():
    s = basic_span(6, 12, 3)
    assert span_class(compose_spans(identity_span(6), s)) == span_class(s)
    there, back = basic_span(2, 4, 2), basic_span(4, 2, 2)
    assert span_class(compose_spans(there, back)) == 2 * HMorphism.identity(2)
    e2 = HMorphism.basis(2, 4, 2)
    assert compose_h(e2, HMorphism.basis(4, 2, 2)) == 2 * HMorphism.basis(2, 2, 2)
    assert compose_h(HMorphism.basis(2, 6, 2), HMorphism.basis(6, 3, 3)) == HMorphism.basis(2, 3, 1)
    assert compose_h(e2, HMorphism.zero(4, 8)).terms() == []
    with pytest.raises(LevelMismatch):
        compose_h(e2, e2)


def test_burnside_mul_examples():
    x = BurnsideElement(12, {1: 3, 4: -2})
    assert BurnsideElement.one(12) * x == x
    assert BurnsideElement.orbit(4, 2) * BurnsideElement.orbit(4, 2) == BurnsideElement(4, {2: 2})
    assert BurnsideElement.orbit(6, 2) * BurnsideElement.orbit(6, 3) == BurnsideElement.orbit(6, 1)


def test_span_aut_examples():
    assert span_aut_group(2, 3, 1).generator == Fraction(1, 6)
    assert span_aut_group(5, 5, 5).generator == Fraction(1, 5)
    assert span_aut_group(4, 6, 2).generator == Fraction(1, 12)
    with pytest.raises(NotDivisor):
        span_aut_group(4, 6, 4)


def test_span_aut_generator_by_enumeration():
    # the smallest positive s - t with s in (1/m)Z, t in (1/n)Z
    for m, n in itertools.product(range(1, 13), repeat=2):
        vals = {Fraction(a, m) - Fraction(b, n) for a in range(-m, m + 1) for b in range(-n, n + 1)}
        assert min(v for v in vals if v > 0) == span_aut_group(m, n, 1).generator


def test_dual_examples():
    h = HMorphism(4, 6, {1: 2, 2: -1})
    assert dual(dual(h)) == h
    assert dual(HMorphism.basis(4, 6, 2)) == HMorphism.basis(6, 4, 2)
    assert dual(HMorphism.identity(3)) == HMorphism.identity(3)


def test_burnside_mul_matches_orbit_enumeration():
    for m in range(1, 61):
        for k, l in itertools.product(divisors(m), repeat=2):
            prod = BurnsideElement.orbit(m, k) * BurnsideElement.orbit(m, l)
            assert Counter({d: c for d, c in prod.coeffs if c}) == brute_orbit_product(k, l, m)


def test_burnside_ring_laws():
    for m in range(1, 61):
        ds = divisors(m)
        basis = [BurnsideElement.orbit(m, d) for d in ds]
        for x, y in itertools.product(basis, repeat=2):
            assert x * y == y * x
            assert all(c >= 0 for _, c in (x * y).coeffs)
        if m in (12, 30, 60):
            for x, y, z in itertools.product(basis, repeat=3):
                assert (x * y) * z == x * (y * z)
        for x in basis:
            assert BurnsideElement.one(m) * x == x


def test_marks_are_ring_homomorphism():
    # |(X x Y)^H| = |X^H| |Y^H| by enumeration
    for m in (12, 18, 30):
        ds = divisors(m)
        for k, l in itertools.product(ds, repeat=2):
            prod = BurnsideElement.orbit(m, k) * BurnsideElement.orbit(m, l)
            for h in ds:
                lhs = sum(c * fixed_points(m, d, h) for d, c in prod.coeffs)
                assert lhs == fixed_points(m, k, h) * fixed_points(m, l, h)


def test_compose_h_associative_up_to_60():
    ds = divisors(60)
    for a, b, c, d in itertools.product(ds, repeat=4):
        for k in divisors(math.gcd(a, b)):
            h1 = HMorphism.basis(a, b, k)
            for l in divisors(math.gcd(b, c))[::3]:
                h2 = HMorphism.basis(b, c, l)
                h3 = HMorphism.basis(c, d, divisors(math.gcd(c, d))[-1])
                assert compose_h(compose_h(h1, h2), h3) == compose_h(h1, compose_h(h2, h3))


def random_span(rng, m, n):
    g = math.gcd(m, n)
    apexes = []
    for _ in range(rng.randrange(0, 3)):
        k = rng.choice(divisors(g))
        apexes += basic_span(m, n, k, left=Fraction(rng.randrange(24), 24),
                             right=Fraction(rng.randrange(24), 24)).apexes
    return Span(Orbit(m), Orbit(n), tuple(apexes))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_span_composition_matches_classes(seed):
    rng = random.Random(seed)
    a, b, c = (rng.choice(divisors(24)) for _ in range(3))
    s, t = random_span(rng, a, b), random_span(rng, b, c)
    st_ = compose_spans(s, t)
    assert span_class(st_) == compose_h(span_class(s), span_class(t))
    # per pair of apexes, the pullback agrees with brute enumeration in C_24
    for (x, _, xr), (y, yl, _) in itertools.product(s.apexes, t.apexes):
        levels = brute_pullback(x.level, xr.offset, y.level, yl.offset, b, 24)
        assert Counter(levels) == Counter({math.gcd(x.level, y.level): b // math.lcm(x.level, y.level)})


def test_mackey_condition_instance():
    for n in divisors(24):
        for m, m2 in itertools.product(divisors(n), repeat=2):
            h = compose_h(HMorphism.basis(m, n, m), HMorphism.basis(n, m2, m2))
            assert h == (n // math.lcm(m, m2)) * HMorphism.basis(m, m2, math.gcd(m, m2))
            assert sum(brute_orbit_product(m, m2, n).values()) == n // math.lcm(m, m2)
