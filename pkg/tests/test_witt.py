import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cyclone.abgrp import is_isomorphism
from cyclone.burnside import BurnsideElement
from cyclone.mackey import burnside_mackey, validate_mackey
from cyclone.rings import QQ, ZZ, IntegerModRing, PolynomialRing
from cyclone.supernat import divisors
from cyclone.witt import (GhostVector, NonIntegral, TorsionRing, WittVector,
                          dress_siebeneicher, dress_siebeneicher_morphism, fixed_point_ghost,
                          frobenius, frobenius_polys, ghost, ghost_solve, literal_verschiebung,
                          restriction, universal_polys, verschiebung, witt_add,
                          witt_coordinates, witt_from_coordinates, witt_group, witt_mackey,
                          witt_mul, witt_neg)
from oracles import (ds_unique_search, ghost_direct, invariant_order_profile, order_profile,
                     witt_op_mod, witt_sum_level2)


def W(level, comps, ring=ZZ):
    return WittVector(ring, level, tuple(comps))


def rand_witt(rng, level, ring=ZZ, lo=-4, hi=4):
    return W(level, [rng.randint(lo, hi) for _ in divisors(level)], ring)


def test_ghost_examples():
    assert ghost(W(2, (1, 0))).values == (1, 1)
    assert ghost(WittVector.zero(ZZ, 6)).values == (0, 0, 0, 0)
    assert ghost(W(2, (0, 1))).values == (0, 2)


def test_ghost_solve_examples():
    assert ghost_solve((2, 2), ZZ, 2) == W(2, (2, -1))
    assert ghost_solve((1, 1), ZZ, 2) == WittVector.one(ZZ, 2)
    with pytest.raises(NonIntegral) as err:
        ghost_solve((0, 1), ZZ, 2)
    assert err.value.k == 2
    with pytest.raises(TorsionRing):
        ghost_solve((0, 1), IntegerModRing(4), 2)


def test_universal_poly_examples():
    s = universal_polys(2, "sum")
    r = next(iter(s.values())).ring
    x1, x2, y1, y2 = (r.gen(v) for v in ("x1", "x2", "y1", "y2"))
    assert s[1] == x1 + y1
    assert s[2] == x2 + y2 - x1 * y1
    assert universal_polys(2, "product")[1] == x1 * y1


def test_arithmetic_examples():
    assert witt_add(W(2, (1, 0)), W(2, (1, 0))) == W(2, (2, -1))
    z2 = IntegerModRing(2)
    assert witt_add(W(2, (1, 0), z2), W(2, (1, 0), z2)) == W(2, (0, 1), z2)
    rng = random.Random(0)
    for level in (1, 4, 6, 12):
        x = rand_witt(rng, level)
        assert witt_mul(WittVector.one(ZZ, level), x) == x


def test_frobenius_examples():
    r = PolynomialRing(["x1", "x2"])
    w = WittVector(r, 2, tuple(r.gens()))
    x1, x2 = r.gens()
    assert frobenius(w, 1, "poly").components == (x1 ** 2 + 2 * x2,)
    rng = random.Random(1)
    x = rand_witt(rng, 12)
    assert frobenius(x, 12) == x
    for p in (2, 3, 5, 7):
        w = rand_witt(rng, p)
        assert frobenius(w, 1) == W(1, (w.component(1) ** p + p * w.component(p),))
        polys = frobenius_polys(1, p)
        rp = next(iter(polys.values())).ring
        assert polys[1] == rp.gen("x1") ** p + p * rp.gen(f"x{p}")


def test_verschiebung_examples():
    assert verschiebung(W(1, (5,)), 2) == W(2, (0, 5))
    assert frobenius(verschiebung(W(1, (5,)), 2), 1) == W(1, (10,))
    assert verschiebung(WittVector.zero(ZZ, 3), 12) == WittVector.zero(ZZ, 12)


def test_literal_verschiebung_is_not_additive():
    # the extension-by-zero rule: ghost of (w, 0) is (w, w^2), not (0, 2w)
    v = literal_verschiebung(W(1, (1,)), 2)
    assert ghost(v).values == (1, 1)
    lhs = literal_verschiebung(witt_add(W(1, (1,)), W(1, (1,))), 2)
    rhs = witt_add(literal_verschiebung(W(1, (1,)), 2), literal_verschiebung(W(1, (1,)), 2))
    assert lhs != rhs
    assert verschiebung(witt_add(W(1, (1,)), W(1, (1,))), 2) == \
        witt_add(verschiebung(W(1, (1,)), 2), verschiebung(W(1, (1,)), 2))


def test_restriction_examples():
    rng = random.Random(2)
    w = rand_witt(rng, 12)
    assert restriction(W(2, (3, 4)), 1) == W(1, (3,))
    assert restriction(w, 12) == w
    assert restriction(restriction(w, 4), 1) == restriction(w, 1)
    x, y = rand_witt(rng, 2), rand_witt(rng, 2)
    assert restriction(witt_mul(x, y, "poly"), 1) == witt_mul(restriction(x, 1), restriction(y, 1))


def test_witt_mackey_examples():
    w6 = witt_mackey(ZZ, 6)
    assert w6.group(6).canonical_form() == (4, ())
    z2 = IntegerModRing(2)
    w = WittVector(z2, 2, (1, 1))
    assert frobenius(w, 1) == WittVector(z2, 1, (1,))
    assert validate_mackey(witt_mackey(ZZ, 12)).ok
    d = witt_mackey(z2, 2)
    pulled = d.pull(1, 2)(witt_coordinates(w))
    assert witt_from_coordinates(pulled, z2, 1) == WittVector(z2, 1, (1,))


def test_dress_siebeneicher_examples():
    assert dress_siebeneicher(BurnsideElement.one(12)) == WittVector.one(ZZ, 12)
    assert dress_siebeneicher(BurnsideElement.orbit(2, 1)) == W(2, (0, 1))
    x, y = BurnsideElement.orbit(2, 1), BurnsideElement.orbit(2, 2)
    assert dress_siebeneicher(x + y) == witt_add(dress_siebeneicher(x), dress_siebeneicher(y))


# -- properties --------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 24))
def test_ghost_is_ring_homomorphism(seed, level):
    rng = random.Random(seed)
    x, y = rand_witt(rng, level), rand_witt(rng, level)
    gx, gy = ghost(x).values, ghost(y).values
    assert ghost(x).as_dict() == ghost_direct(x.as_dict(), level)
    assert ghost(witt_add(x, y)).values == tuple(a + b for a, b in zip(gx, gy))
    assert ghost(witt_mul(x, y)).values == tuple(a * b for a, b in zip(gx, gy))
    assert ghost_solve(ghost(x)) == x
    assert ghost(witt_neg(x)).values == tuple(-a for a in gx)


def test_ghost_solve_over_rationals_round_trips():
    rng = random.Random(4)
    for level in (6, 8, 12):
        z = GhostVector(QQ, level, tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                                         for _ in divisors(level)))
        assert ghost(ghost_solve(z)) == z


def test_universal_polys_integral_up_to_12():
    for level in range(1, 13):
        for op in ("sum", "product", "negation"):
            polys = universal_polys(level, op)
            assert all(p.is_integral() for p in polys.values())


def test_universal_polys_match_rational_route():
    for level in (4, 6):
        for op in ("sum", "product"):
            a, b = universal_polys(level, op, "Z"), universal_polys(level, op, "Q")
            assert {k: p.ring.encode(p) for k, p in a.items()} == \
                {k: p.ring.encode(p) for k, p in b.items()}


def test_polynomial_and_ghost_routes_agree():
    rng = random.Random(5)
    for level in (2, 4, 6, 8, 12):
        for _ in range(5):
            x, y = rand_witt(rng, level), rand_witt(rng, level)
            assert witt_add(x, y, "poly") == witt_add(x, y, "ghost")
            assert witt_mul(x, y, "poly") == witt_mul(x, y, "ghost")
            for m in divisors(level):
                assert frobenius(x, m, "poly") == frobenius(x, m, "ghost")


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9])
def test_mod_n_routes_agree_with_oracle(n):
    ring = IntegerModRing(n)
    rng = random.Random(n)
    for level in (2, 4, 6):
        for _ in range(10):
            x, y = rand_witt(rng, level, ring, 0, n - 1), rand_witt(rng, level, ring, 0, n - 1)
            s = witt_op_mod(x.components, y.components, level, n, lambda a, b: a + b)
            p = witt_op_mod(x.components, y.components, level, n, lambda a, b: a * b)
            for method in ("lift", "poly"):
                assert witt_add(x, y, method).components == s
                assert witt_mul(x, y, method).components == p
            if level == 2:
                assert s == witt_sum_level2(x.components, y.components, n)


@pytest.mark.parametrize("n,level", [(4, 2), (4, 4), (2, 6), (3, 3), (2, 8), (6, 2)])
def test_witt_group_matches_enumeration(n, level):
    ring = IntegerModRing(n)
    ds = divisors(level)
    elems = list(itertools.product(range(n), repeat=len(ds)))
    add = lambda a, b: witt_op_mod(a, b, level, n, lambda u, v: u + v)
    prof = order_profile(elems, add, (0,) * len(ds))
    g = witt_group(ring, level)
    assert g.rank == 0 and g.order() == n ** len(ds)
    assert prof == invariant_order_profile(list(g.torsion))
    # coordinates are additive
    rng = random.Random(level)
    for _ in range(20):
        a, b = rng.choice(elems), rng.choice(elems)
        ca = witt_coordinates(WittVector(ring, level, a))
        cb = witt_coordinates(WittVector(ring, level, b))
        cs = witt_coordinates(WittVector(ring, level, add(a, b)))
        assert g.equal([u + v for u, v in zip(ca, cb)], cs)
        assert witt_from_coordinates(ca, ring, level) == WittVector(ring, level, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_frobenius_verschiebung_identities(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 4, 6, 8, 12, 18, 24])
    m = rng.choice(divisors(n))
    x, y = rand_witt(rng, n), rand_witt(rng, n)
    assert frobenius(witt_add(x, y), m) == witt_add(frobenius(x, m), frobenius(y, m))
    assert frobenius(witt_mul(x, y), m) == witt_mul(frobenius(x, m), frobenius(y, m))
    a, b = rand_witt(rng, m), rand_witt(rng, m)
    assert verschiebung(witt_add(a, b), n) == witt_add(verschiebung(a, n), verschiebung(b, n))
    scaled = a
    for _ in range(n // m - 1):
        scaled = witt_add(scaled, a)
    assert frobenius(verschiebung(a, n), m) == scaled
    k = rng.choice(divisors(m))
    # F_{k|m} R_{m|n} = R_{k|nk/m} F_{nk/m|n}
    assert frobenius(restriction(x, m), k) == restriction(frobenius(x, n // m * k), k)


def test_dress_siebeneicher_is_ring_isomorphism():
    for m in range(1, 25):
        iso = is_isomorphism(dress_siebeneicher_morphism(m))
        assert iso.ok
        ds = divisors(m)
        for k, l in itertools.product(ds, repeat=2):
            x, y = BurnsideElement.orbit(m, k), BurnsideElement.orbit(m, l)
            assert dress_siebeneicher(x * y) == witt_mul(dress_siebeneicher(x), dress_siebeneicher(y))


def test_dress_siebeneicher_intertwines_structure_maps():
    b = burnside_mackey(24)
    for n in divisors(24):
        for m in divisors(n):
            for k in divisors(n):
                pulled = b.pull(m, n)([int(d == k) for d in divisors(n)])
                img = BurnsideElement(m, dict(zip(divisors(m), pulled)))
                assert dress_siebeneicher(img) == frobenius(dress_siebeneicher(BurnsideElement.orbit(n, k)), m)
            for k in divisors(m):
                assert dress_siebeneicher(BurnsideElement.orbit(n, k)) == \
                    verschiebung(dress_siebeneicher(BurnsideElement.orbit(m, k)), n)


def test_dress_siebeneicher_indexing_is_unique():
    for top in range(1, 7):
        found = ds_unique_search(top)
        assert len(found) == 1
        for m, sigma in found[0].items():
            for n in divisors(m):
                assert [int(n % sigma[k] == 0) * (m // n) for k in divisors(m)] == fixed_point_ghost(m, n)
