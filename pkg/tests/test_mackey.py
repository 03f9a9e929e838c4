import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cyclone.abgrp import GroupMorphism, Matrix
from cyclone.burnside import HMorphism, compose_h
from cyclone.mackey import (MackeyData, OutOfBound, burnside_mackey, eval_h, j_lower_shriek,
                            j_upper_star, twist, validate_mackey)
from cyclone.rings import ZZ
from cyclone.supernat import divisors
from cyclone.witt import WittVector, frobenius, verschiebung, witt_coordinates, witt_mackey
from oracles import orbit_decomposition, random_unimodular


def basis_vec(level, k):
    return tuple(int(d == k) for d in divisors(level))


def test_burnside_examples():
    d = burnside_mackey(12)
    assert validate_mackey(d).ok
    assert d.push(1, 2)(basis_vec(1, 1)) == basis_vec(2, 1)
    assert d.pull(1, 2)(basis_vec(2, 1)) == (2,)
    assert d.pull(6, 6).equals(GroupMorphism.identity(d.group(6)))


def test_burnside_pull_is_restriction():
    # restrict C_n/C_k to C_m and count orbits by stabilizer order
    d = burnside_mackey(36)
    for n in divisors(36):
        for m in divisors(n):
            for k in divisors(n):
                size = n // k
                orbits = orbit_decomposition(range(size), lambda x: (x + n // m) % size)
                expect = [0] * len(divisors(m))
                for o in orbits:
                    expect[divisors(m).index(m // len(o))] += 1
                assert list(d.pull(m, n)(basis_vec(n, k))) == expect


def test_witt_examples():
    w = witt_mackey(ZZ, 6)
    assert validate_mackey(w).ok
    w12 = witt_mackey(ZZ, 12)
    zero = GroupMorphism.zero(w12.group(4), w12.group(2))
    bad = w12.replace(pull={(2, 4): zero})
    rep = validate_mackey(bad)
    assert not rep.ok
    assert [2, 2, 4] in [v["triple"] for v in rep.violations if v["identity"] == "double coset"]


def test_report_json_shape():
    doc = validate_mackey(burnside_mackey(6)).to_json()
    assert doc["pass"] and doc["checked"] > 0 and doc["violations"] == []


def test_eval_h_examples():
    d = burnside_mackey(12)
    assert eval_h(d, HMorphism.identity(4)).equals(GroupMorphism.identity(d.group(4)))
    w = witt_mackey(ZZ, 6)
    act = eval_h(w, HMorphism.basis(2, 3, 1))
    rng = random.Random(3)
    for _ in range(20):
        x = WittVector(ZZ, 2, (rng.randrange(-5, 6), rng.randrange(-5, 6)))
        expect = verschiebung(frobenius(x, 1), 3)
        assert act(witt_coordinates(x)) == witt_coordinates(expect)
    with pytest.raises(OutOfBound):
        eval_h(d, HMorphism.identity(5))


def basis_h(bound):
    ds = divisors(bound)
    for a, b in itertools.product(ds, repeat=2):
        for k in divisors(math.gcd(a, b)):
            yield HMorphism.basis(a, b, k)


@pytest.mark.parametrize("name,bound", [("burnside", 60), ("witt", 24)])
def test_eval_h_is_functorial(name, bound):
    d = burnside_mackey(bound) if name == "burnside" else witt_mackey(ZZ, bound)
    ds = divisors(bound)
    for m in ds:
        assert eval_h(d, HMorphism.identity(m)).equals(GroupMorphism.identity(d.group(m)))
    rng = random.Random(11)
    hs = list(basis_h(bound))
    by_src = {}
    for h in hs:
        by_src.setdefault(h.src, []).append(h)
    pairs = [(h1, h2) for h1 in hs for h2 in by_src[h1.tgt]]
    for h1, h2 in rng.sample(pairs, min(len(pairs), 1500)):
        lhs = eval_h(d, compose_h(h1, h2))
        rhs = eval_h(d, h2) @ eval_h(d, h1)
        assert lhs.equals(rhs), (h1, h2)


def test_burnside_double_coset_literal():
    d = burnside_mackey(24)
    for m in divisors(24):
        for k, l in itertools.product(divisors(m), repeat=2):
            g = math.gcd(k, l)
            lhs = d.pull(l, m) @ d.push(k, m)
            rhs = (m // math.lcm(k, l)) * (d.push(g, l) @ d.pull(g, k))
            assert lhs.matrix == rhs.matrix


def test_j_examples():
    b = burnside_mackey(12)
    low = j_upper_star(b, 2)
    assert low.levels() == [1, 3]
    up = j_lower_shriek(low, 2, 12)
    assert up.pull(1, 2).matrix == Matrix([[2]])
    assert up.push(1, 2).equals(GroupMorphism.identity(up.group(1)))
    assert validate_mackey(up).ok
    back = j_upper_star(up, 2)
    assert back.levels() == low.levels()
    for key, f in low.push_steps.items():
        assert back.push_steps[key].matrix == f.matrix
    for key, f in low.pull_steps.items():
        assert back.pull_steps[key].matrix == f.matrix
    assert j_upper_star(witt_mackey(ZZ, 12), 3).levels() == [1, 2, 4]


def random_twist(d, rng):
    bases = {m: Matrix(random_unimodular(d.group(m).ngens, rng)) for m in d.levels()}
    return twist(d, bases)


def test_twists_preserve_validity():
    rng = random.Random(5)
    for bound in (12, 18, 24):
        t = random_twist(burnside_mackey(bound), rng)
        assert validate_mackey(t).ok
        assert MackeyData.from_json(t.to_json()).to_json() == t.to_json()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([2, 3]), st.sampled_from([6, 12, 18, 24]))
def test_j_lower_shriek_valid_on_random_input(seed, p, bound):
    rng = random.Random(seed)
    base = random_twist(burnside_mackey(bound), rng) if rng.random() < 0.5 else \
        random_twist(witt_mackey(ZZ, bound), rng)
    low = j_upper_star(base, p)
    up = j_lower_shriek(low, p, bound)
    assert validate_mackey(up).ok


def test_broken_transitivity_is_reported():
    d = burnside_mackey(4)
    doubled = d.replace(push={(1, 2): 2 * d.push_steps[1, 2]})
    rep = validate_mackey(doubled)
    assert not rep.ok
    assert {v["identity"] for v in rep.violations} >= {"double coset"}
