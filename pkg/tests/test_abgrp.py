import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import ZZ as SymZZ
from sympy import Matrix as SymMatrix
from sympy.matrices.normalforms import smith_normal_form as sym_snf

from cyclone.abgrp import (FGAbelianGroup, GroupMorphism, Matrix, NotAMorphism,
                           NotWellDefined, cokernel, induced_on_quotient, integer_kernel,
                           is_isomorphism, kernel, lattice_basis, smith_normal_form,
                           solve_integer, subgroup_contains)
from oracles import determinant_divisors, invariant_order_profile, order_profile


def snf_diag(m: Matrix) -> list[int]:
    d, _, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(m.rows, m.cols))]


def test_snf_examples():
    assert snf_diag(Matrix.diag([2, 3])) == [1, 6]
    assert snf_diag(Matrix.identity(3)) == [1, 1, 1]
    assert snf_diag(Matrix([[4]])) == [4]


def test_cokernel_examples():
    z = FGAbelianGroup.free(1)
    q, _ = cokernel(GroupMorphism(z, z, Matrix([[2]])))
    assert q.canonical_form() == (0, (2,))
    q, _ = cokernel(GroupMorphism.zero(z, z))
    assert q.canonical_form() == (1, ())
    z2 = FGAbelianGroup.free(2)
    q, proj = cokernel(GroupMorphism(z2, z2, Matrix([[2, 1], [0, 2]])))
    assert q.canonical_form() == (0, (4,))
    assert proj.target is q


def test_is_isomorphism_examples():
    z6 = FGAbelianGroup.from_invariants(0, [6])
    res = is_isomorphism(GroupMorphism.identity(z6))
    assert res.ok and res.inverse.equals(GroupMorphism.identity(z6))

    z4 = FGAbelianGroup.from_invariants(0, [4])
    double = GroupMorphism(z4, z4, Matrix([[2]]))
    res = is_isomorphism(double)
    assert not res.ok
    image = {double((x,))[0] % 4 for x in range(4)}  # enumerate Z/4
    assert image == {0, 2}
    assert res.witness[0] % 4 not in image

    z, z2 = FGAbelianGroup.free(1), FGAbelianGroup.free(2)
    res = is_isomorphism(GroupMorphism(z, z2, Matrix([[1], [0]])))
    assert not res.ok and not subgroup_contains(z2, [(1, 0)], res.witness)


def test_induced_on_quotient_examples():
    z = FGAbelianGroup.free(1)
    four = GroupMorphism(z, z, Matrix([[4]]))
    _, q = cokernel(four)
    ident = GroupMorphism.identity(z)
    assert induced_on_quotient(ident, q, q).equals(GroupMorphism.identity(q.target))
    doubled = induced_on_quotient(GroupMorphism(z, z, Matrix([[2]])), q, q)
    assert [doubled((x,))[0] % 4 for x in range(4)] == [0, 2, 0, 2]

    z2 = FGAbelianGroup.free(2)
    swap_sum = GroupMorphism(z2, z, Matrix([[1, 1]]))
    _, q_src = cokernel(GroupMorphism(z, z2, Matrix([[1], [-1]])))
    g = induced_on_quotient(swap_sum, q_src, GroupMorphism.identity(z))
    assert (g @ q_src).equals(swap_sum)
    assert is_isomorphism(g).ok  # Z^2/(1,-1) is Z and the sum separates classes
    _, q_bad = cokernel(GroupMorphism(z, z2, Matrix([[1], [1]])))
    with pytest.raises(NotWellDefined) as err:
        induced_on_quotient(swap_sum, q_bad, GroupMorphism.identity(z))
    assert err.value.generator is not None


def test_morphism_must_respect_relations():
    z2 = FGAbelianGroup.from_invariants(0, [2])
    z = FGAbelianGroup.free(1)
    with pytest.raises(NotAMorphism):
        GroupMorphism(z2, z, Matrix([[1]]))


def test_lattice_basis_index():
    b = lattice_basis([[2, 4], [3, 1]], 2)
    assert abs(b.det()) == 10
    b = lattice_basis([[2, 4], [3, 1]], 2, modulus=8)
    assert FGAbelianGroup(2, b).order() == determinant_divisors([[2, 4], [3, 1], [8, 0], [0, 8]])[0] * \
        determinant_divisors([[2, 4], [3, 1], [8, 0], [0, 8]])[1]


def test_finite_group_elements_match_order_profile():
    g = FGAbelianGroup(3, Matrix([[2, 0, 0], [0, 6, 2], [0, 0, 4]]))
    elems = list(g.elements())
    assert len(elems) == g.order()
    seen = {g.coordinates(e) for e in elems}
    assert len(seen) == len(elems)

    def add(x, y):
        return tuple(a + b for a, b in zip(x, y))

    class Elem(tuple):
        def __eq__(self, other):
            return g.equal(self, other)

        def __ne__(self, other):
            return not self == other

        __hash__ = tuple.__hash__

    prof = order_profile([Elem(e) for e in elems], lambda x, y: Elem(add(x, y)), Elem((0, 0, 0)))
    assert prof == invariant_order_profile(list(g.torsion))


def test_group_json_round_trip():
    g = FGAbelianGroup(2, Matrix([[2, 1], [0, 2]]))
    assert FGAbelianGroup.from_json(g.to_json()).is_isomorphic(g)
    assert FGAbelianGroup.from_json(g.to_json(presented=True)).relations == g.relations
    assert g.to_json() == {"rank": 0, "torsion": [4]}


small_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_snf_postcondition_and_oracles(rows):
    m = Matrix(rows)
    d, u, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    diag = [d[i, i] for i in range(min(m.rows, m.cols))]
    assert all(d[i, j] == 0 for i in range(d.rows) for j in range(d.cols) if i != j)
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert nonzero == determinant_divisors(rows)
    sym = sym_snf(SymMatrix(rows), domain=SymZZ)
    assert sorted(abs(sym[i, i]) for i in range(min(sym.shape)) if sym[i, i]) == sorted(nonzero)


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_cokernel_and_kernel_match_minors(rows):
    m = Matrix(rows)
    src, tgt = FGAbelianGroup.free(m.cols), FGAbelianGroup.free(m.rows)
    f = GroupMorphism(src, tgt, m)
    q, _ = cokernel(f)
    nz = determinant_divisors(rows)
    assert q.rank == m.rows - len(nz)
    assert list(q.torsion) == [x for x in nz if x > 1]
    k, inc = kernel(f)
    assert (f @ inc).is_zero()
    for c in integer_kernel(m):
        assert subgroup_contains(src, inc.matrix.columns(), c)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_isomorphisms_compose(seed):
    rng = random.Random(seed)
    from oracles import random_unimodular
    g = FGAbelianGroup.from_invariants(1, [2, 6])
    a = Matrix(random_unimodular(3, rng))
    b = Matrix(random_unimodular(3, rng))
    ga = FGAbelianGroup(3, (a @ g.relations.T).T)
    f1 = GroupMorphism(g, ga, a)
    inv = is_isomorphism(f1)
    assert inv.ok
    gb = FGAbelianGroup(3, (b @ ga.relations.T).T)
    f2 = GroupMorphism(ga, gb, b)
    assert is_isomorphism(f2).ok and is_isomorphism(f2 @ f1).ok
    assert (inv.inverse @ f1).equals(GroupMorphism.identity(g))


def test_solve_integer():
    a = Matrix([[2, 0], [0, 3]])
    assert a.apply(solve_integer(a, [4, 9])) == (4, 9)
    assert solve_integer(a, [1, 0]) is None


def test_exhaustive_small_kernels():
    for entries in itertools.product(range(-2, 3), repeat=4):
        m = Matrix([entries[:2], entries[2:]])
        basis = integer_kernel(m)
        for c in basis:
            assert m.apply(c) == (0, 0)
        brute = [(x, y) for x in range(-4, 5) for y in range(-4, 5) if m.apply((x, y)) == (0, 0)]
        z2 = FGAbelianGroup.free(2)
        for v in brute:
            assert subgroup_contains(z2, basis, v)
