import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from flagkit.errors import BudgetExceeded, DimensionMismatch
from flagkit.field import GF, QQ, Field
from flagkit.linalg import (
    LinearMap,
    Matrix,
    Subspace,
    annihilator,
    det,
    enumerate_subspaces,
    gaussian_binomial,
    image,
    intersect,
    inverse,
    kernel,
    preimage,
    rref,
    solve,
    span,
    wedge_index,
    wedge_power,
)

F2, F3 = GF(2), GF(3)


def e(n, *idx):
    return tuple(int(i + 1 in idx) for i in range(n))


# -- fields -------------------------------------------------------------------


def test_field_rejects_composite_and_large():
    with pytest.raises(ValueError):
        Field(4)
    with pytest.raises(ValueError):
        Field(101)


def test_field_arithmetic_mod_p():
    assert F3(5) == 2
    assert F3.inv(2) == 2
    assert F3.neg(1) == 2
    assert F3(Fraction(1, 2)) == 2


def test_rationals_are_exact():
    assert QQ("1/3") + QQ("2/3") == 1
    assert QQ.inv(QQ(3)) == Fraction(1, 3)
    assert QQ.format(Fraction(-2, 4)) == "-1/2"


def test_field_json_round_trip():
    for f in (F2, F3, QQ):
        assert Field.from_json(f.to_json()) == f


# -- rref and friends ---------------------------------------------------------


def test_rref_invertible_f2():
    assert rref(Matrix.from_rows(F2, [[1, 1], [0, 1]])).rows == ((1, 0), (0, 1))


def test_rref_zero_matrix():
    assert rref(Matrix.zero(F2, 2, 3)).is_zero


def test_rref_f3_dependent_rows():
    assert Subspace.from_rows(F3, 2, [[1, 2], [2, 4]]).basis == ((1, 2),)


def test_rref_over_q():
    m = rref(Matrix.from_rows(QQ, [[2, 4], [1, 3]]))
    assert m.rows == ((1, 0), (0, 1))


def test_det_and_inverse():
    m = Matrix.from_rows(F3, [[1, 2], [0, 2]])
    assert det(m) == 2
    assert inverse(m) @ m == Matrix.identity(F3, 2)


def test_solve_none_when_inconsistent():
    a = Matrix.from_rows(F2, [[1, 0], [1, 0]])
    assert solve(a, (1, 0)) is None
    assert solve(a, (1, 1)) is not None


def test_shape_mismatch_raises():
    with pytest.raises(DimensionMismatch):
        Matrix.from_rows(F2, [[1, 0]]) @ Matrix.from_rows(F2, [[1, 0]])


# -- span, sum, intersection ---------------------------------------------------


def test_span_repeated_generator():
    s = span(3, F2, [e(3, 1), e(3, 1)])
    assert s.dim == 1 and s.basis == (e(3, 1),)


def test_span_empty_is_zero():
    assert span(3, F2, []).dim == 0


def test_span_full():
    assert span(2, F2, [(1, 1), (0, 1)]) == Subspace.full(F2, 2)


def test_intersection_example():
    a = span(3, F2, [e(3, 1), e(3, 2)])
    b = span(3, F2, [e(3, 2), e(3, 3)])
    assert intersect(a, b) == span(3, F2, [e(3, 2)])


def test_idempotence():
    a = span(3, F2, [e(3, 1, 2)])
    assert intersect(a, a) == a and a + a == a


def test_canonical_representation_is_syntactic():
    a = span(3, F3, [(1, 1, 0), (0, 1, 1)])
    b = span(3, F3, [(1, 2, 1), (2, 0, 1)])
    assert a == b and a.basis == b.basis


def test_dimension_formula_exhaustive_f2_4():
    planes = list(enumerate_subspaces(2, 4, F2))
    for a, b in itertools.product(planes, repeat=2):
        assert (a + b).dim + (a & b).dim == a.dim + b.dim


def test_dimension_formula_sampled_f3_4():
    planes = list(enumerate_subspaces(2, 4, F3))[::7]
    for a, b in itertools.product(planes, repeat=2):
        assert (a + b).dim + (a & b).dim == 4


def test_lattice_ops_agree_with_brute_force():
    planes = list(enumerate_subspaces(2, 3, F3))
    for a, b in itertools.product(planes[:6], repeat=2):
        assert oracles.as_set(a & b) == oracles.as_set(a) & oracles.as_set(b)
        assert oracles.as_set(a + b) == oracles.closure(list(oracles.as_set(a) | oracles.as_set(b)), 3, 3)


# -- maps ---------------------------------------------------------------------


def test_preimage_identity():
    s = span(3, F2, [e(3, 1, 2)])
    assert preimage(LinearMap(Matrix.identity(F2, 3)), s) == s


def test_preimage_zero_map():
    z = LinearMap(Matrix.zero(F2, 2, 3))
    assert preimage(z, span(2, F2, [])) == Subspace.full(F2, 3)


def test_preimage_projection():
    proj = LinearMap.from_rows(F2, [[1, 0, 0], [0, 1, 0]])
    assert preimage(proj, span(2, F2, [(1, 0)])) == span(3, F2, [e(3, 1), e(3, 3)])


def test_kernel_and_image():
    proj = LinearMap.from_rows(F2, [[1, 0, 0], [0, 1, 0]])
    assert kernel(proj) == span(3, F2, [e(3, 3)])
    assert image(proj, Subspace.full(F2, 3)) == Subspace.full(F2, 2)


def test_preimage_monotone_exhaustive_small():
    f = LinearMap.from_rows(F2, [[1, 1, 0], [0, 1, 1]])
    subs = [s for m in range(3) for s in enumerate_subspaces(m, 2, F2)]
    for s, t in itertools.product(subs, repeat=2):
        if s <= t:
            assert preimage(f, s) <= preimage(f, t)


# -- annihilator --------------------------------------------------------------


def test_annihilator_extremes():
    assert annihilator(Subspace.zero(F2, 3)) == Subspace.full(F2, 3)
    assert annihilator(Subspace.full(F2, 3)).dim == 0


def test_annihilator_of_e1():
    assert annihilator(span(3, F2, [e(3, 1)])) == span(3, F2, [e(3, 2), e(3, 3)])


def test_double_annihilator_exhaustive_f2_3():
    for m in range(4):
        for s in enumerate_subspaces(m, 3, F2):
            assert annihilator(annihilator(s)) == s
            assert oracles.as_set(annihilator(s)) == oracles.annihilator(oracles.as_set(s), 2, 3)


# -- enumeration --------------------------------------------------------------


def test_enumeration_counts():
    assert sum(1 for _ in enumerate_subspaces(1, 3, F2)) == 7
    assert list(enumerate_subspaces(0, 3, F2)) == [Subspace.zero(F2, 3)]
    assert sum(1 for _ in enumerate_subspaces(2, 4, F2)) == 35


@pytest.mark.parametrize("p,n", [(2, n) for n in range(1, 6)] + [(3, n) for n in range(1, 5)])
def test_enumeration_matches_brute_force(p, n):
    f = GF(p)
    for m in range(n + 1):
        ours = {oracles.as_set(s) for s in enumerate_subspaces(m, n, f)}
        assert ours == set(oracles.all_subspaces(p, n, m))
        assert len(ours) == gaussian_binomial(n, m, p)


def test_enumeration_order_is_lexicographic_in_pivots():
    pivots = [s.pivots for s in enumerate_subspaces(2, 4, F2)]
    assert pivots == sorted(pivots)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_subspaces(2, 5, F3, budget=100))


def test_enumeration_budget_env(monkeypatch):
    monkeypatch.setenv("FLAGKIT_BUDGET_POINTS", "10")
    with pytest.raises(BudgetExceeded):
        list(enumerate_subspaces(2, 4, F2))


# -- wedge powers -------------------------------------------------------------


def test_wedge_first_power_is_identity():
    s = span(3, F2, [e(3, 1, 2)])
    assert wedge_power(s, 1) == s


def test_wedge_coordinate_plane():
    s = span(3, F2, [e(3, 1), e(3, 2)])
    idx = wedge_index(3, 2)
    w = wedge_power(s, 2)
    assert w.dim == 1 and w.basis[0][idx.index((0, 1))] == 1 and sum(w.basis[0]) == 1


def test_wedge_laplace_example():
    s = span(3, F2, [e(3, 1, 2), e(3, 3)])
    idx = wedge_index(3, 2)
    vec = [0] * 3
    vec[idx.index((0, 2))] = 1
    vec[idx.index((1, 2))] = 1
    assert wedge_power(s, 2) == span(3, F2, [vec])


# -- properties ---------------------------------------------------------------


vec3 = st.tuples(*[st.integers(0, 2)] * 4)


@settings(max_examples=60, deadline=None)
@given(st.lists(vec3, max_size=4), st.lists(vec3, max_size=4))
def test_modular_law_property(ga, gb):
    a, b = span(4, F3, ga), span(4, F3, gb)
    assert (a + b).dim + (a & b).dim == a.dim + b.dim
    assert annihilator(a + b) == annihilator(a) & annihilator(b)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=2, max_size=2),
       st.lists(vec3.map(lambda v: v[:2]), max_size=2), st.lists(vec3.map(lambda v: v[:2]), max_size=2))
def test_preimage_monotone_property(rows, gs, gt):
    f = LinearMap.from_rows(F3, rows)
    s = span(2, F3, gs)
    t = s + span(2, F3, gt)
    assert preimage(f, s) <= preimage(f, t)
    assert image(f, preimage(f, s)) <= s


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(*[st.fractions(max_denominator=5)] * 3), max_size=3))
def test_rational_double_annihilator(gens):
    s = span(3, QQ, gens)
    assert annihilator(annihilator(s)) == s
