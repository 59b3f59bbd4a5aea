import itertools

import pytest

import oracles
from flagkit.errors import BudgetExceeded
from flagkit.field import GF
from flagkit.flags import (
    MINUS,
    PLUS,
    Flag,
    FlagType,
    FlagVariety,
    count_flags,
    enumerate_flags,
    max_isotropic_component,
    project,
    theta_map,
)
from flagkit.forms import hyperbolic_space, is_isotropic
from flagkit.linalg import Subspace, enumerate_subspaces, span

F2, F3 = GF(2), GF(3)


def test_flag_type_validation():
    with pytest.raises(ValueError):
        FlagType((2, 1))
    with pytest.raises(ValueError):
        FlagVariety((1, 3), 3, F2)


def test_flag_must_increase():
    a = span(3, F2, [(1, 0, 0)])
    with pytest.raises(ValueError):
        Flag.of(a, a)


def test_projection():
    a = span(3, F2, [(1, 0, 0)])
    b = span(3, F2, [(1, 0, 0), (0, 1, 0)])
    fl = Flag.of(a, b)
    assert project(fl, 1) == a and project(fl, 2) == b
    with pytest.raises(IndexError):
        project(fl, 3)


def test_named_counts():
    assert count_flags(FlagVariety((1,), 3, F2)) == 7
    assert count_flags(FlagVariety((1, 2), 3, F2)) == 21
    assert count_flags(FlagVariety((1,), 4, F2, hyperbolic_space("symplectic", F2, 2))) == 15
    assert count_flags(FlagVariety((1,), 4, F3, hyperbolic_space("symmetric", F3, 2))) == 16


TYPES = [(1,), (2,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (3, 3), (3, 4)])
def test_flag_counts_match_brute_force(p, n):
    f = GF(p)
    for dims in TYPES:
        if dims[-1] >= n:
            continue
        v = FlagVariety(dims, n, f)
        ours = {tuple(oracles.as_set(s) for s in fl) for fl in enumerate_flags(v)}
        assert ours == set(oracles.flags(p, n, dims))
        assert len(ours) == v.ordinary_count()


def test_flag_count_product_formula_f2_5():
    for dims in [(1, 2), (2, 4), (1, 3, 4)]:
        v = FlagVariety(dims, 5, F2)
        assert count_flags(v) == v.ordinary_count() == len(oracles.flags(2, 5, dims))


@pytest.mark.parametrize("kind,p,npairs,dims", [
    ("symplectic", 2, 2, (1,)), ("symplectic", 2, 2, (2,)), ("symplectic", 2, 2, (1, 2)),
    ("symplectic", 3, 2, (1, 2)), ("symmetric", 3, 2, (1,)), ("symmetric", 3, 1, (1,)),
])
def test_isotropic_counts_match_brute_force(kind, p, npairs, dims):
    f = GF(p)
    b = hyperbolic_space(kind, f, npairs)
    v = FlagVariety(dims, 2 * npairs, f, b)
    gram = oracles.hyperbolic_gram(npairs, kind == "symplectic", p=p)
    expected = oracles.isotropic_flags(p, 2 * npairs, dims, gram)
    ours = {tuple(oracles.as_set(s) for s in fl) for fl in enumerate_flags(v)}
    if v.needs_component:
        # GO(m, 2m) keeps a single component: half of the maximal isotropics
        assert ours < set(expected) and 2 * len(ours) == len(expected)
    else:
        assert ours == set(expected)


def test_odd_orthogonal_count():
    b = hyperbolic_space("symmetric", F3, 1, with_e0=True)
    gram = [[int(x) for x in r] for r in b.gram.rows]
    v = FlagVariety((1,), 3, F3, b)
    assert count_flags(v) == len(oracles.isotropic_flags(3, 3, (1,), gram)) == 4


def test_go_component_halves():
    b = hyperbolic_space("symmetric", F3, 2)
    maximal = [s for s in enumerate_subspaces(2, 4, F3) if is_isotropic(b, s)]
    ref = maximal[0]
    labels = [max_isotropic_component(b, s, ref) for s in maximal]
    assert labels.count(PLUS) == labels.count(MINUS) == len(maximal) // 2
    # same-component is an equivalence relation with two classes
    for s, t in itertools.product(maximal, repeat=2):
        same = max_isotropic_component(b, s, t) == PLUS
        assert same == (max_isotropic_component(b, s, ref) == max_isotropic_component(b, t, ref))
    v = FlagVariety((2,), 4, F3, b)
    assert count_flags(v) == len(maximal) // 2


def test_opposite_components_example():
    b = hyperbolic_space("symmetric", F3, 2)
    s = Subspace.coordinate(F3, 4, [0, 2])
    t = Subspace.coordinate(F3, 4, [0, 3])
    assert max_isotropic_component(b, s, s) == PLUS
    assert max_isotropic_component(b, t, s) == MINUS


def test_theta_exhaustive_m2():
    b = hyperbolic_space("symmetric", F3, 2)
    maximal = [s for s in enumerate_subspaces(2, 4, F3) if is_isotropic(b, s)]
    ref = maximal[0]
    for line in enumerate_subspaces(1, 4, F3):
        if not is_isotropic(b, line):
            continue
        planes = [s for s in maximal if line <= s]
        assert len(planes) == 2
        assert {max_isotropic_component(b, s, ref) for s in planes} == {PLUS, MINUS}
        for c in (PLUS, MINUS):
            th = theta_map(b, line, c, ref)
            assert line <= th and th.dim == 2 and is_isotropic(b, th)
            assert max_isotropic_component(b, th, ref) == c
    # lines in one plane are all sent to that plane
    for plane in maximal:
        c = max_isotropic_component(b, plane, ref)
        assert {theta_map(b, line, c, ref) for line in enumerate_subspaces(1, 4, F3) if line <= plane} == {plane}


def test_enumerated_flags_are_valid_and_canonical():
    b = hyperbolic_space("symplectic", F3, 2)
    v = FlagVariety((1, 2), 4, F3, b)
    for fl in enumerate_flags(v):
        assert v.contains(fl)
        assert all(span(4, F3, s.basis) == s for s in fl)


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        list(enumerate_flags(FlagVariety((1, 2), 5, F3), budget=50))


def test_dual_variety():
    v = FlagVariety((1, 3), 5, F2)
    assert v.dual().dims == (2, 4)
    assert str(v) == "Fl(1,3; F_2^5)"
