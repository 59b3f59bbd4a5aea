import random

import pytest

from flagkit.analysis import (
    GrassMap,
    PointMapEmbedding,
    check_projective_factorization,
    classify,
    detect_product_factorization,
    induced_grassmannian_maps,
    is_admissible,
    recover_standard_data,
    verify_embedding,
)
from flagkit.corpus import (
    F2,
    NEGATIVE_TABLES,
    coord,
    isotropic_specs,
    modified_specs,
    naive_spec,
    strict_specs,
)
from flagkit.errors import BudgetExceeded
from flagkit.flags import Flag, FlagVariety, enumerate_flags
from flagkit.linalg import LinearMap, Matrix, Subspace, image, inverse
from flagkit.stdext import MODIFIED, STRICT

SPECS = {**strict_specs(), **modified_specs(), **isotropic_specs()}
STRICT_NAMES = sorted(strict_specs())


def proportional(a: Matrix, b: Matrix) -> bool:
    f = a.field
    for x in a.field.elements():
        if x and a == b.scale(f(x)):
            return True
    return False


def table(name):
    return PointMapEmbedding.from_spec(SPECS[name])


# -- embeddings ---------------------------------------------------------------


def test_identity_table_is_embedding():
    v = FlagVariety((1,), 3, F2)
    assert verify_embedding(PointMapEmbedding.from_function(v, v, lambda f: f))


def test_collision_is_not_embedding():
    v = FlagVariety((1,), 2, F2)
    pts = list(enumerate_flags(v))
    assert not verify_embedding(PointMapEmbedding(v, v, [(f, pts[0]) for f in pts]))


@pytest.mark.parametrize("name", sorted(SPECS))
def test_spec_tables_are_embeddings(name):
    assert verify_embedding(table(name))


# -- induced maps -------------------------------------------------------------


@pytest.mark.parametrize("name", STRICT_NAMES)
def test_type_map_agrees_with_pbar(name):
    spec = SPECS[name]
    ind = induced_grassmannian_maps(table(name))
    assert ind.linear_like
    for j in range(1, spec.kt + 1):
        if ind.p[j] != 0:
            assert ind.p[j] == spec.pbar[j]


def test_constant_middle_type_map():
    ind = induced_grassmannian_maps(NEGATIVE_TABLES["constant_middle"]())
    assert ind.p[1:] == (1, 0, 1)


def test_constant_single_point():
    src = FlagVariety((), 2, F2)
    tgt = FlagVariety((1,), 2, F2)
    e = PointMapEmbedding(src, tgt, [(next(enumerate_flags(src)), Flag(2, F2, (coord(F2, 2, [1]),)))])
    assert induced_grassmannian_maps(e).p[1:] == (0,)


def test_type_map_stable_under_target_automorphism():
    rng = random.Random(5)
    for name in ("fl12_f2_3__fl123_f2_4", "g1_f2_2__fl23_f2_4", "fl13_f2_4__fl14_f2_5"):
        e = table(name)
        n = e.target.ambient
        while True:
            m = Matrix.from_rows(F2, [[rng.randrange(2) for _ in range(n)] for _ in range(n)])
            if m.rank == n:
                break
        g = LinearMap(m)
        moved = PointMapEmbedding(e.source, e.target, [
            (a, Flag(n, F2, tuple(image(g, s) for s in b.spaces))) for a, b in e.table])
        assert induced_grassmannian_maps(moved).p == induced_grassmannian_maps(e).p
        assert inverse(m) @ m == Matrix.identity(F2, n)


# -- products -----------------------------------------------------------------


@pytest.mark.parametrize("name", [n for n in STRICT_NAMES if len(strict_specs()[n].source.dims) >= 2])
def test_no_product_for_strict_multi_step(name):
    e = table(name)
    assert detect_product_factorization(e, induced_grassmannian_maps(e)) is None


def test_mixing_step_has_witness():
    e = NEGATIVE_TABLES["mixing_step_n2"]()
    assert (e.source.dims, e.source.ambient, e.target.dims, e.target.ambient) == ((1, 3), 4, (1, 7), 8)
    w = detect_product_factorization(e, induced_grassmannian_maps(e))
    assert w is not None and w.kind == "mixable"
    assert w.type_blocks == ((1,), (3,))


def test_constant_gap_witness():
    e = NEGATIVE_TABLES["constant_middle"]()
    w = detect_product_factorization(e, induced_grassmannian_maps(e))
    assert w is not None and w.kind == "constant_gap"


def test_mixability_budget():
    e = NEGATIVE_TABLES["mixing_step_n2"]()
    with pytest.raises(BudgetExceeded):
        detect_product_factorization(e, induced_grassmannian_maps(e), max_pairs=10)


# -- projective factorization and recovery -------------------------------------


def test_plucker_component_is_projective():
    e = NEGATIVE_TABLES["plucker_g2_f2_4"]()
    g = induced_grassmannian_maps(e).maps[1]
    assert check_projective_factorization(g)
    assert recover_standard_data(g).marker == "no_epsilon"


def test_projective_step_vs_plane_step():
    g1 = induced_grassmannian_maps(table("g1_f2_2__g2_f2_3")).maps[1]
    assert check_projective_factorization(g1)
    g2 = induced_grassmannian_maps(table("g2_f2_4__g3_f2_5")).maps[1]
    assert not check_projective_factorization(g2)


def test_projective_test_rejects_constant():
    s = coord(F2, 3, [1])
    with pytest.raises(ValueError):
        check_projective_factorization(GrassMap(F2, 2, 3, ((coord(F2, 2, [1]), s), (coord(F2, 2, [2]), s))))


def test_recover_grassmannian_step():
    g = induced_grassmannian_maps(table("g1_f2_2__g2_f2_3")).maps[1]
    r = recover_standard_data(g)
    assert r.marker == "ok"
    assert r.w == coord(F2, 3, [3]) and r.u == Subspace.full(F2, 3)
    assert r.eps.matrix.rows == ((1, 0, 0), (0, 1, 0))


def test_recover_constant():
    s = coord(F2, 3, [1, 3])
    r = recover_standard_data(GrassMap(F2, 2, 3, ((coord(F2, 2, [1]), s), (coord(F2, 2, [2]), s))))
    assert r.marker == "constant" and r.w == r.u == s and r.eps.is_zero


@pytest.mark.parametrize("name", STRICT_NAMES)
def test_recovered_kernel_is_w(name):
    spec = SPECS[name]
    ind = induced_grassmannian_maps(table(name))
    for j, g in ind.maps.items():
        r = recover_standard_data(g)
        assert r.ok and r.eps.rank == spec.source.ambient
        assert r.u == spec.u_chain[j - 1]
        first = next(x for row in r.eps.matrix.rows for x in row if x != 0)
        assert first == 1


# -- classify -----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(SPECS))
def test_classify_round_trip(name):
    spec = SPECS[name]
    e = table(name)
    c = classify(e)
    expected = "modified_standard" if spec.variant == MODIFIED else "strict_standard"
    if spec.variant == MODIFIED and spec.source.ambient == 2:
        # P^1 is self-dual, so these tables are also strict extensions
        assert c.kind in ("strict_standard", "modified_standard")
    else:
        assert c.kind == expected
    for a, b in e.table:
        assert c.spec.apply(a) == b
    if c.spec.variant != spec.variant:
        return
    if spec.source.needs_component:
        # one ruling of GO(m, 2m) is fixed by non-scalar isometries, so eps is not unique up to scalar
        return
    ref, got = spec.strict_data, c.spec.strict_data
    for j in range(1, ref.kt + 1):
        if not ref.is_constant_component(j):
            assert got.u_chain[j - 1] == ref.u_chain[j - 1]
            assert proportional(got.eps[j - 1].matrix, ref.eps[j - 1].matrix)


def test_constant_middle_not_standard():
    c = classify(NEGATIVE_TABLES["constant_middle"]())
    assert c.kind == "not_standard" and c.reason == "factors_through_product"


def test_plucker_not_standard():
    c = classify(NEGATIVE_TABLES["plucker_g2_f2_4"]())
    assert c.kind == "not_standard" and c.reason == "fails_condition_c"


def test_twisted_not_linear_like():
    c = classify(NEGATIVE_TABLES["twisted"]())
    assert c.kind == "not_standard" and c.reason == "not_linear_like"


def test_non_embedding_reported():
    v = FlagVariety((1,), 2, F2)
    pts = list(enumerate_flags(v))
    c = classify(PointMapEmbedding(v, v, [(f, pts[0]) for f in pts]))
    assert c.reason == "not_an_embedding"


# -- admissibility ----------------------------------------------------------------


@pytest.mark.parametrize("name", ["fl23_f2_5__fl35_f2_7", "g2_f2_4__g3_f2_5", "g2_f2_4__fl34_f2_6"])
def test_admissible_corpus_tables(name):
    assert is_admissible(table(name)).admissible


def test_mixing_step_not_admissible():
    r = is_admissible(NEGATIVE_TABLES["mixing_step_n2"]())
    assert not r.admissible and r.product_witness is not None


def test_plucker_padded_not_admissible():
    r = is_admissible(NEGATIVE_TABLES["plucker_padded"]())
    assert not r.admissible and r.product_witness is None and r.projective_components


def test_isotropic_admissibility_flag():
    r = is_admissible(table("gs1_f2_4__gs2_f2_6"))
    assert "isotropic_condition_c_partial" in r.flags


def test_admissible_implies_standard_over_corpus():
    tables = [table(n) for n in sorted(SPECS)] + [f() for f in NEGATIVE_TABLES.values()]
    for e in tables:
        if is_admissible(e).admissible:
            assert classify(e).kind in ("strict_standard", "modified_standard")


def test_modified_core_is_strict():
    c = classify(table("fl12_f2_3__fl12_f2_4__dual"))
    assert c.spec.variant == MODIFIED and c.spec.core.variant == STRICT


def test_new_spec_round_trip_over_f3():
    from flagkit.corpus import F3

    spec = naive_spec(F3, (1,), 3, (1, 2), 4, [[], [4]], (0, 1, 1, 2))
    e = PointMapEmbedding.from_spec(spec)
    c = classify(e)
    assert c.kind == "strict_standard"
    assert all(c.spec.apply(a) == b for a, b in e.table)
