"""Named example extensions and embedding tables used by tests and scenarios."""

from __future__ import annotations

from typing import Callable

from .analysis import PointMapEmbedding
from .field import GF, Field
from .flags import Flag, FlagVariety
from .forms import labeled_form
from .linalg import LinearMap, Matrix, Subspace, plucker_vector, span, subspace_sum
from .stdext import StdExtSpec, dualize, make_strict, require_valid


def unit(n: int, i: int) -> tuple:
    """e_i in F^n, 1-based."""
    return tuple(int(j == i - 1) for j in range(n))


def coord(field: Field, n: int, idx) -> Subspace:
    """Span of e_i, i in ``idx`` (1-based)."""
    return Subspace.coordinate(field, n, [i - 1 for i in idx])


def inclusion(field: Field, n: int, n2: int) -> LinearMap:
    return LinearMap(Matrix.from_columns(field, [unit(n2, i) for i in range(1, n + 1)], n2))


def naive_spec(field: Field, src_dims, n: int, tgt_dims, n2: int, w_idx, pbar,
               src_form=None, tgt_form=None, tgt_ref=None) -> StdExtSpec:
    """V = first n coordinates of V', w_hat = the rest; W_j spanned by e_i, i in w_idx[j]."""
    source = FlagVariety(tuple(src_dims), n, field, src_form)
    target = FlagVariety(tuple(tgt_dims), n2, field, tgt_form, tgt_ref)
    w_hat = coord(field, n2, range(n + 1, n2 + 1))
    w_chain = [coord(field, n2, ws) for ws in w_idx]
    return make_strict(source, target, inclusion(field, n, n2), w_hat, w_chain, pbar)


F2, F3 = GF(2), GF(3)


def _hyp(kind, field, labels):
    return labeled_form(kind, field, labels)


def _go_component_case() -> StdExtSpec:
    """GO(2, F_3^4) -> GO(3, F_3^6), V_2 -> V_2 (+) <e3>."""
    src_form = _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2"])
    tgt_form = _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2", "e3", "e^3"])
    source = FlagVariety((2,), 4, F3, src_form)
    ref_src = source.component_ref
    ref = subspace_sum(span(6, F3, [tuple(r) + (0, 0) for r in ref_src.basis]), coord(F3, 6, [5]))
    return naive_spec(F3, (2,), 4, (3,), 6, [[5]], (0, 1, 2), src_form, tgt_form, ref)


STRICT_SPECS: dict[str, Callable[[], StdExtSpec]] = {
    # i0 = 0 grassmannian step
    "g1_f2_2__g2_f2_3": lambda: naive_spec(F2, (1,), 2, (2,), 3, [[3]], (0, 1, 2)),
    # constant bottom component, G(1) -> Fl(1,2)
    "g1_f2_2__fl12_f2_3": lambda: naive_spec(F2, (1,), 2, (1, 2), 3, [[3], [3]], (0, 0, 1, 2)),
    "g1_f3_2__fl12_f3_3": lambda: naive_spec(F3, (1,), 2, (1, 2), 3, [[3], [3]], (0, 0, 1, 2)),
    # one-dimensional growth, i0 = 0, 1, k
    "fl12_f2_3__fl12_f2_4": lambda: naive_spec(F2, (1, 2), 3, (2, 3), 4, [[4], [4]], (0, 1, 2, 3)),
    "fl12_f2_3__fl13_f2_4": lambda: naive_spec(F2, (1, 2), 3, (1, 3), 4, [[], [4]], (0, 1, 2, 3)),
    "fl12_f2_3__fl123_f2_4": lambda: naive_spec(F2, (1, 2), 3, (1, 2, 3), 4, [[], [], [4]], (0, 1, 2, 2, 3)),
    "fl12_f3_3__fl12_f3_4": lambda: naive_spec(F3, (1, 2), 3, (2, 3), 4, [[4], [4]], (0, 1, 2, 3)),
    "g2_f2_4__g3_f2_5": lambda: naive_spec(F2, (2,), 4, (3,), 5, [[5]], (0, 1, 2)),
    # jump of two, and a top constant component
    "g1_f2_2__fl23_f2_4": lambda: naive_spec(F2, (1,), 2, (2, 3), 4, [[3], [3, 4]], (0, 1, 1, 2)),
    "g1_f2_2__fl23_f2_4_top": lambda: naive_spec(F2, (1,), 2, (2, 3), 4, [[3], [3]], (0, 1, 2, 2)),
    "g1_f3_2__g2_f3_4": lambda: naive_spec(F3, (1,), 2, (2,), 4, [[3]], (0, 1, 2)),
    # admissible: no source grassmannian is a projective space
    "fl23_f2_5__fl35_f2_7": lambda: naive_spec(F2, (2, 3), 5, (3, 5), 7, [[6], [6, 7]], (0, 1, 2, 3)),
    "g2_f2_4__fl34_f2_6": lambda: naive_spec(F2, (2,), 4, (3, 4), 6, [[5], [5, 6]], (0, 1, 1, 2)),
    # links that make composable chains
    "g2_f2_3__g3_f2_4": lambda: naive_spec(F2, (2,), 3, (3,), 4, [[4]], (0, 1, 2)),
    "g1_f2_3__g2_f2_4": lambda: naive_spec(F2, (1,), 3, (2,), 4, [[4]], (0, 1, 2)),
    "g1_f2_3__g1_f2_4": lambda: naive_spec(F2, (1,), 3, (1,), 4, [[]], (0, 1, 2)),
    "fl12_f2_3__fl12_f2_4_fix": lambda: naive_spec(F2, (1, 2), 3, (1, 2), 4, [[], []], (0, 1, 2, 3)),
    "fl23_f2_4__fl34_f2_5": lambda: naive_spec(F2, (2, 3), 4, (3, 4), 5, [[5], [5]], (0, 1, 2, 3)),
    "fl13_f2_4__fl14_f2_5": lambda: naive_spec(F2, (1, 3), 4, (1, 4), 5, [[], [5]], (0, 1, 2, 3)),
    "fl12_f2_4__fl23_f2_5": lambda: naive_spec(F2, (1, 2), 4, (2, 3), 5, [[5], [5]], (0, 1, 2, 3)),
}

ISOTROPIC_SPECS: dict[str, Callable[[], StdExtSpec]] = {
    "fls1_f3_2__fls12_f3_4_s1": lambda: naive_spec(
        F3, (1,), 2, (1, 2), 4, [[], [3]], (0, 1, 1, 2),
        _hyp("symplectic", F3, ["e1", "e^1"]), _hyp("symplectic", F3, ["e1", "e^1", "e2", "e^2"])),
    "fls1_f3_2__fls12_f3_4_s0": lambda: naive_spec(
        F3, (1,), 2, (1, 2), 4, [[3], [3]], (0, 0, 1, 2),
        _hyp("symplectic", F3, ["e1", "e^1"]), _hyp("symplectic", F3, ["e1", "e^1", "e2", "e^2"])),
    "gs1_f2_4__gs2_f2_6": lambda: naive_spec(
        F2, (1,), 4, (2,), 6, [[5]], (0, 1, 2),
        _hyp("symplectic", F2, ["e1", "e^1", "e2", "e^2"]),
        _hyp("symplectic", F2, ["e1", "e^1", "e2", "e^2", "e3", "e^3"])),
    "go1_f3_4__go2_f3_6": lambda: naive_spec(
        F3, (1,), 4, (2,), 6, [[5]], (0, 1, 2),
        _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2"]),
        _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2", "e3", "e^3"])),
    "go1_f3_3__go2_f3_5": lambda: naive_spec(
        F3, (1,), 3, (2,), 5, [[4]], (0, 1, 2),
        _hyp("symmetric", F3, ["e1", "e^1", "e0"]),
        _hyp("symmetric", F3, ["e1", "e^1", "e0", "e2", "e^2"])),
    "go1_f3_4__go1_f3_6": lambda: naive_spec(
        F3, (1,), 4, (1,), 6, [[]], (0, 1, 2),
        _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2"]),
        _hyp("symmetric", F3, ["e1", "e^1", "e2", "e^2", "e3", "e^3"])),
    "go2_f3_4__go3_f3_6": _go_component_case,
}


def strict_specs() -> dict[str, StdExtSpec]:
    return {name: build() for name, build in STRICT_SPECS.items()}


def isotropic_specs() -> dict[str, StdExtSpec]:
    return {name: build() for name, build in ISOTROPIC_SPECS.items()}


def modified_specs() -> dict[str, StdExtSpec]:
    return {name + "__dual": dualize(s) for name, s in strict_specs().items()}


def spec_names() -> list[str]:
    return list(STRICT_SPECS) + [n + "__dual" for n in STRICT_SPECS] + list(ISOTROPIC_SPECS)


def get_spec(name: str) -> StdExtSpec:
    if name in STRICT_SPECS:
        return STRICT_SPECS[name]()
    if name in ISOTROPIC_SPECS:
        return ISOTROPIC_SPECS[name]()
    if name.endswith("__dual") and name[:-6] in STRICT_SPECS:
        return dualize(STRICT_SPECS[name[:-6]]())
    raise KeyError(name)


def all_specs() -> dict[str, StdExtSpec]:
    out = {}
    out.update(strict_specs())
    out.update(modified_specs())
    out.update(isotropic_specs())
    for s in out.values():
        require_valid(s)
    return out


# ---------------------------------------------------------------------------
# embedding tables that are not standard extensions


def constant_middle() -> PointMapEmbedding:
    """G(1, V) -> Fl(1, 2, 3, V (+) V), V_1 -> (V_1 (+) 0, V (+) 0, V (+) V_1), over F_2."""
    source = FlagVariety((1,), 2, F2)
    target = FlagVariety((1, 2, 3), 4, F2)
    first = coord(F2, 4, [1, 2])

    def fn(flag: Flag) -> Flag:
        v = flag.spaces[0].basis[0]
        left = span(4, F2, [tuple(v) + (0, 0)])
        right = subspace_sum(first, span(4, F2, [(0, 0) + tuple(v)]))
        return Flag(4, F2, (left, first, right))

    return PointMapEmbedding.from_function(source, target, fn)


def plucker_table(m: int = 2, n: int = 4, field: Field = F2) -> PointMapEmbedding:
    """G(m, F^n) -> G(1, wedge^m F^n)."""
    from math import comb

    big = comb(n, m)
    source = FlagVariety((m,), n, field)
    target = FlagVariety((1,), big, field)
    return PointMapEmbedding.from_function(
        source, target, lambda fl: Flag(big, field, (span(big, field, [plucker_vector(fl.spaces[0])]),)))


def mixing_step(n: int = 2, field: Field = F2) -> PointMapEmbedding:
    """Fl(1, 2^n - 1, V) -> Fl(1, 2^{n+1} - 1, V (+) V), (V1, V3) -> (V1 (+) 0, V (+) V3)."""
    d = 2 ** n
    source = FlagVariety((1, d - 1), d, field)
    target = FlagVariety((1, 2 * d - 1), 2 * d, field)
    first = coord(field, 2 * d, range(1, d + 1))

    def fn(flag: Flag) -> Flag:
        a = span(2 * d, field, [tuple(r) + (0,) * d for r in flag.spaces[0].basis])
        b = subspace_sum(first, span(2 * d, field, [(0,) * d + tuple(r) for r in flag.spaces[1].basis]))
        return Flag(2 * d, field, (a, b))

    return PointMapEmbedding.from_function(source, target, fn)


def plucker_padded() -> PointMapEmbedding:
    """Fl(2, 3, F_2^4) -> Fl(1, 6, F_2^7): Plucker line of V_2, and eps^{-1}(V_3).

    Coordinates of F^7 are (12, 13, 14, 23, 24, 34, f); eps sends
    e14 -> e1, e24 -> e2, e34 -> e3, f -> e4 and the rest to zero.
    """
    source = FlagVariety((2, 3), 4, F2)
    target = FlagVariety((1, 6), 7, F2)
    cols = [(0, 0, 0, 0), (0, 0, 0, 0), unit(4, 1), (0, 0, 0, 0), unit(4, 2), unit(4, 3), unit(4, 4)]
    eps = LinearMap(Matrix.from_columns(F2, cols, 4))
    from .linalg import preimage

    def fn(flag: Flag) -> Flag:
        line = span(7, F2, [tuple(plucker_vector(flag.spaces[0])) + (0,)])
        return Flag(7, F2, (line, preimage(eps, flag.spaces[1])))

    return PointMapEmbedding.from_function(source, target, fn)


def twisted_table() -> PointMapEmbedding:
    """Fl(1, 2, F_2^3) -> Fl(1, 2, F_2^3) permuting the lines inside each plane.

    The first component depends on the whole flag, so no single projection
    controls it.
    """
    source = FlagVariety((1, 2), 3, F2)

    def fn(flag: Flag) -> Flag:
        line, plane = flag.spaces
        lines = sorted((span(3, F2, [v]) for v in plane.vectors() if any(v)), key=lambda s: s.basis)
        nxt = lines[(lines.index(line) + 1) % len(lines)]
        return Flag(3, F2, (nxt, plane))

    return PointMapEmbedding.from_function(source, source, fn)


NEGATIVE_TABLES: dict[str, Callable[[], PointMapEmbedding]] = {
    "constant_middle": constant_middle,
    "plucker_g2_f2_4": plucker_table,
    "mixing_step_n2": mixing_step,
    "plucker_padded": plucker_padded,
    "twisted": twisted_table,
}


# ---------------------------------------------------------------------------
# direct systems with an adapted basis


def _pairs(n: int, e0: bool = False) -> list[str]:
    return (["e0"] if e0 else []) + [x for i in range(1, n + 1) for x in (f"e{i}", f"e^{i}")]


def _one_stage():
    s = naive_spec(F2, (1,), 2, (1, 2), 3, [[], [3]], (0, 1, 1, 2))
    return (s,), Flag(2, F2, (coord(F2, 2, [1]),))


def _two_stage():
    (s,), f1 = _one_stage()
    s2 = naive_spec(F2, (1, 2), 3, (1, 2, 3), 4, [[], [], [4]], (0, 1, 2, 2, 3))
    return (s, s2), f1


def _two_stage_padded():
    (s, s2), f1 = _two_stage()
    s3 = naive_spec(F2, (1, 2, 3), 4, (1, 2, 3), 5, [[], [], []], (0, 1, 2, 3, 4))
    return (s, s2, s3), f1


def _jump_three():
    s = naive_spec(F2, (1,), 2, (1, 3, 4), 5, [[5], [3, 5], [3, 4, 5]], (0, 0, 1, 1, 2))
    return (s,), Flag(2, F2, (coord(F2, 2, [2]),))


def _four_stage():
    s1 = naive_spec(F2, (1,), 2, (1,), 3, [[]], (0, 1, 2))
    s2 = naive_spec(F2, (1,), 3, (1, 2), 4, [[], [4]], (0, 1, 1, 2))
    s3 = naive_spec(F2, (1, 2), 4, (1, 3), 5, [[], [5]], (0, 1, 2, 3))
    s4 = naive_spec(F2, (1, 3), 5, (1, 3, 4), 6, [[], [], [6]], (0, 1, 2, 2, 3))
    return (s1, s2, s3, s4), Flag(2, F2, (coord(F2, 2, [1]),))


def _ternary_two_stage():
    s1 = naive_spec(F3, (1,), 2, (2,), 3, [[3]], (0, 1, 2))
    s2 = naive_spec(F3, (2,), 3, (1, 4), 5, [[4], [4, 5]], (0, 0, 1, 2))
    return (s1, s2), Flag(2, F3, (coord(F3, 2, [2]),))


def _symplectic_chain():
    f1, f2, f3 = (_hyp("symplectic", F3, _pairs(n)) for n in (1, 2, 3))
    a = naive_spec(F3, (1,), 2, (1, 2), 4, [[], [3]], (0, 1, 1, 2), f1, f2)
    b = naive_spec(F3, (1, 2), 4, (1, 2, 3), 6, [[], [], [5]], (0, 1, 2, 2, 3), f2, f3)
    return (a, b), Flag(2, F3, (coord(F3, 2, [1]),))


def _symplectic_f2():
    f2_, f4 = _hyp("symplectic", F2, _pairs(2)), _hyp("symplectic", F2, _pairs(4))
    a = naive_spec(F2, (1,), 4, (1, 3), 8, [[], [5, 7]], (0, 1, 1, 2), f2_, f4)
    return (a,), Flag(4, F2, (coord(F2, 4, [3]),))


def _odd_orthogonal():
    f1, f2, f3 = (_hyp("symmetric", F3, _pairs(n, True)) for n in (1, 2, 3))
    a = naive_spec(F3, (1,), 3, (1, 2), 5, [[], [4]], (0, 1, 1, 2), f1, f2)
    b = naive_spec(F3, (1, 2), 5, (1, 3), 7, [[], [6]], (0, 1, 2, 3), f2, f3)
    return (a, b), Flag(3, F3, (coord(F3, 3, [2]),))


SYSTEMS: dict[str, Callable] = {
    "one_stage": _one_stage,
    "two_stage": _two_stage,
    "two_stage_padded": _two_stage_padded,
    "jump_three": _jump_three,
    "four_stage": _four_stage,
    "ternary_two_stage": _ternary_two_stage,
    "symplectic_chain": _symplectic_chain,
    "symplectic_f2": _symplectic_f2,
    "odd_orthogonal": _odd_orthogonal,
}


def direct_system(name: str):
    from .genflag import DirectSystem

    stages, initial = SYSTEMS[name]()
    return DirectSystem(stages, initial)


def direct_systems() -> dict:
    return {name: direct_system(name) for name in SYSTEMS}
