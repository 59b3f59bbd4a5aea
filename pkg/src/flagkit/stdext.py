"""Strict and modified standard extensions between flag varieties.

A strict extension from Fl(m, V) to Fl(n, V') is the data of a chain
U_1 <= ... <= U_kt of subspaces of V', operators eps_i: U_i -> V that are
surjective or zero, and a monotone surjection pbar: {0..kt+1} -> {0..k+1}.
The j-th target space is eps_j^{-1}(V_{pbar(j)}).

Each eps_i is stored as a matrix from coordinates in the RREF basis of U_i
(coordinates are the entries at the pivot columns) to F^{dim V}.

A modified extension is d o phi' for a strict phi' into the dual flag
variety, d being X -> Ann(X); it stores phi' as ``core``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotAdapted, SpecError
from .field import Field
from .flags import Flag, FlagVariety, enumerate_flags
from .forms import BilinearSpace, is_isotropic, orth_complement, restricted_gram
from .linalg import (
    LinearMap,
    Matrix,
    Subspace,
    annihilator,
    image,
    intersect,
    inverse,
    kernel,
    lift,
    preimage,
    solve,
    span,
    subspace_sum,
)

STRICT = "strict"
MODIFIED = "modified"


# ---------------------------------------------------------------------------
# helpers on (U, eps) pairs


def eps_preimage(u: Subspace, eps: LinearMap, x: Subspace) -> Subspace:
    """eps^{-1}(x) as a subspace of V'."""
    if eps.is_zero:
        return u
    return lift(u, preimage(eps, x))


def eps_kernel(u: Subspace, eps: LinearMap) -> Subspace:
    return lift(u, kernel(eps))


def eps_on(u_big: Subspace, eps_big: LinearMap, u_small: Subspace) -> LinearMap:
    """Matrix of eps_big restricted to ``u_small`` (which must lie in ``u_big``)."""
    cols = [eps_big(u_big.coordinates(b)) for b in u_small.basis]
    return LinearMap(Matrix.from_columns(eps_big.field, cols, eps_big.codomain_dim))


def zero_eps(field: Field, source_dim: int, u: Subspace) -> LinearMap:
    return LinearMap(Matrix.zero(field, source_dim, u.dim))


def _source_space(flag: Flag, idx: int, k: int) -> Subspace:
    if idx == 0:
        return Subspace.zero(flag.field, flag.ambient_dim)
    if idx == k + 1:
        return Subspace.full(flag.field, flag.ambient_dim)
    return flag.spaces[idx - 1]


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class ValidationReport:
    violations: list = dc_field(default_factory=list)
    tags: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, index, message: str) -> None:
        self.violations.append({"code": code, "index": index, "message": message})

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations), "tags": list(self.tags)}


@dataclass(frozen=True)
class StdExtSpec:
    variant: str
    source: FlagVariety
    target: FlagVariety
    u_chain: tuple[Subspace, ...] = ()
    eps: tuple[LinearMap, ...] = ()
    pbar: tuple[int, ...] = ()
    core: "StdExtSpec | None" = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_chain", tuple(self.u_chain))
        object.__setattr__(self, "eps", tuple(self.eps))
        object.__setattr__(self, "pbar", tuple(self.pbar))
        if self.variant == MODIFIED:
            if self.core is None or self.core.variant != STRICT:
                raise ValueError("a modified extension needs a strict core")
        elif self.variant == STRICT:
            if self.core is not None:
                raise ValueError("a strict extension has no core")
        else:
            raise ValueError(f"unknown variant {self.variant!r}")

    # -- convenience -------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.source.dims)

    @property
    def kt(self) -> int:
        return len(self.target.dims)

    @property
    def field(self) -> Field:
        return self.source.field

    @property
    def is_isotropic(self) -> bool:
        return self.source.form is not None or self.target.form is not None

    @property
    def strict_data(self) -> "StdExtSpec":
        return self if self.variant == STRICT else self.core

    def is_constant_component(self, j: int) -> bool:
        s = self.strict_data
        return s.eps[j - 1].is_zero or s.pbar[j] in (0, s.k + 1)

    # -- evaluation --------------------------------------------------------

    def apply(self, flag: Flag, check: bool = True) -> Flag:
        if check and not self.source.contains(flag):
            raise ValueError("flag does not belong to the source variety")
        if self.variant == MODIFIED:
            inner = self.core.apply(flag, check=False)
            return Flag(self.target.ambient, self.field, tuple(annihilator(s) for s in reversed(inner.spaces)))
        out = []
        for j in range(1, self.kt + 1):
            x = _source_space(flag, self.pbar[j], self.k)
            out.append(eps_preimage(self.u_chain[j - 1], self.eps[j - 1], x))
        return Flag(self.target.ambient, self.field, tuple(out))

    __call__ = apply

    def table(self, budget: int | None = None) -> list[tuple[Flag, Flag]]:
        return [(f, self.apply(f, check=False)) for f in enumerate_flags(self.source, budget)]


# ---------------------------------------------------------------------------
# validation


def _is_surjective(eps: LinearMap) -> bool:
    return eps.rank == eps.codomain_dim


def not_linear_exception(source: FlagVariety, target: FlagVariety) -> bool:
    """The orthogonal cases where a standard extension fails to be linear."""
    if source.kind != "orthogonal" or target.kind != "orthogonal":
        return False
    n, n2 = source.ambient, target.ambient
    m, t = set(source.dims), set(target.dims)
    if n % 2 == 0 and n // 2 - 1 in m and (n2 % 2 or n2 // 2 - 1 not in t):
        return True
    if n % 2 == 0 and n // 2 in m:
        half_missing = n2 % 2 or n2 // 2 not in t
        below_missing = n2 % 2 or n2 // 2 - 1 not in t
        if half_missing and below_missing:
            return True
    return False


def validate(spec: StdExtSpec) -> ValidationReport:
    """Every violated invariant, with the offending index."""
    rep = ValidationReport()
    if spec.variant == MODIFIED:
        if spec.is_isotropic:
            rep.add("isotropic_modified", None, "modified extensions are not used for isotropic varieties")
        core = spec.core
        if core.source != spec.source:
            rep.add("core_source", None, "core source differs from the spec source")
        try:
            expected = spec.target.dual()
        except ValueError:
            expected = None
        if core.target != expected:
            rep.add("core_target", None, "core target must be the dual of the spec target")
        inner = validate(core)
        for v in inner.violations:
            rep.violations.append(dict(v, code="core." + v["code"]))
        return rep

    src, tgt = spec.source, spec.target
    f, n, n2 = spec.field, src.ambient, tgt.ambient
    k, kt = spec.k, spec.kt
    if tgt.field != f:
        rep.add("field", None, "source and target fields differ")
        return rep
    if len(spec.u_chain) != kt or len(spec.eps) != kt:
        rep.add("shape", None, f"need {kt} U spaces and operators")
        return rep
    pb = spec.pbar
    if len(pb) != kt + 2:
        rep.add("pbar_length", None, f"pbar must have {kt + 2} entries")
        return rep
    if pb[0] != 0:
        rep.add("pbar_start", 0, "pbar(0) must be 0")
    if pb[-1] != k + 1:
        rep.add("pbar_end", kt + 1, f"pbar({kt + 1}) must be {k + 1}")
    for i in range(kt + 1):
        if pb[i] > pb[i + 1]:
            rep.add("pbar_monotone", i, f"pbar({i}) > pbar({i + 1})")
    if set(pb) != set(range(k + 2)):
        rep.add("pbar_surjective", None, "pbar must hit every index 0..k+1")

    us, es = spec.u_chain, spec.eps
    for i, (u, e) in enumerate(zip(us, es), start=1):
        if u.ambient_dim != n2 or u.field != f:
            rep.add("u_ambient", i, "U lives in the wrong space")
            return rep
        if e.domain_dim != u.dim or e.codomain_dim != n or e.field != f:
            rep.add("eps_shape", i, f"eps_{i} must be a {n}x{u.dim} matrix")
            return rep
        if u.dim == 0:
            rep.add("u_zero", i, f"U_{i} is zero")
        if not e.is_zero and not _is_surjective(e):
            rep.add("eps_surjective", i, f"eps_{i} is nonzero but not surjective")
        if e.is_zero and pb[i] not in (0, k + 1):
            rep.add("eps_zero_middle", i, f"eps_{i} is zero but pbar({i}) = {pb[i]} is a middle index")
    for i in range(1, kt):
        a, b = us[i - 1], us[i]
        ea, eb = es[i - 1], es[i]
        if not a.issubspace(b):
            rep.add("u_chain", i, f"U_{i} is not contained in U_{i + 1}")
            continue
        if not ea.is_zero and not eb.is_zero:
            if eps_on(b, eb, a) != ea:
                rep.add("diagram", i, f"eps_{i + 1} does not restrict to eps_{i} on U_{i}")
        elif ea.is_zero and not eb.is_zero:
            if not a.issubspace(eps_kernel(b, eb)):
                rep.add("diagram", i, f"U_{i} is not in the kernel of eps_{i + 1}")

    for j in range(1, kt + 1):
        e = es[j - 1]
        if e.is_zero:
            d = us[j - 1].dim
        else:
            d = us[j - 1].dim - n + (src.dims[pb[j] - 1] if 1 <= pb[j] <= k else (0 if pb[j] == 0 else n))
        if d != tgt.dims[j - 1]:
            rep.add("target_dim", j, f"component {j} has dimension {d}, target type needs {tgt.dims[j - 1]}")

    if spec.is_isotropic:
        _validate_isotropic(spec, rep)
    return rep


def _validate_isotropic(spec: StdExtSpec, rep: ValidationReport) -> None:
    src, tgt = spec.source, spec.target
    if src.form is None or tgt.form is None or src.kind != tgt.kind:
        rep.add("form_kind", None, "isotropic extensions need forms of the same kind on both sides")
        return
    b, b2 = src.form, tgt.form
    for i, (u, e) in enumerate(zip(spec.u_chain, spec.eps), start=1):
        if e.is_zero:
            if not is_isotropic(b2, u):
                rep.add("constant_isotropic", i, f"constant space U_{i} is not isotropic")
            continue
        g_u = restricted_gram(b2, u)
        g_v = (e.matrix.transpose() @ b.gram) @ e.matrix
        if g_u != g_v:
            rep.add("form_compatible", i, f"eps_{i} does not respect the forms")
        if not is_isotropic(b2, eps_kernel(u, e)):
            rep.add("kernel_isotropic", i, f"ker eps_{i} is not isotropic")
        if spec.pbar[i] == spec.k + 1:
            rep.add("constant_isotropic", i, f"component {i} would contain a nondegenerate copy of V")
    if not_linear_exception(src, tgt):
        rep.tags.append("not_linear_exception")
    if tgt.needs_component and rep.ok:
        first = next(iter(enumerate_flags(src)), None)
        if first is not None and not tgt.contains(spec.apply(first, check=False)):
            rep.add("component", None, "image lies in the other maximal isotropic component")


def require_valid(spec: StdExtSpec) -> StdExtSpec:
    rep = validate(spec)
    if not rep.ok:
        first = rep.violations[0]
        raise SpecError(f"invalid standard extension: {first['message']}", rep.violations)
    return spec


# ---------------------------------------------------------------------------
# constructors


def projection_along(iota: LinearMap, w_hat: Subspace) -> LinearMap:
    """P: V' -> V with P o iota = id and ker P = w_hat."""
    f, n, n2 = iota.field, iota.domain_dim, iota.codomain_dim
    if w_hat.dim + n != n2:
        raise DimensionMismatch("w_hat is not a complement of the embedded V")
    cols = list(iota.matrix.columns()) + list(w_hat.basis)
    try:
        inv = inverse(Matrix.from_columns(f, cols, n2))
    except ValueError:
        raise NotAdapted("embedded V and w_hat do not span V'") from None
    return LinearMap(Matrix(f, n, n2, inv.rows[:n]))


def make_strict(source: FlagVariety, target: FlagVariety, iota: LinearMap, w_hat: Subspace,
                w_chain: Sequence[Subspace], pbar: Sequence[int], check: bool = True) -> StdExtSpec:
    """Strict extension F -> (V_{pbar(i)} (+) W_i)_i from a splitting V' = iota(V) (+) w_hat.

    U_i = W_i and eps_i = 0 where pbar(i) = 0, otherwise U_i = iota(V) (+) W_i with
    eps_i the projection onto V along w_hat.
    """
    f = source.field
    n, n2 = source.ambient, target.ambient
    if iota.domain_dim != n or iota.codomain_dim != n2:
        raise DimensionMismatch("iota must map V into V'")
    if len(w_chain) != len(target.dims) or len(pbar) != len(target.dims) + 2:
        raise DimensionMismatch("w_chain and pbar must match the target type")
    for i, w in enumerate(w_chain, start=1):
        if not w.issubspace(w_hat):
            raise SpecError(f"W_{i} is not inside w_hat", [{"code": "w_in_hat", "index": i, "message": ""}])
    proj = projection_along(iota, w_hat)
    v_img = image(iota, Subspace.full(f, n))
    us, es = [], []
    for i, w in enumerate(w_chain, start=1):
        if pbar[i] == 0:
            us.append(w)
            es.append(zero_eps(f, n, w))
        else:
            u = subspace_sum(v_img, w)
            us.append(u)
            es.append(LinearMap(Matrix.from_columns(f, [proj(b) for b in u.basis], n)))
    spec = StdExtSpec(STRICT, source, target, tuple(us), tuple(es), tuple(pbar))
    return require_valid(spec) if check else spec


def identity_spec(variety: FlagVariety) -> StdExtSpec:
    f, n, k = variety.field, variety.ambient, len(variety.dims)
    full = Subspace.full(f, n)
    ident = LinearMap(Matrix.identity(f, n))
    return StdExtSpec(STRICT, variety, variety, (full,) * k, (ident,) * k, tuple(range(k + 2)))


def constant_spec(source: FlagVariety, target: FlagVariety, value: Flag) -> StdExtSpec:
    """The constant map onto ``value`` (U_i = W_i = value_i, eps_i = 0)."""
    f, kt = source.field, len(target.dims)
    k = len(source.dims)
    pb = (0,) * (kt + 1) + (k + 1,)
    if k > 0:
        raise ValueError("a constant map is only an embedding on a one-point source")
    es = tuple(zero_eps(f, source.ambient, u) for u in value.spaces)
    return StdExtSpec(STRICT, source, target, value.spaces, es, pb)


# ---------------------------------------------------------------------------
# splitting (naive form)


@dataclass(frozen=True)
class Splitting:
    """V' = sigma(V) (+) w_hat with component j equal to sigma(V_{pbar(j)}) (+) W_j."""

    sigma: LinearMap
    w_hat: Subspace
    w_chain: tuple[Subspace, ...]
    pbar: tuple[int, ...]

    def naive_apply(self, flag: Flag, k: int) -> Flag:
        out = []
        for j, w in enumerate(self.w_chain, start=1):
            x = image(self.sigma, _source_space(flag, self.pbar[j], k))
            out.append(subspace_sum(x, w))
        return Flag(self.sigma.codomain_dim, self.sigma.field, tuple(out))


def _section(u: Subspace, e: LinearMap, inside: Subspace | None = None) -> LinearMap:
    """sigma: V -> U with e o sigma = id, optionally with image in ``inside``."""
    f, n = e.field, e.codomain_dim
    if inside is not None:
        u_in = intersect(u, inside)
        e = eps_on(u, e, u_in)
        u = u_in
    cols = []
    for k in range(n):
        target = tuple(f(int(i == k)) for i in range(n))
        c = solve(e.matrix, target)
        if c is None:
            raise NotAdapted("cannot find a section of eps inside the requested subspace")
        cols.append(u.from_coordinates(c))
    return LinearMap(Matrix.from_columns(f, cols, u.ambient_dim))


def splitting(spec: StdExtSpec, w_hat: Subspace | None = None) -> Splitting:
    """A splitting in the sense of the naive description of a strict extension.

    With ``w_hat`` given, it is used as the complement (and must be adapted).
    Constant specs have no splitting.
    """
    if spec.variant != STRICT:
        raise ValueError("splittings exist for strict extensions")
    f, n, n2, k = spec.field, spec.source.ambient, spec.target.ambient, spec.k
    us, es, pb = spec.u_chain, spec.eps, spec.pbar
    driven = [i for i in range(1, spec.kt + 1) if 1 <= pb[i] <= k]
    if not driven:
        raise ValueError("a constant extension has no splitting")
    s = driven[0]
    u_s, e_s = us[s - 1], es[s - 1]
    iso = spec.target.form is not None
    if w_hat is not None:
        if w_hat.dim != n2 - n:
            raise NotAdapted(f"w_hat must have dimension {n2 - n}")
        if intersect(u_s, w_hat) != eps_kernel(u_s, e_s):
            raise NotAdapted("w_hat meets U_s outside ker eps_s")
        sigma = _section(u_s, e_s, orth_complement(spec.target.form, w_hat) if iso else None)
        if iso and not orth_complement(spec.target.form, w_hat) == image(sigma, Subspace.full(f, n)):
            raise NotAdapted("w_hat is not the orthogonal complement of V")
    else:
        sigma = _section(u_s, e_s)
        v_img = image(sigma, Subspace.full(f, n))
        if iso:
            w_hat = orth_complement(spec.target.form, v_img)
        else:
            last = max(i for i in range(1, spec.kt + 1) if not es[i - 1].is_zero)
            gens = list(eps_kernel(us[last - 1], es[last - 1]).basis)
            for i in range(last + 1, spec.kt + 1):
                gens = _extend_complement(gens, v_img, us[i - 1].basis)
            e_std = [tuple(int(a == b) for b in range(n2)) for a in range(n2)]
            gens = _extend_complement(gens, v_img, e_std)
            w_hat = span(n2, f, gens)
    v_img = image(sigma, Subspace.full(f, n))
    if intersect(v_img, w_hat).dim or v_img.dim + w_hat.dim != n2:
        raise NotAdapted("sigma(V) and w_hat are not complementary")

    w_chain = []
    for i in range(1, spec.kt + 1):
        u, e = us[i - 1], es[i - 1]
        if pb[i] == 0:
            w = u if e.is_zero else eps_kernel(u, e)
        else:
            if not v_img.issubspace(u):
                raise NotAdapted(f"U_{i} does not contain sigma(V)")
            if not e.is_zero:
                for k_, col in enumerate(sigma.matrix.columns()):
                    if e(u.coordinates(col)) != tuple(f(int(a == k_)) for a in range(n)):
                        raise NotAdapted(f"eps_{i} o sigma is not the identity")
            w = intersect(u, w_hat)
            if w.dim != u.dim - n:
                raise NotAdapted(f"U_{i} does not split along w_hat")
        if not w.issubspace(w_hat):
            raise NotAdapted(f"W_{i} is not inside w_hat")
        w_chain.append(w)
    return Splitting(sigma, w_hat, tuple(w_chain), pb)


def _extend_complement(gens: list, base: Subspace, candidates: Iterable) -> list:
    gens = list(gens)
    cur = subspace_sum(base, span(base.ambient_dim, base.field, gens)) if gens else base
    for c in candidates:
        if not cur.contains(c):
            gens.append(tuple(c))
            cur = subspace_sum(cur, span(base.ambient_dim, base.field, [c]))
    return gens


# ---------------------------------------------------------------------------
# duality, transpose, composition


def dualize(spec: StdExtSpec) -> StdExtSpec:
    """The spec of d o apply(spec); an exact involution."""
    if spec.is_isotropic:
        raise ValueError("duality is not used for isotropic extensions")
    if spec.variant == MODIFIED:
        return spec.core
    return StdExtSpec(MODIFIED, spec.source, spec.target.dual(), core=spec)


def transpose(spec: StdExtSpec) -> StdExtSpec:
    """Strict spec of X -> Ann(spec(Ann X)) from source.dual() to target.dual()."""
    if spec.variant != STRICT or spec.is_isotropic:
        raise ValueError("transpose is defined for ordinary strict extensions")
    f, n, k, kt = spec.field, spec.source.ambient, spec.k, spec.kt
    src_d, tgt_d = spec.source.dual(), spec.target.dual()
    pb_d = tuple(k + 1 - spec.pbar[kt + 1 - j] for j in range(kt + 2))
    if not any(1 <= x <= k for x in spec.pbar[1:-1]):
        us = tuple(annihilator(u if e.is_zero else eps_kernel(u, e) if spec.pbar[i] == 0 else u)
                   for i, (u, e) in enumerate(zip(spec.u_chain, spec.eps), start=1))
        us = tuple(reversed(us))
        return StdExtSpec(STRICT, src_d, tgt_d, us, tuple(zero_eps(f, n, u) for u in us), pb_d)
    sp = splitting(spec)
    proj = projection_along(sp.sigma, sp.w_hat)
    iota_d = LinearMap(proj.matrix.transpose())
    sv_ann = annihilator(image(sp.sigma, Subspace.full(f, n)))
    w_d = [intersect(annihilator(sp.w_chain[kt - j]), sv_ann) for j in range(1, kt + 1)]
    return make_strict(src_d, tgt_d, iota_d, sv_ann, w_d, pb_d)


def _compose_strict(f_: StdExtSpec, g: StdExtSpec) -> StdExtSpec:
    fld = f_.field
    n = f_.source.ambient
    us, es, pb = [], [], []
    for j in range(1, g.kt + 1):
        i = g.pbar[j]
        u2, e2 = g.u_chain[j - 1], g.eps[j - 1]
        if i == 0:
            u = u2 if e2.is_zero else eps_kernel(u2, e2)
            us.append(u)
            es.append(zero_eps(fld, n, u))
            pb.append(0)
        elif i == f_.kt + 1:
            us.append(u2)
            es.append(zero_eps(fld, n, u2))
            pb.append(f_.k + 1)
        else:
            u1, e1 = f_.u_chain[i - 1], f_.eps[i - 1]
            if e2.is_zero:
                raise SpecError("middle component with zero operator", [])
            u = eps_preimage(u2, e2, u1)
            if e1.is_zero:
                e = zero_eps(fld, n, u)
            else:
                cols = [e1(u1.coordinates(e2(u2.coordinates(b)))) for b in u.basis]
                e = LinearMap(Matrix.from_columns(fld, cols, n))
            us.append(u)
            es.append(e)
            pb.append(f_.pbar[i])
    return StdExtSpec(STRICT, f_.source, g.target, tuple(us), tuple(es), (0, *pb, f_.k + 1))


def compose(f_: StdExtSpec, g: StdExtSpec) -> StdExtSpec:
    """Spec of apply(g) o apply(f_)."""
    if f_.target != g.source:
        raise DimensionMismatch(f"target {f_.target} of the first map differs from source {g.source} of the second")
    if f_.variant == STRICT and g.variant == STRICT:
        return _compose_strict(f_, g)
    if f_.variant == STRICT:
        return StdExtSpec(MODIFIED, f_.source, g.target, core=_compose_strict(f_, g.core))
    if g.variant == STRICT:
        return StdExtSpec(MODIFIED, f_.source, g.target, core=_compose_strict(f_.core, transpose(g)))
    return _compose_strict(f_.core, transpose(g.core))


def compose_all(specs: Sequence[StdExtSpec]) -> StdExtSpec:
    out = specs[0]
    for s in specs[1:]:
        out = compose(out, s)
    return out


# ---------------------------------------------------------------------------
# elementary decomposition


def _default_blocks(spec: StdExtSpec, basis_w: Sequence[Sequence]) -> list[list[int]]:
    form = spec.target.form
    if form is None:
        return [[i] for i in range(len(basis_w))]
    blocks, used = [], set()
    for i, w in enumerate(basis_w):
        if i in used:
            continue
        if form.pair(w, w) != 0:
            blocks.append([i])
            used.add(i)
            continue
        partner = next((j for j in range(i + 1, len(basis_w))
                        if j not in used and form.pair(w, basis_w[j]) != 0), None)
        if partner is None:
            raise NotAdapted("basis of w_hat is not a union of hyperbolic pairs")
        blocks.append([i, partner])
        used.update((i, partner))
    return blocks


def decompose_elementary(spec: StdExtSpec, basis_w: Sequence[Sequence] | None = None,
                         blocks: Sequence[Sequence[int]] | None = None) -> list[StdExtSpec]:
    """Factor a strict spec into steps that each add one block of ``basis_w``.

    Ordinary blocks are single vectors; isotropic blocks default to
    hyperbolic pairs. Every W_j must be spanned by a subset of ``basis_w``.
    """
    if spec.variant != STRICT:
        raise ValueError("decompose_elementary needs a strict extension")
    f, n, n2 = spec.field, spec.source.ambient, spec.target.ambient
    if basis_w is None:
        sp = splitting(spec)
        basis_w = list(sp.w_hat.basis)
    basis_w = [tuple(f(x) for x in w) for w in basis_w]
    if len(basis_w) <= 1 and blocks is None:
        return [spec]
    sp = splitting(spec, span(n2, f, basis_w))
    if len(basis_w) != n2 - n:
        raise NotAdapted("basis_w must be a basis of w_hat")
    blocks = [list(b) for b in blocks] if blocks is not None else _default_blocks(spec, basis_w)
    if sorted(i for b in blocks for i in b) != list(range(len(basis_w))):
        raise NotAdapted("blocks must partition the basis of w_hat")
    if len(blocks) == 1:
        return [spec]

    # membership of basis vectors in the W chain; W_j must be coordinate
    member = []
    for j, w in enumerate(sp.w_chain, start=1):
        inside = [idx for idx, b in enumerate(basis_w) if w.contains(b)]
        if span(n2, f, [basis_w[i] for i in inside]) != w:
            raise NotAdapted(f"W_{j} is not a coordinate subspace of basis_w")
        member.append(frozenset(inside))

    # stage t: coordinates (sigma e_1..e_n, block_1, ..., block_t)
    order: list[int] = []
    stage_sizes = [n]
    for b in blocks:
        order += b
        stage_sizes.append(n + len(order))
    sigma_cols = list(sp.sigma.matrix.columns())
    m_dims = (0,) + spec.source.dims + (n,)

    def stage_key(j: int, t: int):
        added = frozenset(order[: stage_sizes[t] - n])
        return (sp.pbar[j], member[j - 1] & added)

    def stage_chain(t: int):
        """Distinct proper nonzero stage-t spaces as (pbar, W-set) keys, in order."""
        keys = []
        total = stage_sizes[t]
        for j in range(1, spec.kt + 1):
            key = stage_key(j, t)
            d = m_dims[key[0]] + len(key[1])
            if 0 < d < total and key not in keys:
                keys.append(key)
        return keys

    chains = [stage_chain(t) for t in range(len(blocks) + 1)]
    varieties = [spec.source]
    for t in range(1, len(blocks)):
        size = stage_sizes[t]
        dims = tuple(m_dims[p] + len(w) for p, w in chains[t])
        form = None
        if spec.target.form is not None:
            basis = sigma_cols + [basis_w[i] for i in order[: size - n]]
            rows = [[spec.target.form.pair(a, c) for c in basis] for a in basis]
            form = BilinearSpace(spec.target.form.kind, Matrix.from_rows(f, rows, size))
        varieties.append(_stage_variety(dims, size, f, form, spec, chains[t], order, n))
    varieties.append(spec.target)

    steps = []
    for t in range(1, len(blocks) + 1):
        prev_size, size = stage_sizes[t - 1], stage_sizes[t]
        prev_chain, chain = chains[t - 1], chains[t]
        last = t == len(blocks)
        if last:
            cols = sigma_cols + [basis_w[i] for i in order[: prev_size - n]]
            iota = LinearMap(Matrix.from_columns(f, cols, n2))
            new_vecs = [basis_w[i] for i in blocks[t - 1]]
            amb = n2
        else:
            iota = LinearMap(Matrix.from_columns(
                f, [tuple(int(r == c) for r in range(size)) for c in range(prev_size)], size))
            new_vecs = [tuple(int(r == c) for r in range(size)) for c in range(prev_size, size)]
            amb = size
        new_idx = blocks[t - 1]
        w_hat = span(amb, f, new_vecs)
        targets = ([stage_key(j, t) for j in range(1, spec.kt + 1)] if last else chain)
        w_chain, pb = [], [0]
        for key in targets:
            p, wset = key
            prev_key = (p, wset - frozenset(new_idx))
            d_prev = m_dims[p] + len(prev_key[1])
            if d_prev == 0:
                pb.append(0)
            elif d_prev == prev_size:
                pb.append(len(prev_chain) + 1)
            else:
                pb.append(prev_chain.index(prev_key) + 1)
            w_chain.append(span(amb, f, [v for i, v in zip(new_idx, new_vecs) if i in wset]))
        pb.append(len(prev_chain) + 1)
        steps.append(make_strict(varieties[t - 1], varieties[t], iota, w_hat, w_chain, pb))
    return steps


def _stage_variety(dims, size, f, form, spec, chain, order, n) -> FlagVariety:
    if form is None or not (dims and 2 * dims[-1] == size and form.kind == "symmetric"):
        return FlagVariety(dims, size, f, form)
    # pick the component containing the image of the first source flag
    first = next(iter(enumerate_flags(spec.source)))
    p, wset = chain[-1]
    src_space = _source_space(first, p, spec.k)
    rows = [tuple(row) + (0,) * (size - n) for row in src_space.basis]
    pos = {idx: n + i for i, idx in enumerate(order)}
    rows += [tuple(int(r == pos[idx]) for r in range(size)) for idx in wset]
    ref = span(size, f, rows)
    return FlagVariety(dims, size, f, form, component_ref=ref)
