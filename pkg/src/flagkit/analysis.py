"""Classification of embeddings of finite flag varieties given as point tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import BudgetExceeded
from .field import Field
from .flags import Flag, FlagVariety, _sqrt, enumerate_flags
from .forms import restricted_gram
from .linalg import (
    LinearMap,
    Matrix,
    Subspace,
    _nullspace_rows,
    annihilator,
    intersect,
    subspace_sum,
)
from .stdext import (
    MODIFIED,
    STRICT,
    StdExtSpec,
    eps_kernel,
    eps_on,
    eps_preimage,
    validate,
    zero_eps,
)

MAX_CANDIDATES = 10_000
DEFAULT_MAX_PAIRS = 5_000_000


@dataclass(frozen=True)
class PointMapEmbedding:
    source: FlagVariety
    target: FlagVariety
    table: tuple[tuple[Flag, Flag], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple((a, b) for a, b in self.table))

    @classmethod
    def from_spec(cls, spec: StdExtSpec, budget: int | None = None) -> "PointMapEmbedding":
        return cls(spec.source, spec.target, tuple(spec.table(budget)))

    @classmethod
    def from_function(cls, source: FlagVariety, target: FlagVariety, fn, budget: int | None = None):
        return cls(source, target, tuple((f, fn(f)) for f in enumerate_flags(source, budget)))

    def as_dict(self) -> dict:
        return dict(self.table)

    def __len__(self) -> int:
        return len(self.table)


def dual_embedding(e: PointMapEmbedding) -> PointMapEmbedding:
    """d^{-1} o e: images replaced by their annihilator flags."""
    tgt = e.target.dual()
    rows = tuple((f, Flag(tgt.ambient, tgt.field, tuple(annihilator(s) for s in reversed(g.spaces))))
                 for f, g in e.table)
    return PointMapEmbedding(e.source, tgt, rows)


def verify_embedding(e: PointMapEmbedding, check_total: bool = True) -> bool:
    images = [g for _, g in e.table]
    if len(set(images)) != len(images):
        return False
    if len({f for f, _ in e.table}) != len(e.table):
        return False
    if not all(e.target.contains(g) for g in images):
        return False
    if not all(e.source.contains(f) for f, _ in e.table):
        return False
    if check_total:
        try:
            count = sum(1 for _ in enumerate_flags(e.source))
        except BudgetExceeded:
            return False
        if count != len(e.table):
            return False
    return True


# ---------------------------------------------------------------------------
# induced grassmannian maps


@dataclass(frozen=True)
class GrassMap:
    """A map G(m, F^n) -> G(r, F^N) given on the subspaces that occur."""

    field: Field
    source_ambient: int
    target_ambient: int
    pairs: tuple[tuple[Subspace, Subspace], ...]

    @property
    def is_constant(self) -> bool:
        return len({b for _, b in self.pairs}) == 1

    @property
    def target_dim(self) -> int:
        return self.pairs[0][1].dim


@dataclass
class InducedMaps:
    linear_like: bool
    p: tuple[int, ...]
    maps: dict = dc_field(default_factory=dict)        # j -> GrassMap for nonconstant j
    constants: dict = dc_field(default_factory=dict)   # j -> Subspace
    failed_component: int | None = None
    ties: dict = dc_field(default_factory=dict)        # j -> all admissible i

    def nonconstant(self) -> list[int]:
        return sorted(self.maps)


def induced_grassmannian_maps(e: PointMapEmbedding) -> InducedMaps:
    """Type map p and the factored maps G(m_{p(j)}) -> G(n_j).

    Component j is constant (p(j) = 0) or factors through the smallest
    source projection on whose fibers it is constant.
    """
    k, kt = len(e.source.dims), len(e.target.dims)
    p = [0]
    res = InducedMaps(True, ())
    for j in range(1, kt + 1):
        values = [g.spaces[j - 1] for _, g in e.table]
        if len(set(values)) == 1:
            p.append(0)
            res.constants[j] = values[0]
            continue
        found = []
        for i in range(1, k + 1):
            fiber: dict = {}
            ok = True
            for f, g in e.table:
                key, val = f.spaces[i - 1], g.spaces[j - 1]
                if fiber.setdefault(key, val) != val:
                    ok = False
                    break
            if ok:
                found.append((i, fiber))
        if not found:
            res.linear_like = False
            res.failed_component = j
            p.append(None)
            break
        i, fiber = found[0]
        if len(found) > 1:
            res.ties[j] = [x for x, _ in found]
        p.append(i)
        res.maps[j] = GrassMap(e.source.field, e.source.ambient, e.target.ambient, tuple(fiber.items()))
    res.p = tuple(p)
    return res


# ---------------------------------------------------------------------------
# direct products


@dataclass(frozen=True)
class ProductWitness:
    kind: str                      # "constant_gap" or "mixable"
    target_blocks: tuple[tuple[int, ...], tuple[int, ...]]
    source_blocks: tuple[tuple[int, ...], tuple[int, ...]]
    type_blocks: tuple[tuple[int, ...], tuple[int, ...]]

    def to_json(self) -> dict:
        return {"kind": self.kind, "target_blocks": [list(b) for b in self.target_blocks],
                "source_blocks": [list(b) for b in self.source_blocks],
                "type_blocks": [list(b) for b in self.type_blocks]}


def _is_target_flag(target: FlagVariety, spaces: Sequence[Subspace]) -> bool:
    for a, b in zip(spaces, spaces[1:]):
        if not a < b:
            return False
    return target.contains(Flag(target.ambient, target.field, tuple(spaces)))


def _witness(kind, e, induced, block_a, block_b) -> ProductWitness:
    dims = e.source.dims
    src_a = tuple(sorted({induced.p[j] for j in block_a}))
    src_b = tuple(sorted({induced.p[j] for j in block_b}))
    return ProductWitness(kind, (tuple(block_a), tuple(block_b)), (src_a, src_b),
                          (tuple(dims[i - 1] for i in src_a), tuple(dims[i - 1] for i in src_b)))


def detect_product_factorization(e: PointMapEmbedding, induced: InducedMaps,
                                 max_pairs: int = DEFAULT_MAX_PAIRS) -> ProductWitness | None:
    kt = len(e.target.dims)
    nonconst = induced.nonconstant()
    # a constant component strictly between nonconstant ones
    for l in range(1, kt + 1):
        if l in induced.constants and any(j < l for j in nonconst) and any(j > l for j in nonconst):
            a = [j for j in nonconst if j < l]
            b = [j for j in nonconst if j > l]
            return _witness("constant_gap", e, induced, a, b)
    if len(nonconst) < 2:
        return None
    first, rest = nonconst[0], nonconst[1:]
    for r in range(0, len(rest)):
        for extra in itertools.combinations(rest, r):
            block_a = [first, *extra]
            block_b = [j for j in rest if j not in extra]
            if _mixable(e, induced, block_a, block_b, max_pairs):
                return _witness("mixable", e, induced, block_a, block_b)
    return None


def _mixable(e, induced, block_a, block_b, max_pairs) -> bool:
    src_a = sorted({induced.p[j] for j in block_a})
    src_b = sorted({induced.p[j] for j in block_b})
    vals_a, vals_b, keys_a, keys_b = set(), set(), set(), set()
    for f, g in e.table:
        vals_a.add(tuple(g.spaces[j - 1] for j in block_a))
        vals_b.add(tuple(g.spaces[j - 1] for j in block_b))
        keys_a.add(tuple(f.spaces[i - 1] for i in src_a))
        keys_b.add(tuple(f.spaces[i - 1] for i in src_b))
    # the blocks must determine the partial source flags (psi injective)
    if len(vals_a) != len(keys_a) or len(vals_b) != len(keys_b):
        return False
    if len(vals_a) * len(vals_b) > max_pairs:
        raise BudgetExceeded(f"mixability check needs {len(vals_a) * len(vals_b)} pairs, budget is {max_pairs}")
    kt = len(e.target.dims)
    consts = induced.constants
    for va in sorted(vals_a, key=_space_key):
        for vb in sorted(vals_b, key=_space_key):
            spaces = []
            for j in range(1, kt + 1):
                if j in consts:
                    spaces.append(consts[j])
                elif j in block_a:
                    spaces.append(va[block_a.index(j)])
                else:
                    spaces.append(vb[block_b.index(j)])
            if not _is_target_flag(e.target, spaces):
                return False
    return True


def _space_key(spaces):
    return tuple(s.basis for s in spaces)


# ---------------------------------------------------------------------------
# grassmannian components


def check_projective_factorization(g: GrassMap) -> bool:
    """Whether the image lies in a linear projective subspace of G(n, V')."""
    if g.is_constant:
        raise ValueError("projective factorization is tested for nonconstant maps")
    images = [b for _, b in g.pairs]
    n = g.target_dim
    meet, join = images[0], images[0]
    for x in images[1:]:
        meet = intersect(meet, x)
        join = subspace_sum(join, x)
    return meet.dim >= n - 1 or join.dim <= n + 1


@dataclass(frozen=True)
class Recovery:
    w: Subspace
    u: Subspace
    eps: LinearMap | None
    marker: str            # "ok", "constant" or "no_epsilon"

    @property
    def ok(self) -> bool:
        return self.marker in ("ok", "constant")


def _normalize(vec: list, f: Field) -> list:
    lead = next((x for x in vec if x != 0), None)
    if lead is None:
        return vec
    inv = f.inv(lead)
    return [f(x * inv) for x in vec]


def recover_standard_data(g: GrassMap) -> Recovery:
    """W, U and eps with g(X) = eps^{-1}(X), eps normalized to a leading 1."""
    f = g.field
    images = [b for _, b in g.pairs]
    meet, join = images[0], images[0]
    for x in images[1:]:
        meet = intersect(meet, x)
        join = subspace_sum(join, x)
    n_src = g.source_ambient
    if len(set(images)) == 1:
        return Recovery(meet, join, zero_eps(f, n_src, join), "constant")
    du = join.dim
    nunk = n_src * du
    # E (n_src x du) with E c_u in X for u in g(X), and E c_w = 0 for w in W
    rows: dict[int, list] = {}

    def add(eq: list) -> bool:
        eq = list(eq)
        for piv, row in rows.items():
            c = eq[piv]
            if c != 0:
                eq = [f(a - c * b) for a, b in zip(eq, row)]
        lead = next((i for i, x in enumerate(eq) if x != 0), None)
        if lead is None:
            return False
        inv = f.inv(eq[lead])
        eq = [f(x * inv) for x in eq]
        for piv in list(rows):
            c = rows[piv][lead]
            if c != 0:
                rows[piv] = [f(a - c * b) for a, b in zip(rows[piv], eq)]
        rows[lead] = eq
        return True

    def equations(ann_rows, vec):
        c = join.coordinates(vec)
        for a in ann_rows:
            yield [f(a[r] * c[col]) for r in range(n_src) for col in range(du)]

    unit_rows = [tuple(int(i == r) for i in range(n_src)) for r in range(n_src)]
    for w in meet.basis:
        for eq in equations(unit_rows, w):
            add(eq)
    for x, img in g.pairs:
        ann = annihilator(x).basis
        for u in img.basis:
            for eq in equations(ann, u):
                add(eq)
                if len(rows) == nunk:
                    return Recovery(meet, join, None, "no_epsilon")
    null = _nullspace_rows(list(rows.values()), nunk, f)
    if not null:
        return Recovery(meet, join, None, "no_epsilon")
    d = len(null)
    if not f.is_finite and d > 1:
        return Recovery(meet, join, None, "no_epsilon")
    if f.is_finite and f.p ** d > MAX_CANDIDATES:
        return Recovery(meet, join, None, "no_epsilon")
    for coeffs in _projective_points(d, f):
        vec = [f(0)] * nunk
        for c, v in zip(coeffs, null):
            if c != 0:
                vec = [f(a + c * b) for a, b in zip(vec, v)]
        vec = _normalize(vec, f)
        mat = Matrix(f, n_src, du, tuple(tuple(vec[r * du:(r + 1) * du]) for r in range(n_src)))
        eps = LinearMap(mat)
        if eps.rank != n_src:
            continue
        if eps_kernel(join, eps) != meet:
            continue
        if all(eps_preimage(join, eps, x) == img for x, img in g.pairs):
            return Recovery(meet, join, eps, "ok")
    return Recovery(meet, join, None, "no_epsilon")


def _projective_points(d: int, f: Field):
    """Coefficient vectors with leading coefficient 1, in a fixed order."""
    if not f.is_finite:
        yield (f(1),)
        return
    for lead in range(d):
        for tail in itertools.product(range(f.p), repeat=d - lead - 1):
            yield (0,) * lead + (1,) + tail


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    kind: str                        # strict_standard | modified_standard | not_standard
    spec: StdExtSpec | None = None
    reason: str | None = None
    p: tuple | None = None
    evidence: dict = dc_field(default_factory=dict)

    @property
    def is_standard(self) -> bool:
        return self.kind != "not_standard"


def _assemble_strict(e: PointMapEmbedding, induced: InducedMaps) -> tuple[StdExtSpec | None, dict]:
    """Recover each component and glue them into a strict spec, or explain why not."""
    f = e.source.field
    n = e.source.ambient
    k, kt = len(e.source.dims), len(e.target.dims)
    nonconst = induced.nonconstant()
    recs = {}
    for j in nonconst:
        r = recover_standard_data(induced.maps[j])
        recs[j] = r
        if not r.ok:
            return None, {"failed": "no_epsilon", "component": j}
    us, es, pb = [], [], [0]
    prev = None
    for j in range(1, kt + 1):
        if j in induced.constants:
            u = induced.constants[j]
            us.append(u)
            es.append(zero_eps(f, n, u))
            before = not nonconst or j < nonconst[0]
            pb.append(0 if before else k + 1)
            continue
        r = recs[j]
        eps = r.eps
        if prev is not None:
            pu, pe = prev
            if not pu.issubspace(r.u):
                return None, {"failed": "u_chain", "component": j}
            restr = eps_on(r.u, eps, pu)
            c = _ratio(restr.matrix, pe.matrix, f)
            if c is None:
                return None, {"failed": "diagram", "component": j}
            eps = LinearMap(eps.matrix.scale(f.inv(c)))
        us.append(r.u)
        es.append(eps)
        pb.append(induced.p[j])
        prev = (r.u, eps)
    pb.append(k + 1)
    if e.target.form is not None and e.source.form is not None:
        es = _match_forms(e, us, es)
        if es is None:
            return None, {"failed": "form_scaling"}
    spec = StdExtSpec(STRICT, e.source, e.target, tuple(us), tuple(es), tuple(pb))
    rep = validate(spec)
    if not rep.ok:
        return None, {"failed": "validation", "violations": rep.violations}
    for src, img in e.table:
        if spec.apply(src, check=False) != img:
            return None, {"failed": "apply_mismatch"}
    return spec, {"recovered": {j: {"w": recs[j].w, "u": recs[j].u} for j in nonconst}}


def _ratio(a: Matrix, b: Matrix, f: Field):
    """c with a = c b, if any (b nonzero)."""
    c = None
    for ra, rb in zip(a.rows, b.rows):
        for x, y in zip(ra, rb):
            if y == 0:
                if x != 0:
                    return None
                continue
            q = f(x * f.inv(y))
            if c is None:
                c = q
            elif c != q:
                return None
    return c if c not in (None, 0) else None


def _match_forms(e, us, es):
    """Rescale all nonzero eps by one c so that they respect the forms."""
    f = e.source.field
    b, b2 = e.source.form, e.target.form
    lam = None
    for u, eps in zip(us, es):
        if eps.is_zero:
            continue
        g_u = restricted_gram(b2, u)
        g_v = (eps.matrix.transpose() @ b.gram) @ eps.matrix
        lam = _ratio(g_u, g_v, f)
        break
    if lam is None:
        return None
    c = _sqrt(f, lam)
    if c is None:
        return None
    return [eps if eps.is_zero else LinearMap(eps.matrix.scale(c)) for eps in es]


def classify(e: PointMapEmbedding, max_pairs: int = DEFAULT_MAX_PAIRS,
             check_total: bool = True) -> Classification:
    """strict_standard / modified_standard with a spec, or not_standard with the failed stage."""
    if not verify_embedding(e, check_total):
        return Classification("not_standard", reason="not_an_embedding")
    induced = induced_grassmannian_maps(e)
    if not induced.linear_like:
        return Classification("not_standard", reason="not_linear_like", p=induced.p,
                              evidence={"component": induced.failed_component})
    ev: dict = {"ties": induced.ties}
    witness = detect_product_factorization(e, induced, max_pairs)
    if witness is not None:
        return Classification("not_standard", reason="factors_through_product", p=induced.p,
                              evidence={"witness": witness.to_json()})
    spec, info = _assemble_strict(e, induced)
    if spec is not None:
        return Classification("strict_standard", spec=spec, p=induced.p, evidence={**ev, **info})
    ev["strict_attempt"] = info
    if e.target.form is None:
        de = dual_embedding(e)
        dinduced = induced_grassmannian_maps(de)
        if dinduced.linear_like:
            core, dinfo = _assemble_strict(de, dinduced)
            if core is not None:
                spec = StdExtSpec(MODIFIED, e.source, e.target, core=core)
                return Classification("modified_standard", spec=spec, p=induced.p, evidence={**ev, **dinfo})
            ev["modified_attempt"] = dinfo
    pf = [j for j in induced.nonconstant() if check_projective_factorization(induced.maps[j])]
    if pf:
        return Classification("not_standard", reason="fails_condition_c", p=induced.p,
                              evidence={**ev, "projective_components": pf})
    return Classification("not_standard", reason="no_consistent_spec", p=induced.p, evidence=ev)


@dataclass
class AdmissibilityReport:
    admissible: bool
    linear_like: bool
    p: tuple
    product_witness: ProductWitness | None = None
    projective_components: list = dc_field(default_factory=list)
    flags: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"admissible": self.admissible, "linear_like": self.linear_like,
                "p": list(self.p) if self.p is not None else None,
                "product_witness": self.product_witness.to_json() if self.product_witness else None,
                "projective_components": list(self.projective_components), "flags": list(self.flags)}


def is_admissible(e: PointMapEmbedding, max_pairs: int = DEFAULT_MAX_PAIRS) -> AdmissibilityReport:
    flags = ["isotropic_condition_c_partial"] if e.target.form is not None else []
    induced = induced_grassmannian_maps(e)
    if not induced.linear_like:
        return AdmissibilityReport(False, False, induced.p, flags=flags)
    witness = detect_product_factorization(e, induced, max_pairs)
    pf = [j for j in induced.nonconstant() if check_projective_factorization(induced.maps[j])]
    ok = witness is None and not pf
    return AdmissibilityReport(ok, True, induced.p, witness, pf, flags)


__all__ = [
    "PointMapEmbedding", "GrassMap", "InducedMaps", "ProductWitness", "Recovery", "Classification",
    "AdmissibilityReport", "verify_embedding", "induced_grassmannian_maps", "detect_product_factorization",
    "check_projective_factorization", "recover_standard_data", "classify", "is_admissible", "dual_embedding",
]
