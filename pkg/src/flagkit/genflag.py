"""Generalized flags attached to direct systems of standard extensions.

Everything is finite: a direct system is evaluated at its last stage, and
a generalized flag is presented by an ordered partition of the basis
labels into classes. Classes can only split as more stages are appended.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import NotAdapted
from .field import Field
from .flags import Flag, FlagType, FlagVariety
from .forms import is_isotropic, labeled_form, orth_complement
from .linalg import Matrix, Subspace, intersect, span
from .stdext import (
    STRICT,
    StdExtSpec,
    compose_all,
    decompose_elementary,
    eps_kernel,
    eps_on,
)


def partner(label: str) -> str | None:
    if label == "e0":
        return None
    if label.startswith("e^"):
        return "e" + label[2:]
    return "e^" + label[1:]


@dataclass(frozen=True)
class OrderedBasis:
    """Labels in enumeration order plus a rank function for the order.

    Labels of equal rank are equivalent; smaller rank means earlier.
    """

    labels: tuple[str, ...]
    rank: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "rank", tuple(self.rank))
        if len(set(self.labels)) != len(self.labels) or len(self.rank) != len(self.labels):
            raise ValueError("labels must be distinct, one rank per label")

    @property
    def paired(self) -> bool:
        return any(lab.startswith("e^") or lab == "e0" for lab in self.labels)

    def rank_of(self, label: str) -> int:
        return self.rank[self.labels.index(label)]

    def precedes(self, a: str, b: str) -> bool:
        return self.rank_of(a) < self.rank_of(b)

    def pairing_consistent(self) -> bool:
        """Partner labels sit in mirrored classes and e0 in the middle one.

        This is the class-level form of e^k < e^l iff e_l < e_k.
        """
        if not self.paired:
            return True
        top = max(self.rank)
        ranks = dict(zip(self.labels, self.rank))
        for lab, r in ranks.items():
            q = partner(lab)
            if q is None:
                if 2 * r != top:
                    return False
            elif q not in ranks or ranks[q] != top - r:
                return False
        return True


@dataclass(frozen=True)
class GeneralizedFlagPresentation:
    basis: OrderedBasis
    classes: tuple[tuple[str, ...], ...]
    spaces: tuple[tuple[frozenset, frozenset], ...]    # (F'_a, F''_a) per class

    @classmethod
    def from_classes(cls, labels: Sequence[str], classes: Sequence[Sequence[str]]) -> "GeneralizedFlagPresentation":
        rank = {lab: i for i, c in enumerate(classes) for lab in c}
        basis = OrderedBasis(tuple(labels), tuple(rank[lab] for lab in labels))
        spaces, below = [], frozenset()
        for c in classes:
            spaces.append((below, below | frozenset(c)))
            below = below | frozenset(c)
        return cls(basis, tuple(tuple(c) for c in classes), tuple(spaces))

    def chain(self) -> list[frozenset]:
        """Distinct spaces of the flag, increasing."""
        out = []
        for a, b in self.spaces:
            for s in (a, b):
                if s not in out:
                    out.append(s)
        return sorted(out, key=len)

    def to_json(self) -> dict:
        return {
            "labels": list(self.basis.labels),
            "classes": [list(c) for c in self.classes],
            "spaces": [{"lower": sorted(a, key=self.basis.labels.index),
                        "upper": sorted(b, key=self.basis.labels.index)} for a, b in self.spaces],
        }


def is_generalized_flag(g: GeneralizedFlagPresentation) -> bool:
    labels = set(g.basis.labels)
    if any(len(c) == 0 for c in g.classes):
        return False
    seen: list = [x for c in g.classes for x in c]
    if len(seen) != len(set(seen)) or set(seen) != labels:
        return False
    if len(g.spaces) != len(g.classes):
        return False
    below = frozenset()
    for c, (lo, hi) in zip(g.classes, g.spaces):
        if lo != below or hi != below | frozenset(c):
            return False
        below = hi
    chain = g.chain()
    # a chain: totally ordered by inclusion
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            return False
    # (i) immediate neighbours: automatic for a finite chain with at least two members
    if len(chain) < 2:
        return False
    # (ii) every label lies in exactly one F''_a minus F'_a
    for lab in labels:
        if sum(1 for lo, hi in g.spaces if lab in hi and lab not in lo) != 1:
            return False
    return True


def is_compatible_with_basis(spaces: Sequence[Subspace], basis: OrderedBasis | None = None) -> bool:
    """Each space is spanned by the basis vectors it contains."""
    if basis is not None and spaces and spaces[0].ambient_dim != len(basis.labels):
        raise ValueError("spaces and basis have different dimensions")
    return all(s.is_coordinate for s in spaces)


# ---------------------------------------------------------------------------
# direct systems


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"e{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class DirectSystem:
    stages: tuple[StdExtSpec, ...]
    initial: Flag
    labels: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ValueError("a direct system needs at least one stage")
        for a, b in zip(self.stages, self.stages[1:]):
            if a.target != b.source:
                raise ValueError("stage targets and sources do not chain")
        for s in self.stages:
            if s.variant != STRICT:
                raise ValueError("direct systems are built from strict extensions")
            if s.target.ambient <= s.source.ambient:
                raise ValueError("dimensions must strictly increase along the system")
        if not self.stages[0].source.contains(self.initial):
            raise ValueError("initial flag is not in the first source variety")
        if not self.labels:
            labs = [_variety_labels(self.stages[0].source)]
            labs += [_variety_labels(s.target) for s in self.stages]
            object.__setattr__(self, "labels", tuple(labs))
        object.__setattr__(self, "labels", tuple(tuple(x) for x in self.labels))
        if len(self.labels) != len(self.stages) + 1:
            raise ValueError("one label tuple per stage space is required")
        for a, b in zip(self.labels, self.labels[1:]):
            if b[: len(a)] != a:
                raise NotAdapted("stage labels must extend the previous stage's labels")

    @property
    def is_isotropic(self) -> bool:
        return self.stages[0].source.form is not None

    @property
    def varieties(self) -> list[FlagVariety]:
        return [self.stages[0].source] + [s.target for s in self.stages]

    def flags(self) -> list[Flag]:
        """F_1 and its images at every stage."""
        out = [self.initial]
        for s in self.stages:
            out.append(s.apply(out[-1], check=False))
        return out

    def composite(self) -> StdExtSpec:
        return compose_all(list(self.stages))


def _variety_labels(v: FlagVariety) -> tuple[str, ...]:
    if v.form is not None and v.form.labels is not None:
        return v.form.labels
    return default_labels(v.ambient)


def _unit(n: int, i: int) -> tuple:
    return tuple(int(j == i) for j in range(n))


def check_adapted(sys: DirectSystem) -> None:
    """Raise NotAdapted naming the first space that is not coordinate."""
    f = sys.stages[0].field
    for i, s in enumerate(sys.initial.spaces, start=1):
        if not s.is_coordinate:
            raise NotAdapted(f"V_1,{i} is not a coordinate subspace")
    for N, spec in enumerate(sys.stages, start=1):
        n, n2 = spec.source.ambient, spec.target.ambient
        w_hat = Subspace.coordinate(f, n2, range(n, n2))
        first = next(i for i in range(1, spec.kt + 1) if 1 <= spec.pbar[i] <= spec.k)
        u_s, e_s = spec.u_chain[first - 1], spec.eps[first - 1]
        if intersect(u_s, w_hat) != eps_kernel(u_s, e_s):
            raise NotAdapted(f"stage {N}: new labels meet U outside the kernel")
        # the old labels must embed as themselves, up to one common scalar
        incl = Subspace.coordinate(f, n2, range(n))
        if not incl.issubspace(u_s):
            raise NotAdapted(f"stage {N}: V_{N} is not embedded by label inclusion")
        restr = eps_on(u_s, e_s, incl).matrix
        c = restr.rows[0][0]
        if c == 0 or restr != Matrix.identity(f, n).scale(c):
            raise NotAdapted(f"stage {N}: eps is not a multiple of the identity on old labels")
        for j in range(1, spec.kt + 1):
            u, e = spec.u_chain[j - 1], spec.eps[j - 1]
            w = u if e.is_zero else eps_kernel(u, e)
            if spec.pbar[j] != 0:
                w = intersect(u, w_hat)
            if not w.is_coordinate:
                raise NotAdapted(f"W_{N},{j} is not a coordinate subspace")


def _membership_chain(sys: DirectSystem) -> list[Subspace]:
    final = sys.flags()[-1]
    chain = list(final.spaces)
    if sys.is_isotropic:
        form = sys.varieties[-1].form
        perps = [orth_complement(form, s) for s in reversed(final.spaces)]
        for p in perps:
            if p not in chain:
                chain.append(p)
    full = Subspace.full(final.field, final.ambient_dim)
    if full not in chain:
        chain.append(full)
    return chain


def construct_limit_flag(sys: DirectSystem) -> GeneralizedFlagPresentation:
    """Classes of labels by the smallest space of the final-stage flag containing them.

    For isotropic systems the chain is the final isotropic flag together
    with the orthogonal complements of its spaces.
    """
    check_adapted(sys)
    labels = sys.labels[-1]
    chain = _membership_chain(sys)
    for i, s in enumerate(chain, start=1):
        if not s.is_coordinate:
            raise NotAdapted(f"space {i} of the final flag is not coordinate")
    n = len(labels)
    first_index = {}
    for idx, lab in enumerate(labels):
        v = _unit(n, idx)
        first_index[lab] = next(i for i, s in enumerate(chain) if s.contains(v))
    used = sorted(set(first_index.values()))
    classes = [tuple(lab for lab in labels if first_index[lab] == i) for i in used]
    return GeneralizedFlagPresentation.from_classes(labels, classes)


def truncate(g: GeneralizedFlagPresentation, n: int, field: Field | None = None,
             isotropic_only: bool | None = None) -> tuple[Flag, FlagType]:
    """The flag g cap V'_n, V'_n spanned by the first n labels, with its type.

    For presentations with paired labels only the isotropic part is kept.
    """
    from .field import GF

    field = field or GF(2)
    labels = g.basis.labels[:n]
    keep = set(labels)
    paired = g.basis.paired if isotropic_only is None else isotropic_only
    form = None
    if paired:
        form = _form_for(labels, field)
    spaces, seen = [], set()
    for s in g.chain():
        part = frozenset(s & keep)
        if not part or len(part) == n or part in seen:
            continue
        sub = Subspace.coordinate(field, n, [labels.index(x) for x in part])
        if form is not None and not is_isotropic(form, sub):
            continue
        seen.add(part)
        spaces.append(sub)
    spaces.sort(key=lambda s: s.dim)
    flag = Flag(n, field, tuple(spaces))
    return flag, flag.type


def _form_for(labels, field):
    kind = "symmetric" if "e0" in labels or field.characteristic != 2 else "symplectic"
    try:
        return labeled_form(kind, field, labels)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# canonical chain refining each stage


def canonical_chain(sys: DirectSystem) -> list[list[StdExtSpec]]:
    """Each stage refined into steps adding one label (or one hyperbolic pair)."""
    check_adapted(sys)
    out = []
    for spec, labs_prev, labs in zip(sys.stages, sys.labels, sys.labels[1:]):
        n, n2 = spec.source.ambient, spec.target.ambient
        basis_w = [_unit(n2, i) for i in range(n, n2)]
        blocks = None
        if sys.is_isotropic:
            new = list(labs[n:])
            blocks, used = [], set()
            for i, lab in enumerate(new):
                if i in used:
                    continue
                q = partner(lab)
                if q is None or q not in new:
                    blocks.append([i])
                    used.add(i)
                else:
                    j = new.index(q)
                    blocks.append(sorted([i, j]))
                    used.update((i, j))
        out.append(decompose_elementary(spec, basis_w, blocks))
    return out


def chain_types(sys: DirectSystem) -> list[tuple[int, tuple[int, ...]]]:
    """(ambient dim, type) of every variety along the canonical chain."""
    steps = canonical_chain(sys)
    out = [(sys.stages[0].source.ambient, sys.stages[0].source.dims)]
    for stage in steps:
        for s in stage:
            out.append((s.target.ambient, s.target.dims))
    return out


def chain_type_check(sys: DirectSystem, field: Field | None = None) -> list[dict]:
    """Compare limit-flag truncation types with the canonical chain's types."""
    g = construct_limit_flag(sys)
    field = field or sys.stages[0].field
    rows = []
    for n, dims in chain_types(sys):
        _, t = truncate(g, n, field)
        rows.append({"n": n, "chain_type": list(dims), "truncation_type": list(t.dims),
                     "match": tuple(t.dims) == tuple(dims)})
    return rows


def refines_composite(sys: DirectSystem) -> bool:
    """Every stage equals the composite of its canonical steps on all source flags."""
    from .flags import enumerate_flags

    for spec, steps in zip(sys.stages, canonical_chain(sys)):
        comp = compose_all(steps)
        for fl in enumerate_flags(spec.source):
            if comp.apply(fl, check=False) != spec.apply(fl, check=False):
                return False
    return True


def orthocomplement_invariant(g: GeneralizedFlagPresentation, field: Field) -> bool:
    """On the full finite truncation, F -> F^perp permutes the chain."""
    labels = g.basis.labels
    n = len(labels)
    form = _form_for(labels, field)
    if form is None:
        return False
    chain = [Subspace.coordinate(field, n, [labels.index(x) for x in s]) for s in g.chain()]
    cset = set(chain)
    return all(orth_complement(form, s) in cset for s in chain)


# ---------------------------------------------------------------------------
# E-commensurability


TAILS = ("none", "odd", "all")


@dataclass(frozen=True)
class PerturbedSpace:
    """Window part (a subspace of F^window) plus a symbolic tail of labels beyond it."""

    window: Subspace
    tail: str = "none"

    def __post_init__(self) -> None:
        if self.tail not in TAILS:
            raise ValueError(f"tail must be one of {TAILS}")


@dataclass(frozen=True)
class PerturbedFlag:
    spaces: tuple[PerturbedSpace, ...]

    @property
    def window(self) -> int:
        return self.spaces[0].window.ambient_dim


@dataclass
class CommensurabilityWitness:
    bijection: list = dc_field(default_factory=list)
    u_labels: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"bijection": self.bijection, "U": self.u_labels}


def e_commensurable(a: PerturbedFlag, b: PerturbedFlag, search_bound: int) -> CommensurabilityWitness | None:
    """Search index-wise bijections and coordinate U with dim U <= search_bound.

    None means no witness within the bound.
    """
    if len(a.spaces) != len(b.spaces) or a.window != b.window:
        return None
    n = a.window
    for x, y in zip(a.spaces, b.spaces):
        if x.tail != y.tail:
            return None
    f = a.spaces[0].window.field
    for size in range(0, min(search_bound, n) + 1):
        for idx in itertools.combinations(range(n), size):
            u = Subspace.coordinate(f, n, idx)
            if all(_commensurate(x.window, y.window, u) for x, y in zip(a.spaces, b.spaces)):
                return CommensurabilityWitness([[i, i] for i in range(len(a.spaces))],
                                               [f"e{i + 1}" for i in idx])
    return None


def _commensurate(x: Subspace, y: Subspace, u: Subspace) -> bool:
    return (x.issubspace(y + u) and y.issubspace(x + u)
            and intersect(x, u).dim == intersect(y, u).dim)


def perturbed_from_rows(field: Field, window: int, parts: Sequence[tuple[Sequence, str]]) -> PerturbedFlag:
    return PerturbedFlag(tuple(PerturbedSpace(span(window, field, rows), tail) for rows, tail in parts))


def limit_report(sys: DirectSystem) -> dict:
    """Classes in order, label membership in the final chain, and per-stage truncation types."""
    g = construct_limit_flag(sys)
    f = sys.stages[0].field
    labels = sys.labels[-1]
    chain = [s for s in g.chain() if s]
    membership = {lab: [int(lab in s) for s in chain] for lab in labels}
    stages = []
    for labs, var, fl in zip(sys.labels, sys.varieties, sys.flags()):
        _, t = truncate(g, len(labs), f)
        stages.append({"dim": len(labs), "variety": str(var), "truncation_type": list(t.dims),
                       "stage_type": list(fl.type.dims)})
    return {
        "presentation": g.to_json(),
        "is_generalized_flag": is_generalized_flag(g),
        "membership": membership,
        "stages": stages,
        "chain_check": chain_type_check(sys),
    }
