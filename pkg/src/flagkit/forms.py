"""Nondegenerate symmetric and symplectic forms on F^n."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import DimensionMismatch
from .field import Field
from .linalg import Matrix, Subspace, _matmul, _nullspace_rows, det, subspace_sum, intersect

SYMMETRIC = "symmetric"
SYMPLECTIC = "symplectic"
KINDS = (SYMMETRIC, SYMPLECTIC)


@dataclass(frozen=True)
class BilinearSpace:
    """F^dim with the form B(u, v) = u^T G v.

    ``labels`` optionally names the standard basis vectors ("e1", "e^1",
    "e0", ...); it plays no role in equality.
    """

    kind: str
    gram: Matrix
    labels: tuple[str, ...] | None = dc_field(default=None, compare=False)

    def __post_init__(self) -> None:
        g = self.gram
        if self.kind not in KINDS:
            raise ValueError(f"unknown form kind {self.kind!r}")
        if g.nrows != g.ncols or g.nrows == 0:
            raise DimensionMismatch("Gram matrix must be square and nonempty")
        f = g.field
        if self.kind == SYMMETRIC:
            if f.characteristic == 2:
                raise ValueError("symmetric forms are not supported in characteristic 2")
            if g.transpose() != g:
                raise ValueError("Gram matrix of a symmetric form must be symmetric")
        else:
            if g.nrows % 2:
                raise ValueError("symplectic spaces have even dimension")
            if any(g.rows[i][i] != 0 for i in range(g.nrows)):
                raise ValueError("symplectic Gram matrix must have zero diagonal")
            if g.transpose() != g.scale(f(-1)):
                raise ValueError("Gram matrix of a symplectic form must be antisymmetric")
        if det(g) == 0:
            raise ValueError("form is degenerate")
        if self.labels is not None and len(self.labels) != g.nrows:
            raise DimensionMismatch("one label per basis vector is required")

    @property
    def field(self) -> Field:
        return self.gram.field

    @property
    def dim(self) -> int:
        return self.gram.nrows

    def pair(self, u: Sequence, v: Sequence):
        gv = self.gram.apply(v)
        return self.field(sum(a * b for a, b in zip(u, gv)))

    __call__ = pair

    def label_index(self, label: str) -> int:
        if self.labels is None:
            raise ValueError("this space carries no basis labels")
        return self.labels.index(label)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "gram": [[self.field.format(x) for x in r] for r in self.gram.rows]}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, obj: dict, field: Field) -> "BilinearSpace":
        labels = tuple(obj["labels"]) if obj.get("labels") is not None else None
        return cls(obj["kind"], Matrix.from_rows(field, obj["gram"]), labels)


def _partner(label: str) -> str | None:
    if label == "e0":
        return None
    if label.startswith("e^"):
        return "e" + label[2:]
    return "e^" + label[1:]


def labeled_form(kind: str, field: Field, labels: Sequence[str]) -> BilinearSpace:
    """Hyperbolic form on basis vectors named e_i / e^i (and optionally e0).

    (e_i, e^i) = 1, (e^i, e_i) = +1 or -1 by kind, (e0, e0) = 1, all other
    pairings zero. Any ordering of the labels is accepted.
    """
    labels = tuple(labels)
    n = len(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    if len(pos) != n:
        raise ValueError("duplicate basis labels")
    rows = [[0] * n for _ in range(n)]
    for i, lab in enumerate(labels):
        if lab == "e0":
            if kind != SYMMETRIC:
                raise ValueError("e0 only exists for symmetric forms")
            rows[i][i] = 1
            continue
        partner = _partner(lab)
        if partner not in pos:
            raise ValueError(f"label {lab!r} has no partner {partner!r}")
        j = pos[partner]
        if lab.startswith("e^") and kind == SYMPLECTIC:
            rows[i][j] = -1
        else:
            rows[i][j] = 1
    return BilinearSpace(kind, Matrix.from_rows(field, rows, n), labels)


def hyperbolic_labels(n: int, with_e0: bool = False) -> tuple[str, ...]:
    labels = []
    for i in range(1, n + 1):
        labels += [f"e{i}", f"e^{i}"]
    if with_e0:
        labels.append("e0")
    return tuple(labels)


def hyperbolic_space(kind: str, field: Field, n: int, with_e0: bool = False) -> BilinearSpace:
    """Split form with basis e1, e^1, ..., en, e^n (then e0)."""
    if with_e0 and kind != SYMMETRIC:
        raise ValueError("with_e0 is only meaningful for symmetric forms")
    return labeled_form(kind, field, hyperbolic_labels(n, with_e0))


def _check(b: BilinearSpace, s: Subspace) -> None:
    if s.ambient_dim != b.dim or s.field != b.field:
        raise DimensionMismatch(f"subspace of {s.field}^{s.ambient_dim} in a form on {b.field}^{b.dim}")


def orth_complement(b: BilinearSpace, s: Subspace) -> Subspace:
    _check(b, s)
    if s.dim == 0:
        return Subspace.full(b.field, b.dim)
    cond = _matmul(s.basis, b.gram.rows, b.field)
    return Subspace.from_rows(b.field, b.dim, _nullspace_rows(cond, b.dim, b.field))


def restricted_gram(b: BilinearSpace, s: Subspace) -> Matrix:
    """Gram matrix of B on the RREF basis of ``s``."""
    _check(b, s)
    rows = [[b.pair(u, v) for v in s.basis] for u in s.basis]
    return Matrix.from_rows(b.field, rows, s.dim)


def is_isotropic(b: BilinearSpace, s: Subspace) -> bool:
    _check(b, s)
    return all(b.pair(u, v) == 0 for u in s.basis for v in s.basis)


def is_coisotropic(b: BilinearSpace, s: Subspace) -> bool:
    return is_isotropic(b, orth_complement(b, s))


def is_nondegenerate_on(b: BilinearSpace, s: Subspace) -> bool:
    return s.dim == 0 or det(restricted_gram(b, s)) != 0


def orthogonal_decomposition_check(b: BilinearSpace, v_part: Subspace, w_part: Subspace) -> bool:
    """V' = v_part (+) w_part, orthogonal, with both restrictions nondegenerate."""
    _check(b, v_part)
    _check(b, w_part)
    if intersect(v_part, w_part).dim != 0:
        return False
    if subspace_sum(v_part, w_part).dim != b.dim:
        return False
    if any(b.pair(u, w) != 0 for u in v_part.basis for w in w_part.basis):
        return False
    return is_nondegenerate_on(b, v_part) and is_nondegenerate_on(b, w_part)
