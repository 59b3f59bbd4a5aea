"""Exact linear algebra over F_p and Q.

Vectors are tuples of field elements. Subspaces are stored by their reduced
row echelon basis, so equality and hashing are syntactic.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, DimensionMismatch
from .field import Element, Field

Vector = tuple

DEFAULT_BUDGET = 200_000


def default_budget() -> int:
    """Point budget for enumerations; ``FLAGKIT_BUDGET_POINTS`` overrides."""
    env = os.environ.get("FLAGKIT_BUDGET_POINTS")
    if env:
        return int(env)
    return DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# row reduction kernels (lists of lists, mutated in place)


def _rref_rows(rows: list[list], ncols: int, field: Field) -> list[int]:
    """Reduce ``rows`` in place to RREF; returns the pivot columns."""
    p = field.p
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        if p is None:
            rows[r] = [x * inv for x in rows[r]]
        else:
            rows[r] = [(x * inv) % p for x in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    if p is None:
                        rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
                    else:
                        rows[i] = [(a - f * b) % p for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return pivots


def _canonical_basis(vectors: Iterable[Sequence], ncols: int, field: Field) -> tuple[tuple, ...]:
    rows = [[field(x) for x in v] for v in vectors]
    for v in rows:
        if len(v) != ncols:
            raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ncols}")
    pivots = _rref_rows(rows, ncols, field)
    return tuple(tuple(rows[i]) for i in range(len(pivots)))


def _nullspace_rows(rows: list[list], ncols: int, field: Field) -> list[list]:
    """Basis of {x : rows . x = 0}; ``rows`` is consumed."""
    rows = [list(r) for r in rows]
    pivots = _rref_rows(rows, ncols, field)
    pivset = set(pivots)
    out = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [field(0)] * ncols
        v[free] = field(1)
        for i, pc in enumerate(pivots):
            v[pc] = field.neg(rows[i][free])
        out.append(v)
    return out


def _matmul(a: Sequence[Sequence], b: Sequence[Sequence], field: Field) -> list[list]:
    p = field.p
    bt = list(zip(*b)) if b else []
    out = []
    for row in a:
        if p is None:
            out.append([sum((x * y for x, y in zip(row, col)), field(0)) for col in bt])
        else:
            out.append([sum(x * y for x, y in zip(row, col)) % p for col in bt])
    return out


# ---------------------------------------------------------------------------
# Matrix / LinearMap


@dataclass(frozen=True)
class Matrix:
    field: Field
    nrows: int
    ncols: int
    rows: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch("matrix entries do not match its declared shape")

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = tuple(tuple(field(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def zero(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field(0)
        return cls(field, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, tuple(tuple(field(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        if not cols:
            return cls.zero(field, nrows, 0)
        return cls.from_rows(field, list(zip(*cols)), len(cols))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows, tuple(zip(*self.rows)) if self.nrows else tuple(() for _ in range(self.ncols)))

    def columns(self) -> list[tuple]:
        return list(zip(*self.rows)) if self.nrows else [() for _ in range(self.ncols)]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        if other.nrows == 0:
            return Matrix.zero(self.field, self.nrows, other.ncols)
        return Matrix(self.field, self.nrows, other.ncols,
                      tuple(tuple(r) for r in _matmul(self.rows, other.rows, self.field)))

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for a matrix with {self.ncols} columns")
        p = self.field.p
        if p is None:
            return tuple(sum((a * b for a, b in zip(r, v)), self.field(0)) for r in self.rows)
        return tuple(sum(a * b for a, b in zip(r, v)) % p for r in self.rows)

    @property
    def rank(self) -> int:
        rows = [list(r) for r in self.rows]
        return len(_rref_rows(rows, self.ncols, self.field))

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def scale(self, c: Element) -> "Matrix":
        f = self.field
        return Matrix(f, self.nrows, self.ncols, tuple(tuple(f(x * c) for x in r) for r in self.rows))

    def first_nonzero(self) -> Element | None:
        for r in self.rows:
            for x in r:
                if x != 0:
                    return x
        return None


def rref(m: Matrix) -> Matrix:
    """Reduced row echelon form; zero rows are kept at the bottom."""
    rows = [list(r) for r in m.rows]
    _rref_rows(rows, m.ncols, m.field)
    return Matrix(m.field, m.nrows, m.ncols, tuple(tuple(r) for r in rows))


def det(m: Matrix) -> Element:
    if m.nrows != m.ncols:
        raise DimensionMismatch("determinant of a non-square matrix")
    f = m.field
    rows = [list(r) for r in m.rows]
    n = m.nrows
    result = f(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return f(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            result = f.neg(result)
        result = f(result * rows[c][c])
        inv = f.inv(rows[c][c])
        for i in range(c + 1, n):
            k = rows[i][c]
            if k != 0:
                rows[i] = [f(a - k * inv * b) for a, b in zip(rows[i], rows[c])]
    return result


@dataclass(frozen=True)
class LinearMap:
    """A linear map F^domain_dim -> F^codomain_dim acting on column vectors."""

    matrix: Matrix

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], domain_dim: int | None = None) -> "LinearMap":
        return cls(Matrix.from_rows(field, rows, domain_dim))

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def domain_dim(self) -> int:
        return self.matrix.ncols

    @property
    def codomain_dim(self) -> int:
        return self.matrix.nrows

    @property
    def is_zero(self) -> bool:
        return self.matrix.is_zero

    @property
    def rank(self) -> int:
        return self.matrix.rank

    def __call__(self, v: Sequence) -> Vector:
        return self.matrix.apply(v)

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """``self o inner``."""
        return LinearMap(self.matrix @ inner.matrix)


# ---------------------------------------------------------------------------
# Subspace


@dataclass(frozen=True)
class Subspace:
    """Subspace of F^ambient_dim given by its RREF basis (no zero rows).

    Build instances with :func:`span` or :meth:`from_rows`; the raw
    constructor trusts its input.
    """

    field: Field
    ambient_dim: int
    basis: tuple[tuple, ...]

    @classmethod
    def from_rows(cls, field: Field, ambient_dim: int, rows: Iterable[Sequence]) -> "Subspace":
        return cls(field, ambient_dim, _canonical_basis(rows, ambient_dim, field))

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, ())

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, Matrix.identity(field, n).rows)

    @classmethod
    def coordinate(cls, field: Field, n: int, indices: Iterable[int]) -> "Subspace":
        """Span of the standard basis vectors e_i, i in ``indices`` (0-based)."""
        idx = sorted(set(indices))
        return cls(field, n, tuple(tuple(field(int(j == i)) for j in range(n)) for i in idx))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        out = []
        for row in self.basis:
            out.append(next(i for i, x in enumerate(row) if x != 0))
        return tuple(out)

    def reduce(self, v: Sequence) -> list:
        """Residue of ``v`` after eliminating the pivot coordinates."""
        p = self.field.p
        v = list(v)
        for piv, row in zip(self.pivots, self.basis):
            c = v[piv]
            if c != 0:
                if p is None:
                    v = [a - c * b for a, b in zip(v, row)]
                else:
                    v = [(a - c * b) % p for a, b in zip(v, row)]
        return v

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        return all(x == 0 for x in self.reduce([self.field(x) for x in v]))

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of ``v`` in the RREF basis; ``v`` must lie in the subspace."""
        v = tuple(self.field(x) for x in v)
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return tuple(v[p] for p in self.pivots)

    def from_coordinates(self, c: Sequence) -> Vector:
        f = self.field
        out = [f(0)] * self.ambient_dim
        for coef, row in zip(c, self.basis):
            if coef != 0:
                out = [f(a + coef * b) for a, b in zip(out, row)]
        return tuple(out)

    def issubspace(self, other: "Subspace") -> bool:
        _check_same(self, other)
        if self.dim > other.dim:
            return False
        return all(other.contains(r) for r in self.basis)

    __le__ = issubspace

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and self.issubspace(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    @property
    def is_coordinate(self) -> bool:
        """True iff the subspace is spanned by the standard basis vectors it contains."""
        return all(sum(1 for x in row if x != 0) == 1 for row in self.basis)

    def coordinate_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.ambient_dim)
                     if self.contains(tuple(int(i == j) for j in range(self.ambient_dim))))

    def vectors(self) -> Iterator[Vector]:
        """All vectors of the subspace (finite fields only)."""
        f = self.field
        for coeffs in itertools.product(range(f.order), repeat=self.dim):
            yield self.from_coordinates(coeffs)

    def __repr__(self) -> str:
        rows = ", ".join("[" + " ".join(str(x) for x in r) + "]" for r in self.basis)
        return f"Subspace({self.field}^{self.ambient_dim}: {rows or '0'})"


def _check_same(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim or a.field != b.field:
        raise DimensionMismatch(
            f"subspaces of {a.field}^{a.ambient_dim} and {b.field}^{b.ambient_dim} are not comparable")


def span(ambient_dim: int, field: Field, generators: Iterable[Sequence]) -> Subspace:
    return Subspace.from_rows(field, ambient_dim, generators)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.from_rows(a.field, a.ambient_dim, a.basis + b.basis)


def annihilator(s: Subspace) -> Subspace:
    """Annihilator of ``s`` in the dual space, coordinates w.r.t. the dual basis."""
    n, f = s.ambient_dim, s.field
    if s.dim == 0:
        return Subspace.full(f, n)
    return Subspace.from_rows(f, n, _nullspace_rows([list(r) for r in s.basis], n, f))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.field, a.ambient_dim)
    return annihilator(subspace_sum(annihilator(a), annihilator(b)))


def kernel(f: LinearMap) -> Subspace:
    m = f.matrix
    return Subspace.from_rows(m.field, m.ncols, _nullspace_rows([list(r) for r in m.rows], m.ncols, m.field))


def image(f: LinearMap, s: Subspace) -> Subspace:
    if s.ambient_dim != f.domain_dim or s.field != f.field:
        raise DimensionMismatch("subspace does not live in the domain of the map")
    return Subspace.from_rows(f.field, f.codomain_dim, (f(r) for r in s.basis))


def preimage(f: LinearMap, s: Subspace) -> Subspace:
    if s.ambient_dim != f.codomain_dim or s.field != f.field:
        raise DimensionMismatch("subspace does not live in the codomain of the map")
    ann = annihilator(s)
    if ann.dim == 0:
        return Subspace.full(f.field, f.domain_dim)
    cond = _matmul(ann.basis, f.matrix.rows, f.field)
    return Subspace.from_rows(f.field, f.domain_dim, _nullspace_rows(cond, f.domain_dim, f.field))


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """One solution x of a x = b (free variables set to zero), or None."""
    f = a.field
    rows = [list(r) + [f(y)] for r, y in zip(a.rows, b)]
    pivots = _rref_rows(rows, a.ncols + 1, f)
    if pivots and pivots[-1] == a.ncols:
        return None
    x = [f(0)] * a.ncols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][a.ncols]
    return tuple(x)


def nullspace(a: Matrix) -> list[Vector]:
    return [tuple(v) for v in _nullspace_rows([list(r) for r in a.rows], a.ncols, a.field)]


# ---------------------------------------------------------------------------
# enumeration


def gaussian_binomial(n: int, m: int, q: int) -> int:
    if m < 0 or m > n:
        return 0
    num = den = 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _free_positions(pivots: Sequence[int], n: int) -> list[tuple[int, int]]:
    pivset = set(pivots)
    return [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivset]


def enumerate_subspaces(m: int, ambient_dim: int, field: Field, budget: int | None = None) -> Iterator[Subspace]:
    """Every m-dimensional subspace of F_p^n exactly once.

    Order: pivot-column sets lexicographically, then free entries in base-p
    counting order (row-major over free positions).
    """
    if not field.is_finite:
        raise ValueError("subspace enumeration needs a finite field")
    if not 0 <= m <= ambient_dim:
        raise ValueError(f"dimension {m} out of range for ambient {ambient_dim}")
    budget = default_budget() if budget is None else budget
    count = gaussian_binomial(ambient_dim, m, field.p)
    if count > budget:
        raise BudgetExceeded(f"G({m},{field}^{ambient_dim}) has {count} points, budget is {budget}")
    return _enumerate_subspaces(m, ambient_dim, field)


def _enumerate_subspaces(m: int, n: int, field: Field) -> Iterator[Subspace]:
    p = field.p
    for pivots in itertools.combinations(range(n), m):
        free = _free_positions(pivots, n)
        for values in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(m)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), x in zip(free, values):
                rows[i][c] = x
            yield Subspace(field, n, tuple(tuple(r) for r in rows))


def subspaces_containing(base: Subspace, m: int, budget: int | None = None) -> Iterator[Subspace]:
    """All m-dimensional subspaces containing ``base``, in a deterministic order.

    Works in the complement spanned by the non-pivot coordinates of ``base``.
    """
    n, f = base.ambient_dim, base.field
    free_coords = [c for c in range(n) if c not in set(base.pivots)]
    for q in enumerate_subspaces(m - base.dim, len(free_coords), f, budget):
        lifted = []
        for row in q.basis:
            v = [0] * n
            for c, x in zip(free_coords, row):
                v[c] = x
            lifted.append(v)
        yield Subspace.from_rows(f, n, list(base.basis) + lifted)


# ---------------------------------------------------------------------------
# exterior powers


def wedge_index(n: int, m: int) -> list[tuple[int, ...]]:
    """Coordinates of the m-th exterior power: sorted m-subsets, lexicographic."""
    return list(itertools.combinations(range(n), m))


def plucker_vector(s: Subspace) -> Vector:
    """m x m minors of the RREF basis, indexed by :func:`wedge_index`."""
    f, n, m = s.field, s.ambient_dim, s.dim
    out = []
    for cols in wedge_index(n, m):
        sub = Matrix(f, m, m, tuple(tuple(row[c] for c in cols) for row in s.basis))
        out.append(det(sub))
    return tuple(out)


def wedge_power(s: Subspace, m: int) -> Subspace:
    """The line wedge^m s inside wedge^m F^n."""
    if s.dim != m:
        raise DimensionMismatch(f"wedge_power needs dim(s) == {m}, got {s.dim}")
    if m == 0:
        return Subspace.full(s.field, 1)
    n = len(wedge_index(s.ambient_dim, m))
    return Subspace.from_rows(s.field, n, [plucker_vector(s)])


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise DimensionMismatch("inverse of a non-square matrix")
    f, n = m.field, m.nrows
    rows = [list(r) + [f(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    pivots = _rref_rows(rows, 2 * n, f)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return Matrix(f, n, n, tuple(tuple(r[n:]) for r in rows))


def lift(s: Subspace, coords: Subspace) -> Subspace:
    """Image of a subspace of coordinate space F^dim(s) under the RREF basis of ``s``."""
    if coords.ambient_dim != s.dim:
        raise DimensionMismatch("coordinate subspace does not match the subspace dimension")
    return Subspace.from_rows(s.field, s.ambient_dim, (s.from_coordinates(r) for r in coords.basis))
