"""Flags and finite flag varieties, ordinary and isotropic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import BudgetExceeded, DimensionMismatch
from .field import Field
from .forms import SYMMETRIC, SYMPLECTIC, BilinearSpace, is_isotropic, orth_complement
from .linalg import (
    Subspace,
    _enumerate_subspaces,
    default_budget,
    gaussian_binomial,
    intersect,
    span,
    subspaces_containing,
)

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class FlagType:
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        d = tuple(self.dims)
        object.__setattr__(self, "dims", d)
        if any(a >= b for a, b in zip(d, d[1:])):
            raise ValueError(f"flag type must be strictly increasing, got {list(d)}")
        if d and d[0] <= 0:
            raise ValueError("flag type entries must be positive")

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def check_ambient(self, n: int, isotropic: bool = False) -> None:
        if self.dims and self.dims[-1] >= n:
            raise ValueError(f"type {list(self.dims)} does not fit in dimension {n}")
        if isotropic and self.dims and self.dims[-1] > n // 2:
            raise ValueError(f"isotropic type {list(self.dims)} exceeds half of dimension {n}")


@dataclass(frozen=True)
class Flag:
    ambient_dim: int
    field: Field
    spaces: tuple[Subspace, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "spaces", tuple(self.spaces))
        for s in self.spaces:
            if s.ambient_dim != self.ambient_dim or s.field != self.field:
                raise DimensionMismatch("flag space lives in the wrong ambient space")
        for a, b in zip(self.spaces, self.spaces[1:]):
            if not a < b:
                raise ValueError("flag spaces must form a strictly increasing chain")

    @classmethod
    def of(cls, *spaces: Subspace) -> "Flag":
        if not spaces:
            raise ValueError("use the Flag constructor for the empty flag")
        return cls(spaces[0].ambient_dim, spaces[0].field, spaces)

    @property
    def type(self) -> FlagType:
        return FlagType(tuple(s.dim for s in self.spaces))

    def __len__(self) -> int:
        return len(self.spaces)

    def __getitem__(self, i):
        return self.spaces[i]

    def __iter__(self):
        return iter(self.spaces)


def project(flag: Flag, i: int) -> Subspace:
    """pi_i, 1-based."""
    if not 1 <= i <= len(flag.spaces):
        raise IndexError(f"projection index {i} out of range 1..{len(flag.spaces)}")
    return flag.spaces[i - 1]


# ---------------------------------------------------------------------------
# maximal isotropic components and theta


def _is_max_isotropic(b: BilinearSpace, s: Subspace) -> bool:
    return 2 * s.dim == b.dim and is_isotropic(b, s)


def max_isotropic_component(b: BilinearSpace, s: Subspace, reference: Subspace) -> str:
    """Component of ``s`` relative to ``reference`` (same component -> plus)."""
    if b.kind != SYMMETRIC or b.dim % 2:
        raise ValueError("components are defined for even-dimensional symmetric spaces")
    if not (_is_max_isotropic(b, s) and _is_max_isotropic(b, reference)):
        raise ValueError("both subspaces must be maximal isotropic")
    return PLUS if (s.dim - intersect(s, reference).dim) % 2 == 0 else MINUS


def _sqrt(field: Field, a):
    if field.is_finite:
        for x in range(field.p):
            if (x * x - a) % field.p == 0:
                return x
        return None
    a = Fraction(a)
    if a < 0:
        return None
    rn, rd = math.isqrt(a.numerator), math.isqrt(a.denominator)
    if rn * rn == a.numerator and rd * rd == a.denominator:
        return Fraction(rn, rd)
    return None


def isotropic_extensions(b: BilinearSpace, s: Subspace) -> list[Subspace]:
    """Isotropic subspaces s + <v>, v in s^perp, when s^perp / s is a plane."""
    if b.kind != SYMMETRIC:
        raise ValueError("isotropic extensions are computed for symmetric forms")
    f = b.field
    perp = orth_complement(b, s)
    if perp.dim != s.dim + 2:
        raise ValueError("s^perp / s must be 2-dimensional")
    pair: list = []
    for r in perp.basis:
        if span(b.dim, f, list(s.basis) + pair + [r]).dim > s.dim + len(pair):
            pair.append(r)
    x, y = pair[:2]
    q11, q12, q22 = b.pair(x, x), b.pair(x, y), b.pair(y, y)
    # B(t x + y, t x + y) = q11 t^2 + 2 q12 t + q22
    vectors = []
    if q11 == 0:
        vectors.append(x)
        if q12 != 0:
            t = f(-q22 * f.inv(f(2 * q12)))
            vectors.append(tuple(f(t * u + w) for u, w in zip(x, y)))
    else:
        r = _sqrt(f, f(q12 * q12 - q11 * q22))
        if r is not None:
            for t in (f((-q12 + r) * f.inv(q11)), f((-q12 - r) * f.inv(q11))):
                vectors.append(tuple(f(t * u + w) for u, w in zip(x, y)))
    exts = {span(b.dim, f, list(s.basis) + [v]) for v in vectors}
    return sorted((e for e in exts if is_isotropic(b, e)), key=lambda e: e.basis)


def theta_map(b: BilinearSpace, s: Subspace, component: str, reference: Subspace) -> Subspace:
    """The maximal isotropic subspace containing ``s`` in the given component."""
    if b.kind != SYMMETRIC or b.dim % 2 or 2 * (s.dim + 1) != b.dim:
        raise ValueError("theta needs a symmetric space of dim 2m and s of dim m-1")
    if not is_isotropic(b, s):
        raise ValueError("s must be isotropic")
    hits = [e for e in isotropic_extensions(b, s) if max_isotropic_component(b, e, reference) == component]
    if len(hits) != 1:
        raise ValueError(f"expected one extension in component {component}, found {len(hits)}")
    return hits[0]


# ---------------------------------------------------------------------------
# varieties


def iso_kind(form: BilinearSpace | None) -> str:
    if form is None:
        return "none"
    return "orthogonal" if form.kind == SYMMETRIC else "symplectic"


@dataclass(frozen=True)
class FlagVariety:
    """Fl / FlO / FlS of a given type in F^ambient.

    For an orthogonal variety whose last dimension is ambient/2 only the
    component of ``component_ref`` is used (default: the first maximal
    isotropic subspace in enumeration order).
    """

    dims: tuple[int, ...]
    ambient: int
    field: Field
    form: BilinearSpace | None = None
    component_ref: Subspace | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(self.dims))
        FlagType(self.dims).check_ambient(self.ambient, self.form is not None)
        if self.form is not None:
            if self.form.dim != self.ambient or self.form.field != self.field:
                raise DimensionMismatch("form does not live on the ambient space")
        if self.needs_component and self.component_ref is None:
            object.__setattr__(self, "component_ref", self._default_ref())
        if self.component_ref is not None:
            if not self.needs_component:
                raise ValueError("component_ref only applies to GO(m, 2m)-type varieties")
            if not _is_max_isotropic(self.form, self.component_ref):
                raise ValueError("component_ref must be maximal isotropic")

    @property
    def type(self) -> FlagType:
        return FlagType(self.dims)

    @property
    def kind(self) -> str:
        return iso_kind(self.form)

    @property
    def is_isotropic(self) -> bool:
        return self.form is not None

    @property
    def needs_component(self) -> bool:
        return (self.form is not None and self.form.kind == SYMMETRIC and bool(self.dims)
                and 2 * self.dims[-1] == self.ambient)

    def _default_ref(self) -> Subspace:
        m = self.ambient // 2
        for s in _isotropic_subspaces(self.form, m):
            return s
        raise ValueError("the form has no maximal isotropic subspace of half dimension")

    def ordinary_count(self) -> int:
        total, prev = 1, 0
        for m in self.dims:
            total *= gaussian_binomial(self.ambient - prev, m - prev, self.field.p)
            prev = m
        return total

    def contains(self, flag: Flag) -> bool:
        if flag.ambient_dim != self.ambient or flag.field != self.field:
            return False
        if tuple(s.dim for s in flag.spaces) != self.dims:
            return False
        if self.form is not None:
            if not flag.spaces:
                return True
            if not is_isotropic(self.form, flag.spaces[-1]):
                return False
            if self.needs_component:
                return max_isotropic_component(self.form, flag.spaces[-1], self.component_ref) == PLUS
        return True

    def points(self, budget: int | None = None) -> list[Flag]:
        return list(enumerate_flags(self, budget))

    def dual(self) -> "FlagVariety":
        """Variety of annihilators: types n - m_k < ... < n - m_1, no form."""
        if self.form is not None:
            raise ValueError("duality is only used for ordinary flag varieties")
        n = self.ambient
        return FlagVariety(tuple(n - m for m in reversed(self.dims)), n, self.field)

    def __str__(self) -> str:
        name = {"none": "Fl", "orthogonal": "FlO", "symplectic": "FlS"}[self.kind]
        return f"{name}({','.join(map(str, self.dims))}; {self.field}^{self.ambient})"


def _isotropic_subspaces(form: BilinearSpace, m: int) -> Iterator[Subspace]:
    for s in _enumerate_subspaces(m, form.dim, form.field):
        if is_isotropic(form, s):
            yield s


def enumerate_flags(variety: FlagVariety, budget: int | None = None) -> Iterator[Flag]:
    """Every flag of the variety once, by iterated fibers (V_{m1}, then V_{m2} > V_{m1}, ...).

    The budget bounds the ordinary flag count, which also bounds the work
    of the isotropic filters.
    """
    f = variety.field
    if not f.is_finite:
        raise ValueError("flag enumeration needs a finite field")
    budget = default_budget() if budget is None else budget
    count = variety.ordinary_count()
    if count > budget:
        raise BudgetExceeded(f"{variety} has up to {count} points, budget is {budget}")
    return _walk(variety)


def _walk(variety: FlagVariety) -> Iterator[Flag]:
    n, f, form = variety.ambient, variety.field, variety.form
    dims = variety.dims
    big = 1 << 62

    def rec(prefix: tuple[Subspace, ...]):
        level = len(prefix)
        if level == len(dims):
            flag = Flag(n, f, prefix)
            if variety.needs_component and not variety.contains(flag):
                return
            yield flag
            return
        base = prefix[-1] if prefix else Subspace.zero(f, n)
        for s in subspaces_containing(base, dims[level], big):
            if form is not None and not is_isotropic(form, s):
                continue
            yield from rec(prefix + (s,))

    if not dims:
        yield Flag(n, f, ())
        return
    yield from rec(())


def flag_from_json(obj, n: int, field: Field) -> Flag:
    return Flag(n, field, tuple(span(n, field, rows) for rows in obj))


def count_flags(variety: FlagVariety, budget: int | None = None) -> int:
    return sum(1 for _ in enumerate_flags(variety, budget))


__all__ = [
    "FlagType", "Flag", "FlagVariety", "project", "enumerate_flags", "count_flags",
    "max_isotropic_component", "theta_map", "isotropic_extensions", "PLUS", "MINUS",
    "SYMMETRIC", "SYMPLECTIC", "flag_from_json",
]
