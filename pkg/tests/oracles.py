"""Brute-force reference implementations that share no code with flagkit.

Subspaces are frozensets of vectors (tuples of ints mod p), so everything
here is plain set manipulation over F_p^n.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def vectors(p: int, n: int):
    return list(itertools.product(range(p), repeat=n))


def add(u, v, p):
    return tuple((a + b) % p for a, b in zip(u, v))


def scale(c, v, p):
    return tuple((c * a) % p for a in v)


def closure(gens, p: int, n: int) -> frozenset:
    pts = {tuple([0] * n)}
    for g in gens:
        new = set(pts)
        for c in range(1, p):
            cg = scale(c, g, p)
            new |= {add(x, cg, p) for x in pts}
        pts = new
    return frozenset(pts)


def dim_of(space: frozenset, p: int) -> int:
    size, d = len(space), 0
    while size > 1:
        size //= p
        d += 1
    return d


@lru_cache(maxsize=None)
def all_subspaces(p: int, n: int, m: int) -> frozenset:
    """All m-dimensional subspaces, grown one vector at a time from the zero space."""
    zero = frozenset({tuple([0] * n)})
    if m == 0:
        return frozenset({zero})
    out = set()
    for s in all_subspaces(p, n, m - 1):
        for v in vectors(p, n):
            if v not in s:
                out.add(frozenset(add(x, scale(c, v, p), p) for x in s for c in range(p)))
    return frozenset(out)


def flags(p: int, n: int, dims) -> list:
    levels = [all_subspaces(p, n, m) for m in dims]
    out = [()]
    for level in levels:
        out = [f + (s,) for f in out for s in level if not f or f[-1] < s]
    return out


def pair(gram, u, v, p):
    return sum(u[i] * gram[i][j] * v[j] for i in range(len(u)) for j in range(len(v))) % p


def isotropic(space, gram, p) -> bool:
    return all(pair(gram, u, v, p) == 0 for u in space for v in space)


def isotropic_flags(p: int, n: int, dims, gram) -> list:
    return [f for f in flags(p, n, dims) if isotropic(f[-1], gram, p)]


def hyperbolic_gram(n_pairs: int, symplectic: bool, e0: bool = False, p: int = 3):
    size = 2 * n_pairs + (1 if e0 else 0)
    g = [[0] * size for _ in range(size)]
    for i in range(n_pairs):
        a, b = 2 * i, 2 * i + 1
        g[a][b] = 1
        g[b][a] = (p - 1) if symplectic else 1
    if e0:
        g[-1][-1] = 1
    return g


def perp(space, gram, p, n):
    return frozenset(v for v in vectors(p, n) if all(pair(gram, u, v, p) == 0 for u in space))


def annihilator(space, p, n):
    return frozenset(v for v in vectors(p, n) if all(sum(a * b for a, b in zip(u, v)) % p == 0 for u in space))


def as_set(sub) -> frozenset:
    """Convert a flagkit Subspace to its set of vectors (used only for comparison)."""
    p, n = sub.field.p, sub.ambient_dim
    return closure([tuple(int(x) for x in r) for r in sub.basis], p, n)
