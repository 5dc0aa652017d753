"""Root data for the simply-laced families A_n and D_n.

Roots are integer vectors in the basis of simple roots.  For the K-part of
central elements and for representation weights we also carry the
orthonormal "epsilon" coordinates: ``eps_of_root`` maps a root-lattice vector
to R^{n+1} (type A, the gl_{n+1} torus) or R^n (type D).

The reduced word of the longest Weyl element is the lexicographically
smallest one: starting from w0, repeatedly strip the smallest left descent.
For A_2 this gives (1, 2, 1) with the convex order a1, a1+a2, a2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = ["CartanType", "RootData", "UnsupportedType", "build_root_data", "kostant_count"]


class UnsupportedType(ValueError):
    """Only the families A (rank >= 1) and D (rank >= 3) are implemented."""


@dataclass(frozen=True)
class CartanType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("A", "D"):
            raise UnsupportedType(f"unsupported family {self.family!r}; only A and D")
        if self.family == "A" and self.rank < 1:
            raise UnsupportedType("A_n needs n >= 1")
        if self.family == "D" and self.rank < 3:
            raise UnsupportedType("D_n needs n >= 3")

    def __str__(self):
        return f"{self.family}{self.rank}"


def cartan_matrix(t: CartanType) -> np.ndarray:
    n = t.rank
    a = 2 * np.eye(n, dtype=int)
    if t.family == "A":
        for i in range(n - 1):
            a[i, i + 1] = a[i + 1, i] = -1
    else:
        for i in range(n - 2):
            a[i, i + 1] = a[i + 1, i] = -1
        # node n-1 (0-based n-1) hangs off node n-3
        a[n - 3, n - 1] = a[n - 1, n - 3] = -1
    return a


def eps_matrix(t: CartanType) -> np.ndarray:
    """Columns are the simple roots written in epsilon coordinates."""
    n = t.rank
    if t.family == "A":
        m = np.zeros((n + 1, n), dtype=int)
        for i in range(n):
            m[i, i], m[i + 1, i] = 1, -1
        return m
    m = np.zeros((n, n), dtype=int)
    for i in range(n - 1):
        m[i, i], m[i + 1, i] = 1, -1
    m[n - 2, n - 1], m[n - 1, n - 1] = 1, 1
    return m


@dataclass(frozen=True, eq=False)
class RootData:
    ctype: CartanType
    cartan_matrix: np.ndarray
    symmetrizers: tuple[int, ...]
    w0_word: tuple[int, ...]
    positive_roots: tuple[tuple[int, ...], ...]
    eps: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return self.ctype.rank

    def form(self, a, b) -> int:
        """Symmetric bilinear form (a, b) on root-lattice vectors."""
        a = np.asarray(a)
        b = np.asarray(b)
        sym = self.cartan_matrix * np.asarray(self.symmetrizers)[:, None]
        return int(a @ sym @ b)

    def eps_of_root(self, mu) -> tuple[int, ...]:
        return tuple(int(x) for x in self.eps @ np.asarray(mu, dtype=int))

    def simple_root(self, i: int) -> tuple[int, ...]:
        v = [0] * self.rank
        v[i] = 1
        return tuple(v)

    def rho2_eps(self) -> tuple[int, ...]:
        """2*rho in epsilon coordinates."""
        tot = np.zeros(self.eps.shape[0], dtype=int)
        for r in self.positive_roots:
            tot += self.eps @ np.asarray(r)
        return tuple(int(x) for x in tot)

    def reflect(self, i: int, v) -> tuple[int, ...]:
        v = list(v)
        c = sum(int(self.cartan_matrix[i, j]) * v[j] for j in range(self.rank))
        v[i] -= c
        return tuple(v)

    def to_json(self) -> dict:
        return {
            "family": self.ctype.family,
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix.tolist(),
            "symmetrizers": list(self.symmetrizers),
            "w0_word": [i + 1 for i in self.w0_word],
            "positive_roots": [list(r) for r in self.positive_roots],
        }


def _reflection_closure(a: np.ndarray) -> set[tuple[int, ...]]:
    n = a.shape[0]
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for v in frontier:
            for i in range(n):
                c = sum(int(a[i, j]) * v[j] for j in range(n))
                w = list(v)
                w[i] -= c
                w = tuple(w)
                if all(x >= 0 for x in w) and w not in seen:
                    seen.add(w)
                    new.append(w)
        frontier = new
    return seen


def _lex_w0_word(a: np.ndarray, positives: set) -> tuple[int, ...]:
    """Lexicographically smallest reduced word of the longest element."""
    n = a.shape[0]
    # w is tracked through its inverse action on simple roots: winv[i] = w^{-1}(alpha_i)
    # start at w0: w0^{-1} = w0 sends every positive root to a negative one.
    # Represent w by a matrix acting on root coordinates.
    s = []
    for i in range(n):
        m = np.eye(n, dtype=int)
        m[i, :] -= a[i, :]
        s.append(m)
    # build w0 as a matrix by a greedy descent on the dominant chamber
    w = np.eye(n, dtype=int)
    length = 0
    total = len(positives)
    # increase w until every simple root is sent negative: w0 is the unique such element
    while length < total:
        for i in range(n):
            # right multiply by s_i increases length iff w(alpha_i) > 0
            col = w[:, i]
            if (col >= 0).all():
                w = w @ s[i]
                length += 1
                break
    word = []
    while length:
        for i in range(n):
            # left descent i  iff  w^{-1}(alpha_i) < 0
            winv = np.round(np.linalg.inv(w)).astype(int)
            if (winv[:, i] <= 0).all():
                w = s[i] @ w
                word.append(i)
                length -= 1
                break
    return tuple(word)


@lru_cache(maxsize=None)
def build_root_data(t: CartanType) -> RootData:
    if not isinstance(t, CartanType):
        raise UnsupportedType(f"not a CartanType: {t!r}")
    a = cartan_matrix(t)
    positives = _reflection_closure(a)
    word = _lex_w0_word(a, positives)
    sym = tuple([1] * t.rank)
    rd = RootData(t, a, sym, word, (), eps_matrix(t))
    roots = []
    for k, ik in enumerate(word):
        v = rd.simple_root(ik)
        for j in reversed(word[:k]):
            v = rd.reflect(j, v)
        roots.append(v)
    object.__setattr__(rd, "positive_roots", tuple(roots))
    if set(roots) != positives or len(roots) != len(positives):
        raise AssertionError(f"w0 word {word} does not enumerate the positive roots of {t}")
    return rd


def kostant_count(roots, mu) -> int:
    """Number of ways to write ``mu`` as a sum of positive roots (brute force)."""
    roots = tuple(tuple(r) for r in roots)

    @lru_cache(maxsize=None)
    def f(k, rest):
        if not any(rest):
            return 1
        if k == len(roots):
            return 0
        tot = 0
        cur = rest
        while all(c >= 0 for c in cur):
            tot += f(k + 1, cur)
            cur = tuple(x - y for x, y in zip(cur, roots[k]))
        return tot

    return f(0, tuple(mu))
