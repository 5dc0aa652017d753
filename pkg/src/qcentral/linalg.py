"""Sparse exact linear algebra over Q(q) (or any exact field).

Matrices are dict-of-dicts, row -> {col: value}, with structurally zero
entries never stored.  Elimination is Gauss-Jordan with Markowitz-style
pivoting: the pivot column is the one with fewest nonzeros, and within it
the row with fewest nonzeros.  Values are canonicalized by the field type on
every operation, so a zero test is a structural test.
"""
from __future__ import annotations

from typing import Callable, Iterable, Sequence

__all__ = ["SparseMatrix", "SingularMatrix", "solve", "inverse", "nullspace"]


class SingularMatrix(ArithmeticError):
    pass


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: dict[int, dict[int, object]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, object]] = rows if rows is not None else {}

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "SparseMatrix":
        m = cls(len(data), len(data[0]) if data else 0)
        for i, row in enumerate(data):
            r = {j: v for j, v in enumerate(row) if v}
            if r:
                m.rows[i] = r
        return m

    @classmethod
    def identity(cls, n: int, one) -> "SparseMatrix":
        return cls(n, n, {i: {i: one} for i in range(n)})

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j)

    def set(self, i: int, j: int, v):
        if v:
            self.rows.setdefault(i, {})[j] = v
        else:
            r = self.rows.get(i)
            if r is not None:
                r.pop(j, None)
                if not r:
                    del self.rows[i]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.ncols, self.nrows)
        for i, r in self.rows.items():
            for j, v in r.items():
                t.rows.setdefault(j, {})[i] = v
        return t

    def map(self, fn: Callable) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols)
        for i, r in self.rows.items():
            for j, v in r.items():
                out.set(i, j, fn(v))
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = SparseMatrix(self.nrows, other.ncols)
        for i, r in self.rows.items():
            acc: dict[int, object] = {}
            for k, a in r.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    v = acc.get(j)
                    acc[j] = a * b if v is None else v + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out.rows[i] = acc
        return out

    def scale_rows(self, d: Sequence) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols)
        for i, r in self.rows.items():
            out.rows[i] = {j: d[i] * v for j, v in r.items()}
        return out

    def apply(self, vec: Sequence, zero) -> list:
        out = [zero] * self.nrows
        for i, r in self.rows.items():
            acc = zero
            for j, v in r.items():
                if vec[j]:
                    acc = acc + v * vec[j]
            out[i] = acc
        return out

    def is_identity(self) -> bool:
        if self.nrows != self.ncols or len(self.rows) != self.nrows:
            return False
        for i, r in self.rows.items():
            if len(r) != 1 or i not in r or not _is_one(r[i]):
                return False
        return True

    def equals(self, other: "SparseMatrix") -> bool:
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def to_dense(self, zero) -> list[list]:
        return [[self.rows.get(i, {}).get(j, zero) for j in range(self.ncols)] for i in range(self.nrows)]

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def _is_one(v) -> bool:
    try:
        return v == 1
    except TypeError:
        return False


def _eliminate(a: SparseMatrix, rhs_cols: dict[int, dict[int, object]], ncols_rhs: int):
    """Gauss-Jordan on ``a`` applied to the augmented block ``rhs_cols``.

    ``rhs_cols`` is row -> {col: value}.  Returns (pivot_of_col, reduced rows,
    reduced rhs) with every pivot normalized to one.
    """
    n = a.nrows
    rows = {i: dict(r) for i, r in a.rows.items()}
    rhs = {i: dict(rhs_cols.get(i, {})) for i in range(n)}
    colrows: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            colrows.setdefault(j, set()).add(i)
    pivot_row_of_col: dict[int, int] = {}
    used_rows: set[int] = set()
    remaining = set(colrows)
    while remaining:
        col = min(remaining, key=lambda c: (len(colrows[c] - used_rows), c))
        remaining.discard(col)
        cands = colrows[col] - used_rows
        if not cands:
            continue
        prow = min(cands, key=lambda r: (len(rows[r]), r))
        used_rows.add(prow)
        pivot_row_of_col[col] = prow
        pr = rows[prow]
        inv = 1 / pr[col] if not hasattr(pr[col], "inverse") else pr[col].inverse()
        if not _is_one(pr[col]):
            for j in pr:
                pr[j] = pr[j] * inv
            prhs = rhs[prow]
            for j in prhs:
                prhs[j] = prhs[j] * inv
        prhs = rhs[prow]
        for r in list(colrows[col]):
            if r == prow:
                continue
            row = rows[r]
            f = row.get(col)
            if not f:
                continue
            for j, v in pr.items():
                old = row.get(j)
                nv = -f * v if old is None else old - f * v
                if nv:
                    if old is None:
                        colrows.setdefault(j, set()).add(r)
                    row[j] = nv
                else:
                    row.pop(j, None)
                    colrows[j].discard(r)
            rrhs = rhs[r]
            for j, v in prhs.items():
                old = rrhs.get(j)
                nv = -f * v if old is None else old - f * v
                if nv:
                    rrhs[j] = nv
                else:
                    rrhs.pop(j, None)
        colrows[col] = {prow}
    return pivot_row_of_col, rows, rhs


def inverse(a: SparseMatrix, one) -> SparseMatrix:
    if a.nrows != a.ncols:
        raise ValueError("inverse of a non-square matrix")
    n = a.nrows
    piv, rows, rhs = _eliminate(a, {i: {i: one} for i in range(n)}, n)
    if len(piv) != n:
        raise SingularMatrix(f"rank {len(piv)} < {n}")
    out = SparseMatrix(n, n)
    for col, r in piv.items():
        if rhs[r]:
            out.rows[col] = dict(rhs[r])
    return out


def solve(a: SparseMatrix, b: Sequence, zero=None) -> list:
    """Solve ``a x = b`` for square nonsingular ``a``."""
    n = a.nrows
    rhs = {i: {0: b[i]} for i in range(n) if b[i]}
    piv, rows, red = _eliminate(a, rhs, 1)
    if len(piv) != n:
        raise SingularMatrix(f"rank {len(piv)} < {n}")
    if zero is None:
        zero = b[0] * 0 if b else 0
    x = [zero] * a.ncols
    for col, r in piv.items():
        v = red[r].get(0)
        if v:
            x[col] = v
    return x


def nullspace(a: SparseMatrix, one, zero) -> list[list]:
    """Basis of the right kernel in reduced form (free variable set to one)."""
    piv, rows, _ = _eliminate(a, {}, 0)
    pivot_cols = set(piv)
    free = [j for j in range(a.ncols) if j not in pivot_cols]
    basis = []
    for f in free:
        v = [zero] * a.ncols
        v[f] = one
        for col, r in piv.items():
            c = rows[r].get(f)
            if c:
                v[col] = -c
        basis.append(v)
    return basis
