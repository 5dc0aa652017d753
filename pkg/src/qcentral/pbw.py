"""Weight-space linear algebra: PBW bases, the change-of-basis matrix B and dual bases.

For a weight ``mu`` of the negative half:

* ``pbw_basis`` are ordered products of root vectors (convex order);
* ``monomials`` are the deglex-standard words of weight ``mu``;
* ``B[p][m]`` is the coefficient of PBW element ``p`` in the word ``m``;
* ``M[p]`` is the pairing ``(p, p)``; off-diagonal pairings vanish and this
  is checked, never assumed.

Because ``M`` is diagonal, ``B[p][m] = (m, p) / (p, p)``: one column of B only
needs pairings of a word against PBW elements.  Those pairings use the
splitting rule

    (w, x y) = sum over splittings of w into subwords A, B
               q^{-sum_{k in B, l in A, k < l} (a_{w_k}, a_{w_l})} (w|A, x) (w|B, y)

so a PBW element is never expanded against a word as a whole.  All pairings
here are "reduced": the common factor ``(1 - q^2)^{-ht(mu)}`` is left out.
"""
from __future__ import annotations

import itertools
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from . import _modular
from .cartan import RootData, kostant_count
from .linalg import SingularMatrix, SparseMatrix, inverse
from .qsym import ONE, ZERO, QRat, qpow
from .uqalg import (
    Convention,
    NegElement,
    _form_table,
    _word_pair_laurent,
    pairing_constant,
    root_vectors,
    word_weight,
)

__all__ = [
    "PBWMonomial",
    "WeightBlock",
    "NonDiagonalPairing",
    "SingularB",
    "SelectionFailed",
    "enumerate_pbw",
    "expand_pbw_monomial",
    "select_monomials",
    "build_weight_block",
    "dual_bases",
    "PairingEngine",
]

log = logging.getLogger(__name__)

DIRECT_DIAGONAL_LIMIT = 60


class NonDiagonalPairing(AssertionError):
    def __init__(self, mu, i, j, value):
        super().__init__(f"weight {mu}: pairing of PBW elements {i} and {j} is {value}, not 0")
        self.mu = mu
        self.entry = (i, j, str(value))


class SingularB(ArithmeticError):
    pass


class SelectionFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class PBWMonomial:
    exponents: tuple[int, ...]
    weight: tuple[int, ...]

    def factors(self) -> tuple[int, ...]:
        """Root indices in convex order, repeated by multiplicity."""
        return tuple(k for k, a in enumerate(self.exponents) for _ in range(a))


def enumerate_pbw(rd: RootData, mu) -> list[PBWMonomial]:
    """All exponent vectors over the positive roots with total weight ``mu``.

    Order: lexicographically decreasing exponent vectors, so the monomial
    concentrated on early roots of the convex order comes first.
    """
    mu = tuple(mu)
    roots = rd.positive_roots
    N = len(roots)
    out = []

    def rec(k, rest, acc):
        if not any(rest):
            out.append(tuple(acc) + (0,) * (N - k))
            return
        if k == N:
            return
        r = roots[k]
        amax = min((rest[i] // r[i] for i in range(len(r)) if r[i]), default=0)
        for a in range(amax, -1, -1):
            rec(k + 1, tuple(x - a * y for x, y in zip(rest, r)), acc + [a])

    if any(x < 0 for x in mu):
        return []
    rec(0, mu, [])
    return [PBWMonomial(e, mu) for e in out]


def expand_pbw_monomial(p: PBWMonomial, rd: RootData, c: Convention, reduce: bool = True) -> NegElement:
    """The ordered product of root-vector powers as a combination of words."""
    rv = root_vectors(rd, c)
    x = NegElement.one()
    for k in p.factors():
        x = x * rv[k]
    if reduce:
        from .uqalg import serre_reduce

        x = serre_reduce(rd, x)
    return x


# ---------------------------------------------------------------------------

class _Exact:
    zero = ZERO

    @staticmethod
    def qp(k):
        return qpow(k) if k else ONE

    @staticmethod
    def conv(x):
        return x

    @staticmethod
    def laurent(pairs):
        return QRat.laurent(dict(pairs)) if pairs else ZERO

    @staticmethod
    def norm(x):
        return x


class _Mod:
    zero = 0
    P = _modular.PRIME

    @staticmethod
    def qp(k):
        return pow(_modular.Q0, k, _modular.PRIME)

    @staticmethod
    def conv(x):
        return x.eval_mod(_modular.Q0, _modular.PRIME)

    @staticmethod
    def laurent(pairs):
        P, q0 = _modular.PRIME, _modular.Q0
        return sum(c * pow(q0, e, P) for e, c in pairs) % P

    @staticmethod
    def norm(x):
        return x % _modular.PRIME


def _splits(word, content):
    """Yield (A positions, B positions) with the letters at A having ``content``."""
    occ = defaultdict(list)
    for p, i in enumerate(word):
        occ[i].append(p)
    choices = []
    for i, m in enumerate(content):
        if m:
            if len(occ[i]) < m:
                return
            choices.append(list(itertools.combinations(occ[i], m)))
    for pick in itertools.product(*choices):
        A = sorted(x for grp in pick for x in grp)
        Aset = set(A)
        B = [p for p in range(len(word)) if p not in Aset]
        yield A, B


class PairingEngine:
    """Reduced pairings of words with root vectors and PBW monomials."""

    def __init__(self, rd: RootData, c: Convention, mode: str = "exact"):
        self.rd = rd
        self.conv = c
        self.dom = _Exact if mode == "exact" else _Mod
        self.form = _form_table(rd)
        self.rv = root_vectors(rd, c)
        self.rv_terms = [
            [(w, self.dom.conv(a)) for w, a in x.terms.items()] for x in self.rv
        ]
        self._root_cache: dict = {}
        self._prod_cache: dict = {}

    def word_root(self, w: tuple, k: int):
        """(w, F_{beta_k})."""
        key = (w, k)
        hit = self._root_cache.get(key)
        if hit is not None:
            return hit
        dom = self.dom
        sw = sorted(w)
        acc = dom.zero
        for v, a in self.rv_terms[k]:
            if sorted(v) != sw:
                continue
            lp = _word_pair_laurent(self.form, w, v)
            if lp:
                acc = acc + a * dom.laurent(lp)
        acc = dom.norm(acc)
        self._root_cache[key] = acc
        return acc

    def word_product(self, w: tuple, factors: tuple):
        """(w, F_{b1} F_{b2} ...) for root indices ``factors``."""
        if len(factors) == 1:
            return self.word_root(w, factors[0])
        key = (w, factors)
        hit = self._prod_cache.get(key)
        if hit is not None:
            return hit
        dom = self.dom
        form = self.form
        first = self.rd.positive_roots[factors[0]]
        rest = factors[1:]
        acc = dom.zero
        for A, B in _splits(w, first):
            wa = tuple(w[p] for p in A)
            fa = self.word_root(wa, factors[0])
            if not fa:
                continue
            wb = tuple(w[p] for p in B)
            fb = self.word_product(wb, rest)
            if not fb:
                continue
            cross = 0
            for k in B:
                for l in A:
                    if l > k:
                        cross += form[w[k]][w[l]]
            acc = acc + dom.qp(-cross) * fa * fb
        acc = dom.norm(acc)
        self._prod_cache[key] = acc
        return acc

    def word_pbw(self, w: tuple, p: PBWMonomial):
        f = p.factors()
        if not f:
            return self.dom.conv(ONE) if not w else self.dom.zero
        return self.word_product(w, f)

    def element_pbw(self, x: NegElement, p: PBWMonomial):
        acc = self.dom.zero
        for w, a in x.terms.items():
            v = self.word_pbw(w, p)
            if v:
                acc = acc + self.dom.conv(a) * v
        return self.dom.norm(acc)


@lru_cache(maxsize=None)
def _engine(rd: RootData, c: Convention, mode: str) -> PairingEngine:
    return PairingEngine(rd, c, mode)


@lru_cache(maxsize=None)
def _standard(rd: RootData, c: Convention, mu: tuple) -> tuple:
    """Deglex-standard words of weight ``mu`` (greedy, PBW coordinates mod p)."""
    if not any(mu):
        return ((),)
    if sum(mu) == 1:
        return (tuple(i for i, m in enumerate(mu) if m),)
    basis = enumerate_pbw(rd, mu)
    cands = set()
    for i, m in enumerate(mu):
        if not m:
            continue
        sub = list(mu)
        sub[i] -= 1
        sub = tuple(sub)
        pref = _standard(rd, c, sub)
        for s in pref:
            w = s + (i,)
            first = w[0]
            sub2 = list(mu)
            sub2[first] -= 1
            if w[1:] in _standard_set(rd, c, tuple(sub2)):
                cands.add(w)
    eng = _engine(rd, c, "mod")
    chosen = _modular.rank_select(
        sorted(cands), lambda w: [eng.word_pbw(w, p) for p in basis], target=len(basis)
    )
    if len(chosen) != len(basis):
        raise SelectionFailed(f"weight {mu}: only {len(chosen)} of {len(basis)} independent words")
    return tuple(chosen)


@lru_cache(maxsize=None)
def _standard_set(rd, c, mu):
    return frozenset(_standard(rd, c, mu))


def select_monomials(rd: RootData, mu, basis=None, c: Convention = Convention()) -> list[tuple]:
    """Standard words of weight ``mu``: scanned in lex order, kept when they raise the rank."""
    return list(_standard(rd, c, tuple(mu)))


@dataclass
class WeightBlock:
    weight: tuple[int, ...]
    pbw_basis: list[PBWMonomial]
    monomials: list[tuple]
    B: SparseMatrix  # rows: PBW, cols: words
    M: list[QRat]  # full pairing (p, p), including (1-q^2)^{-ht}
    M_reduced: list[QRat] = field(repr=False)
    B_inv: SparseMatrix = field(repr=False)
    convention: Convention = Convention()
    stats: dict = field(default_factory=dict)
    rd: RootData | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.pbw_basis)

    def gram_reduced_direct(self) -> SparseMatrix:
        """Word Gram matrix computed directly from word pairings (independent of B)."""
        form = _form_table(self.rd)
        rows = []
        for u in self.monomials:
            rows.append([QRat.laurent(dict(_word_pair_laurent(form, u, v))) if sorted(u) == sorted(v) else ZERO
                         for v in self.monomials])
        return SparseMatrix.from_rows(rows)

    def gram_factored(self) -> SparseMatrix:
        """transpose(B) * diag(M) * B with the reduced M."""
        return self.B.transpose() @ self.B.scale_rows(self.M_reduced)

    def stats_line(self) -> dict:
        return dict(self.stats)


def build_weight_block(
    rd: RootData,
    mu,
    c: Convention = Convention(),
    check_diagonal: str = "auto",
) -> WeightBlock:
    """Assemble PBW basis, standard words, B, M and B^{-1} for one weight.

    ``check_diagonal``: ``direct`` pairs every PBW pair, ``gram`` verifies
    ``B^T M B`` against the directly computed word Gram matrix (this
    certifies that the pairing is diagonal on the PBW basis), ``auto`` uses
    ``direct`` for small blocks and ``gram`` otherwise, ``none`` skips.
    """
    t0 = time.perf_counter()
    mu = tuple(mu)
    basis = enumerate_pbw(rd, mu)
    d = len(basis)
    words = select_monomials(rd, mu, basis, c)
    eng = _engine(rd, c, "exact")
    expansions = [expand_pbw_monomial(p, rd, c, reduce=False) for p in basis]
    m_red = []
    for p, x in zip(basis, expansions):
        v = eng.element_pbw(x, p)
        if not v:
            raise NonDiagonalPairing(mu, basis.index(p), basis.index(p), v)
        m_red.append(v)
    inv_m = [v.inverse() for v in m_red]
    B = SparseMatrix(d, d)
    for j, w in enumerate(words):
        for i, p in enumerate(basis):
            v = eng.word_pbw(w, p)
            if v:
                B.set(i, j, v * inv_m[i])
    mode = check_diagonal
    if mode == "auto":
        mode = "direct" if d <= DIRECT_DIAGONAL_LIMIT else "gram"
    if mode == "direct":
        for i, x in enumerate(expansions):
            for j, p in enumerate(basis):
                if i != j:
                    v = eng.element_pbw(x, p)
                    if v:
                        raise NonDiagonalPairing(mu, i, j, v * pairing_constant(rd) ** sum(mu))
    try:
        B_inv = inverse(B, ONE)
    except SingularMatrix as exc:
        raise SingularB(f"weight {mu}: {exc}") from exc
    cst = pairing_constant(rd) ** sum(mu)
    wb = WeightBlock(
        weight=mu,
        pbw_basis=basis,
        monomials=words,
        B=B,
        M=[v * cst for v in m_red],
        M_reduced=m_red,
        B_inv=B_inv,
        convention=c,
        rd=rd,
    )
    if mode == "gram":
        if not wb.gram_factored().equals(wb.gram_reduced_direct()):
            bad = _first_difference(wb.gram_factored(), wb.gram_reduced_direct())
            raise NonDiagonalPairing(mu, bad[0], bad[1], "Gram factorization mismatch")
    elapsed = (time.perf_counter() - t0) * 1000
    nnz = B.nnz()
    wb.stats = {
        "weight": list(mu),
        "dimension": d,
        "nnz": nnz,
        "nnz_fraction": nnz / (d * d) if d else 0.0,
        "nnz_inverse": B_inv.nnz(),
        "diagonal_check": mode,
        "elapsed_ms": round(elapsed, 3),
    }
    if d != kostant_count(rd.positive_roots, mu):
        raise AssertionError(f"weight {mu}: PBW enumeration disagrees with the partition count")
    log.debug("block %s: dim %d nnz %d (%.1f ms)", mu, d, nnz, elapsed)
    return wb


def _first_difference(a: SparseMatrix, b: SparseMatrix):
    for i in range(a.nrows):
        ra, rb = a.rows.get(i, {}), b.rows.get(i, {})
        for j in set(ra) | set(rb):
            if ra.get(j) != rb.get(j):
                return i, j
    return -1, -1


def dual_bases(wb: WeightBlock) -> tuple[list[NegElement], list[NegElement]]:
    """Words u_k and elements v_k with (u_j, v_k) = delta_jk.

    ``v_k = sum_m (G^{-1})_{mk} w_m`` with ``G^{-1} = B^{-1} M^{-1} B^{-T}``.
    """
    if wb.dimension == 0:
        raise SingularB("empty block")
    Minv = [m.inverse() for m in wb.M]
    ginv = wb.B_inv @ wb.B_inv.transpose().scale_rows(Minv)
    us = [NegElement.word(w) for w in wb.monomials]
    vs = []
    d = wb.dimension
    cols = ginv.transpose()
    for k in range(d):
        row = cols.rows.get(k, {})
        vs.append(NegElement({wb.monomials[m]: c for m, c in row.items()}))
    return us, vs


def gram_inverse_apply(wb: WeightBlock, r: list) -> list:
    """``G^{-1} r`` for the full word Gram matrix, via B^{-1} M^{-1} B^{-T}."""
    t = wb.B_inv.transpose().apply(r, ZERO)
    t = [x * m.inverse() if x else ZERO for x, m in zip(t, wb.M)]
    return wb.B_inv.apply(t, ZERO)
