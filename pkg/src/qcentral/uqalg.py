"""The quantized enveloping algebra U_q(g): the negative half, its pairing and root vectors.

Elements of the negative half are kept as linear combinations of *free* words
in the generators F_i (tuples of 0-based indices).  The Serre relations are
never rewritten eagerly: the bilinear form below vanishes on the Serre ideal,
so every computation that goes through the form is independent of the chosen
representative.  :func:`serre_reduce` produces the canonical representative
over the deglex-standard words when one is needed.

Relations used throughout (simply-laced, ``q_i = q``)::

    K_i E_j K_i^-1 = q^{a_ij} E_j        K_i F_j K_i^-1 = q^{-a_ij} F_j
    E_i F_j - F_j E_i = delta_ij (K_i - K_i^-1) / (q - q^-1)

The form on the negative half is Kashiwara's: ``(1, 1) = 1`` and
``(F_i u, v) = (u, e'_i v) / (1 - q^2)`` where ``e'_i`` is the twisted
derivation ``e'_i(F_j y) = delta_ij y + q^{-(a_i, a_j)} F_j e'_i(y)``.
On words this gives a q-weighted count of letter matchings, each matching
weighted by ``q^{-sum over inversions (a_k, a_l)}``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .cartan import RootData
from .qsym import ONE, ZERO, QRat, q_int, qpow

__all__ = [
    "Convention",
    "ConventionMismatch",
    "NegElement",
    "AlgebraElement",
    "word_weight",
    "words_of_weight",
    "serre_relator",
    "serre_reduce",
    "standard_words",
    "kashiwara_derivation",
    "word_pairing",
    "pairing",
    "pairing_constant",
    "braid_on_generator",
    "braid_apply",
    "root_vectors",
]

FWord = tuple  # tuple[int, ...] of 0-based simple-root indices


class ConventionMismatch(RuntimeError):
    """A braid image failed to land in the negative half."""


@dataclass(frozen=True)
class Convention:
    braid: str = "primary"
    coproduct: str = "standard"

    def __post_init__(self):
        if self.braid not in ("primary", "alt"):
            raise ValueError(f"braid convention must be 'primary' or 'alt', got {self.braid!r}")
        if self.coproduct not in ("standard", "flipped"):
            raise ValueError(f"coproduct must be 'standard' or 'flipped', got {self.coproduct!r}")

    def to_json(self) -> dict:
        return {"braid": self.braid, "coproduct": self.coproduct, "q_integer": "symmetric"}


def word_weight(word: Iterable[int], rank: int) -> tuple[int, ...]:
    w = [0] * rank
    for i in word:
        w[i] += 1
    return tuple(w)


def words_of_weight(mu: tuple[int, ...]) -> list[FWord]:
    """All words with letter content ``mu``, in lexicographic order."""
    letters = [i for i, m in enumerate(mu) for _ in range(m)]
    return sorted(set(itertools.permutations(letters)))


class NegElement:
    """A Q(q)-linear combination of words in the F_i."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[FWord, QRat] | None = None):
        self.terms: dict[FWord, QRat] = {}
        if terms:
            for w, c in terms.items():
                if not isinstance(c, QRat):
                    c = QRat(c)
                if c:
                    self.terms[tuple(w)] = c

    @classmethod
    def word(cls, word: Iterable[int], coeff=ONE) -> "NegElement":
        return cls({tuple(word): coeff})

    @classmethod
    def one(cls) -> "NegElement":
        return cls({(): ONE})

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "NegElement") -> "NegElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w)
            v = c if v is None else v + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NegElement._raw(out)

    def __neg__(self):
        return NegElement._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NegElement":
        if not isinstance(c, QRat):
            c = QRat(c)
        if not c:
            return NegElement()
        return NegElement._raw({w: c * v for w, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, NegElement):
            return self.scale(other)
        out: dict[FWord, QRat] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                v = out.get(w)
                v = c1 * c2 if v is None else v + c1 * c2
                if v:
                    out[w] = v
                else:
                    out.pop(w)
        return NegElement._raw(out)

    def __pow__(self, n: int):
        out = NegElement.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, NegElement) and self.terms == other.terms

    def weights(self, rank: int) -> set[tuple[int, ...]]:
        return {word_weight(w, rank) for w in self.terms}

    def weight(self, rank: int) -> tuple[int, ...] | None:
        """The common weight, or None when the element is not homogeneous."""
        ws = self.weights(rank)
        if len(ws) == 1:
            return next(iter(ws))
        return None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms):
            name = "*".join(f"F{i + 1}" for i in w) or "1"
            parts.append(f"({self.terms[w]})*{name}")
        return " + ".join(parts)

    @classmethod
    def _raw(cls, terms):
        e = cls.__new__(cls)
        e.terms = terms
        return e


def pairing_constant(rd: RootData, i: int = 0) -> QRat:
    """The normalization ``1 / (1 - q_i^2)``."""
    d = rd.symmetrizers[i]
    return (ONE - qpow(2 * d)).inverse()


def _form_table(rd: RootData):
    n = rd.rank
    return tuple(tuple(int(rd.symmetrizers[i] * rd.cartan_matrix[i, j]) for j in range(n)) for i in range(n))


def kashiwara_derivation(rd: RootData, i: int, x: NegElement) -> NegElement:
    """The twisted derivation e'_i: removes one letter i, twisted by the letters to its left."""
    form = _form_table(rd)
    out: dict[FWord, QRat] = {}
    for w, c in x.terms.items():
        exp = 0
        for p, j in enumerate(w):
            if j == i:
                r = w[:p] + w[p + 1:]
                v = c * qpow(-exp) if exp else c
                old = out.get(r)
                v = v if old is None else old + v
                if v:
                    out[r] = v
                else:
                    out.pop(r)
            exp += form[i][j]
    return NegElement._raw(out)


@lru_cache(maxsize=None)
def _word_pair_laurent(form, u: FWord, v: FWord) -> tuple[tuple[int, int], ...]:
    """Laurent polynomial ``sum_sigma q^{-inv(sigma)}`` as sorted (exponent, count) pairs."""
    if not u:
        return ((0, 1),) if not v else ()
    i = u[0]
    acc: dict[int, int] = defaultdict(int)
    exp = 0
    for p, j in enumerate(v):
        if j == i:
            sub = _word_pair_laurent(form, u[1:], v[:p] + v[p + 1:])
            for e, c in sub:
                acc[e - exp] += c
        exp += form[i][j]
    return tuple(sorted((e, c) for e, c in acc.items() if c))


def word_pair_laurent(rd: RootData, u: FWord, v: FWord) -> QRat:
    """Pairing of two words with the constant ``(1-q^2)^{-len}`` stripped off."""
    if len(u) != len(v):
        return ZERO
    if sorted(u) != sorted(v):
        return ZERO
    return QRat.laurent(dict(_word_pair_laurent(_form_table(rd), tuple(u), tuple(v))))


def word_pairing(rd: RootData, u: FWord, v: FWord) -> QRat:
    lp = word_pair_laurent(rd, u, v)
    if not lp:
        return ZERO
    return lp * pairing_constant(rd) ** len(u)


def pairing(rd: RootData, x: NegElement, y: NegElement) -> QRat:
    """Kashiwara's symmetric form on the negative half (zero across different weights)."""
    total = ZERO
    by_len: dict[int, QRat] = {}
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            lp = word_pair_laurent(rd, u, v)
            if lp:
                k = len(u)
                by_len[k] = by_len.get(k, ZERO) + a * b * lp
    for k, s in by_len.items():
        total = total + s * pairing_constant(rd) ** k
    return total


def serre_relator(rd: RootData, i: int, j: int) -> NegElement:
    """The quantum Serre relator for the pair (i, j), i != j."""
    a = int(rd.cartan_matrix[i, j])
    if a == 0:
        return NegElement({(i, j): ONE, (j, i): -ONE})
    if a == -1:
        return NegElement({(i, i, j): ONE, (i, j, i): -q_int(2), (j, i, i): ONE})
    raise ValueError("only simply-laced Cartan entries are supported")


# ---------------------------------------------------------------------------
# canonical representatives

@lru_cache(maxsize=None)
def standard_words(rd: RootData, mu: tuple[int, ...]) -> tuple[FWord, ...]:
    """Deglex-standard words of weight ``mu``: a basis of the weight space.

    A word is standard when it is not a combination of lexicographically
    smaller words modulo the Serre ideal.  Factors of standard words are
    standard, so candidates are restricted to words whose length-(m-1)
    prefix and suffix are already standard.  Independence is tested on the
    vector of pairings against all candidates, evaluated modulo a large
    prime at a fixed generic point.
    """
    from ._modular import rank_select

    if not any(mu):
        return ((),)
    if sum(mu) == 1:
        return (tuple(i for i, m in enumerate(mu) if m),)
    cands = []
    for i, m in enumerate(mu):
        if not m:
            continue
        sub = list(mu)
        sub[i] -= 1
        sub = tuple(sub)
        for s in standard_words(rd, sub):
            w = s + (i,)
            if w[1:] in _std_set(rd, _drop_first(mu, w[0])):
                cands.append(w)
    cands = sorted(set(cands))
    form = _form_table(rd)
    return tuple(rank_select(cands, lambda w: [_laurent_mod(form, w, t) for t in cands]))


def _drop_first(mu, i):
    m = list(mu)
    m[i] -= 1
    return tuple(m)


@lru_cache(maxsize=None)
def _std_set(rd, mu):
    return frozenset(standard_words(rd, mu))


def _laurent_mod(form, u, v):
    from ._modular import PRIME, Q0

    if sorted(u) != sorted(v):
        return 0
    acc = 0
    for e, c in _word_pair_laurent(form, u, v):
        acc += c * pow(Q0, e, PRIME)
    return acc % PRIME


def serre_reduce(rd: RootData, x: NegElement) -> NegElement:
    """Canonical representative of ``x`` modulo the Serre ideal.

    The result is expressed over the standard words of each weight, so it
    is the normal form of the rewriting system whose leading words are the
    non-standard ones; it is idempotent and zero exactly on the ideal.
    """
    from .linalg import SparseMatrix, solve

    by_weight: dict[tuple[int, ...], dict] = defaultdict(dict)
    for w, c in x.terms.items():
        by_weight[word_weight(w, rd.rank)][w] = c
    out: dict[FWord, QRat] = {}
    for mu, terms in sorted(by_weight.items()):
        basis = standard_words(rd, mu)
        if len(basis) == 1 and basis[0] in terms and len(terms) == 1:
            out.update(terms)
            continue
        part = NegElement._raw(terms)
        rhs = [pairing_laurent(rd, part, NegElement.word(s)) for s in basis]
        if not any(rhs):
            continue
        gram = SparseMatrix.from_rows(
            [[word_pair_laurent(rd, s, t) for t in basis] for s in basis]
        )
        coords = solve(gram, rhs)
        for s, c in zip(basis, coords):
            if c:
                out[s] = c
    return NegElement._raw(out)


def pairing_laurent(rd: RootData, x: NegElement, y: NegElement) -> QRat:
    """Pairing of homogeneous elements without the ``(1-q^2)^{-ht}`` factor."""
    total = ZERO
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            lp = word_pair_laurent(rd, u, v)
            if lp:
                total = total + a * b * lp
    return total


# ---------------------------------------------------------------------------
# braid operators

def braid_on_generator(rd: RootData, i: int, j: int, c: Convention) -> NegElement:
    """T_i(F_j) for j != i."""
    a = int(rd.cartan_matrix[i, j])
    if i == j:
        raise ValueError("T_i(F_i) leaves the negative half")
    if a == 0:
        return NegElement.word((j,))
    if a != -1:
        raise ValueError("only simply-laced Cartan entries are supported")
    if c.braid == "primary":
        return NegElement({(i, j): ONE, (j, i): -qpow(-1)})
    return NegElement({(j, i): ONE, (i, j): -qpow(1)})


_QQINV = None


def _qqinv_inverse():
    global _QQINV
    if _QQINV is None:
        _QQINV = (qpow(1) - qpow(-1)).inverse()
    return _QQINV


def braid_apply(rd: RootData, i: int, x: NegElement, c: Convention, check: bool = True) -> NegElement:
    """T_i(x) for x in the negative half whose image is again in the negative half.

    Letters F_j (j != i) map to :func:`braid_on_generator`; the letter F_i maps
    to ``-K_i^{-1} E_i`` (alt) or ``-E_i K_i^{-1}`` (primary).  The product is
    normal ordered as F-word * K * E-word and only the sector with trivial K
    and empty E-word is kept; the remaining sectors must vanish modulo the
    Serre ideal, which is verified by pairing when ``check`` is set and the
    weight space is small.
    """
    n = rd.rank
    form = _form_table(rd)
    images = {}
    for j in range(n):
        if j != i:
            images[j] = braid_on_generator(rd, i, j, c)
    zero_k = (0,) * n
    # terms: (fword, kvec, eword) -> coeff ; kvec in root coordinates
    result: dict[tuple, QRat] = defaultdict(lambda: ZERO)
    for w, coeff in x.terms.items():
        cur: dict[tuple, QRat] = {((), zero_k, ()): coeff}
        for letter in w:
            nxt: dict[tuple, QRat] = defaultdict(lambda: ZERO)
            if letter != i:
                for (fw, kv, ew), a in cur.items():
                    for img_w, b in images[letter].terms.items():
                        part = {(fw, kv, ew): a * b}
                        for g in img_w:
                            part = _right_mul_F(part, g, form)
                        for key, val in part.items():
                            nxt[key] = nxt[key] + val
            else:
                minus_kinv = [0] * n
                minus_kinv[i] = -1
                minus_kinv = tuple(minus_kinv)
                for (fw, kv, ew), a in cur.items():
                    if c.braid == "alt":
                        # (F K E) * K_i^-1 E_i
                        part = _right_mul_K({(fw, kv, ew): -a}, minus_kinv, form)
                        part = {(f, k, e + (i,)): v for (f, k, e), v in part.items()}
                    else:
                        part = {(fw, kv, ew + (i,)): -a}
                        part = _right_mul_K(part, minus_kinv, form)
                    for key, val in part.items():
                        nxt[key] = nxt[key] + val
            cur = {k: v for k, v in nxt.items() if v}
        for key, val in cur.items():
            result[key] = result[key] + val
    keep: dict[FWord, QRat] = {}
    dropped: dict[tuple, dict] = defaultdict(dict)
    for (fw, kv, ew), val in result.items():
        if not val:
            continue
        if not ew and kv == zero_k:
            keep[fw] = val
        else:
            dropped[(kv, ew)][fw] = val
    out = NegElement._raw(keep)
    if check and dropped:
        for sector, terms in dropped.items():
            part = NegElement._raw(terms)
            mu = part.weight(n)
            if mu is None:
                raise ConventionMismatch(f"inhomogeneous residue in sector {sector}")
            if sum(mu) > 7:
                continue
            for t in standard_words(rd, mu):
                if pairing_laurent(rd, part, NegElement.word(t)):
                    raise ConventionMismatch(
                        f"T_{i + 1} image has a non-vanishing residue in sector {sector}"
                    )
    return out


def _right_mul_K(terms, kvec, form):
    """(F K_g E_w) * K_b = q^{-(b, wt w)} F K_{g+b} E_w."""
    out = {}
    n = len(kvec)
    for (fw, kv, ew), a in terms.items():
        exp = 0
        for e in ew:
            exp -= sum(kvec[j] * form[j][e] for j in range(n))
        nk = tuple(x + y for x, y in zip(kv, kvec))
        out[(fw, nk, ew)] = a * qpow(exp) if exp else a
    return out


def _right_mul_F(terms, j, form):
    """(F K_g E_w) * F_j, normal ordered."""
    out: dict[tuple, QRat] = defaultdict(lambda: ZERO)
    n = len(form)
    for (fw, kv, ew), a in terms.items():
        # move F_j leftwards through E_w; each E_j met may annihilate it
        m = len(ew)
        for p in range(m - 1, -1, -1):
            if ew[p] != j:
                continue
            # E_{ew[:p]} [K_j - K_j^-1]/(q-q^-1) E_{ew[p+1:]}  (F_j passed ew[p+1:])
            left, right = ew[:p], ew[p + 1:]
            for sgn in (1, -1):
                kb = [0] * n
                kb[j] = sgn
                # K_b moved left past E_left: E_left K_b = q^{-(b, wt left)} K_b E_left
                exp = -sgn * sum(form[j][e] for e in left)
                coeff = a * _qqinv_inverse() * (qpow(exp) if exp else ONE)
                if sgn < 0:
                    coeff = -coeff
                nk = tuple(x + y for x, y in zip(kv, kb))
                key = (fw, nk, left + right)
                out[key] = out[key] + coeff
        # F_j passes all E's, then K_g: K_g F_j = q^{-(g, a_j)} F_j K_g
        exp = -sum(kv[t] * form[t][j] for t in range(n))
        key = (fw + (j,), kv, ew)
        out[key] = out[key] + (a * qpow(exp) if exp else a)
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def root_vectors(rd: RootData, c: Convention) -> tuple[NegElement, ...]:
    """Root vectors F_beta in the convex order of the w0 word.

    ``F_{beta_k} = T_{i_1} ... T_{i_{k-1}}(F_{i_k})``; when beta_k is simple the
    bare generator is returned (the braid image equals it modulo Serre).
    """
    word = rd.w0_word
    out = []
    for k, ik in enumerate(word):
        beta = rd.positive_roots[k]
        if sum(beta) == 1:
            out.append(NegElement.word((beta.index(1),)))
            continue
        x = NegElement.word((ik,))
        for j in reversed(word[:k]):
            x = braid_apply(rd, j, x, c, check=sum(beta) <= 4)
        if x.weight(rd.rank) != beta:
            raise ConventionMismatch(f"root vector for {beta} has weight {x.weight(rd.rank)}")
        out.append(x)
    return tuple(out)


class AlgebraElement:
    """Finite combination of normal-form terms F-word * K^k * E-word.

    ``k`` is an integer vector in epsilon coordinates (see :mod:`cartan`).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple, QRat] = {}
        if terms:
            for (f, k, e), c in terms.items():
                if not isinstance(c, QRat):
                    c = QRat(c)
                if c:
                    key = (tuple(f), tuple(k), tuple(e))
                    self.terms[key] = self.terms.get(key, ZERO) + c
                    if not self.terms[key]:
                        del self.terms[key]

    @classmethod
    def identity(cls, rd: RootData) -> "AlgebraElement":
        return cls({((), (0,) * rd.eps.shape[0], ()): ONE})

    @classmethod
    def generator(cls, rd: RootData, kind: str, i: int, power: int = 1) -> "AlgebraElement":
        zero = (0,) * rd.eps.shape[0]
        if kind == "F":
            return cls({((i,), zero, ()): ONE})
        if kind == "E":
            return cls({((), zero, (i,)): ONE})
        if kind == "K":
            k = tuple(power * x for x in rd.eps_of_root(rd.simple_root(i)))
            return cls({((), k, ()): ONE})
        raise ValueError(kind)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        e = AlgebraElement()
        e.terms = out
        return e

    def scale(self, c) -> "AlgebraElement":
        e = AlgebraElement()
        if not isinstance(c, QRat):
            c = QRat(c)
        if c:
            e.terms = {k: c * v for k, v in self.terms.items()}
        return e

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.terms == other.terms
