"""Vector representations, iterated coproducts and the centrality check.

Basis vectors of V^{(x)L} are tuples of local indices.  Every generator maps
a product basis vector to a combination of product basis vectors with
coefficients that are signed powers of q, so word actions are computed with
integer Laurent dictionaries and only turned into Q(q) at the end.

Coproducts (``standard``)::

    D(E_i) = E_i (x) 1 + K_i (x) E_i      D(F_i) = F_i (x) K_i^-1 + 1 (x) F_i

and ``flipped`` is the opposite coproduct.  K exponents act on a basis
vector of epsilon-weight w by ``q^{k . w}``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cartan import CartanType, RootData, UnsupportedType, build_root_data
from .linalg import SparseMatrix
from .qsym import ONE, ZERO, QRat, eval_at, qpow
from .uqalg import AlgebraElement, Convention

__all__ = [
    "Representation",
    "Hamiltonian",
    "NotCentral",
    "vector_rep",
    "relation_self_test",
    "TensorPower",
    "coproduct_power",
    "verify_central",
    "hamiltonian",
    "bond_sum",
    "commutes_with_generators",
]


class NotCentral(AssertionError):
    def __init__(self, generator: str, witness):
        super().__init__(f"does not commute with {generator}; witness {witness}")
        self.generator = generator
        self.witness = witness


@dataclass(frozen=True, eq=False)
class Representation:
    """A weight module with 0/1 generator matrices (vector modules are minuscule)."""

    rd: RootData
    dim: int
    weights: tuple[tuple[int, ...], ...]  # epsilon coordinates
    labels: tuple[str, ...]
    # E[i][v] = w means E_i v_v = v_w (coefficient one); F likewise
    E: tuple[dict, ...] = field(repr=False)
    F: tuple[dict, ...] = field(repr=False)

    def k_exponent(self, i: int, v: int) -> int:
        """K_i acts on basis vector v by q^{this}."""
        a = self.rd.eps_of_root(self.rd.simple_root(i))
        return sum(x * y for x, y in zip(a, self.weights[v]))

    def matrix(self, kind: str, i: int) -> SparseMatrix:
        m = SparseMatrix(self.dim, self.dim)
        if kind in ("E", "F"):
            table = (self.E if kind == "E" else self.F)[i]
            for v, w in table.items():
                m.set(w, v, ONE)
        elif kind == "K":
            for v in range(self.dim):
                m.set(v, v, qpow(self.k_exponent(i, v)))
        elif kind == "Kinv":
            for v in range(self.dim):
                m.set(v, v, qpow(-self.k_exponent(i, v)))
        else:
            raise ValueError(kind)
        return m

    def highest_index(self) -> int:
        return 0


@lru_cache(maxsize=None)
def vector_rep(t: CartanType) -> Representation:
    """The defining module: dimension n+1 for A_n, 2n for D_n."""
    if not isinstance(t, CartanType):
        raise UnsupportedType(repr(t))
    rd = build_root_data(t)
    n = t.rank
    if t.family == "A":
        dim = n + 1
        weights = tuple(tuple(int(j == k) for j in range(dim)) for k in range(dim))
        labels = tuple(str(k) for k in range(dim))
        E = tuple({i + 1: i} for i in range(n))
        F = tuple({i: i + 1} for i in range(n))
    else:
        dim = 2 * n
        # order: e_1..e_n, -e_n..-e_1 ; index of -e_k is 2n-1-k (0-based k)
        def pos(k):
            return k

        def neg(k):
            return 2 * n - 1 - k

        w = []
        for k in range(n):
            w.append(tuple(int(j == k) for j in range(n)))
        for k in reversed(range(n)):
            w.append(tuple(-int(j == k) for j in range(n)))
        weights = tuple(w)
        labels = tuple([f"+{k + 1}" for k in range(n)] + [f"-{k + 1}" for k in reversed(range(n))])
        E, F = [], []
        for i in range(n - 1):
            # alpha_i = e_i - e_{i+1}
            E.append({pos(i + 1): pos(i), neg(i): neg(i + 1)})
            F.append({pos(i): pos(i + 1), neg(i + 1): neg(i)})
        # alpha_n = e_{n-1} + e_n
        E.append({neg(n - 1): pos(n - 2), neg(n - 2): pos(n - 1)})
        F.append({pos(n - 2): neg(n - 1), pos(n - 1): neg(n - 2)})
        E, F = tuple(E), tuple(F)
    rep = Representation(rd, dim, weights, labels, E, F)
    relation_self_test(rep)
    return rep


def relation_self_test(rep: Representation) -> None:
    """Check every defining relation as an exact matrix identity."""
    rd = rep.rd
    n = rd.rank
    I = SparseMatrix.identity(rep.dim, ONE)
    E = [rep.matrix("E", i) for i in range(n)]
    F = [rep.matrix("F", i) for i in range(n)]
    K = [rep.matrix("K", i) for i in range(n)]
    Ki = [rep.matrix("Kinv", i) for i in range(n)]
    qq = (qpow(1) - qpow(-1)).inverse()

    def sub(a, b):
        out = SparseMatrix(a.nrows, a.ncols, {i: dict(r) for i, r in a.rows.items()})
        for i, r in b.rows.items():
            for j, v in r.items():
                out.set(i, j, (out[i, j] or ZERO) - v)
        return out

    def scal(c, a):
        return a.map(lambda v: c * v)

    def check(cond, msg):
        if not cond:
            raise AssertionError(f"{rd.ctype} vector module: {msg}")

    for i in range(n):
        check((K[i] @ Ki[i]).is_identity(), f"K_{i + 1} K_{i + 1}^-1 != 1")
        for j in range(n):
            a = int(rd.cartan_matrix[i, j])
            check((K[i] @ E[j] @ Ki[i]).equals(scal(qpow(a), E[j])), f"K{i + 1} E{j + 1}")
            check((K[i] @ F[j] @ Ki[i]).equals(scal(qpow(-a), F[j])), f"K{i + 1} F{j + 1}")
            comm = sub(E[i] @ F[j], F[j] @ E[i])
            if i == j:
                check(comm.equals(scal(qq, sub(K[i], Ki[i]))), f"[E{i + 1},F{i + 1}]")
            else:
                check(comm.nnz() == 0, f"[E{i + 1},F{j + 1}] != 0")
            if i != j:
                for X in (E, F):
                    if a == 0:
                        rel = sub(X[i] @ X[j], X[j] @ X[i])
                    else:
                        t1 = X[i] @ X[i] @ X[j]
                        t2 = scal(qpow(1) + qpow(-1), X[i] @ X[j] @ X[i])
                        t3 = X[j] @ X[i] @ X[i]
                        rel = sub(t1, t2)
                        for r, row in t3.rows.items():
                            for c, v in row.items():
                                rel.set(r, c, (rel[r, c] or ZERO) + v)
                    check(rel.nnz() == 0, f"Serre relation ({i + 1},{j + 1})")
    del I


# ---------------------------------------------------------------------------
# tensor powers

Laurent = dict  # exponent -> int


class TensorPower:
    """Action of U_q on V^{(x)L} through the iterated coproduct."""

    def __init__(self, rep: Representation, L: int, c: Convention = Convention()):
        if L < 1:
            raise ValueError("need at least one site")
        self.rep = rep
        self.L = L
        self.conv = c
        self.states = list(itertools.product(range(rep.dim), repeat=L))
        self.index = {s: k for k, s in enumerate(self.states)}
        n = rep.rd.rank
        self._kexp = [[rep.k_exponent(i, v) for v in range(rep.dim)] for i in range(n)]
        self._word_cache: dict[tuple, dict] = {}

    @property
    def size(self) -> int:
        return len(self.states)

    def weight(self, state) -> tuple[int, ...]:
        w = [0] * len(self.rep.weights[0])
        for v in state:
            for k, x in enumerate(self.rep.weights[v]):
                w[k] += x
        return tuple(w)

    def _gen(self, kind: str, i: int, state) -> list[tuple[tuple, int]]:
        """Image of a product state: list of (new state, q exponent)."""
        table = (self.rep.E if kind == "E" else self.rep.F)[i]
        kx = self._kexp[i]
        std = self.conv.coproduct == "standard"
        out = []
        L = self.L
        for s in range(L):
            v = state[s]
            if v not in table:
                continue
            if kind == "E":
                # standard: K_i on the sites left of s ; flipped: on the sites right of s
                rng = range(s) if std else range(s + 1, L)
                e = sum(kx[state[t]] for t in rng)
            else:
                # standard: K_i^-1 on the sites right of s ; flipped: left
                rng = range(s + 1, L) if std else range(s)
                e = -sum(kx[state[t]] for t in rng)
            new = state[:s] + (table[v],) + state[s + 1:]
            out.append((new, e))
        return out

    def word_action(self, kind: str, word: tuple, state) -> dict:
        """X_{w1} ... X_{wm} applied to a basis state: {state: Laurent dict}."""
        key = (kind, word, state)
        hit = self._word_cache.get(key)
        if hit is not None:
            return hit
        if not word:
            res = {state: {0: 1}}
        else:
            inner = self.word_action(kind, word[1:], state)
            res: dict = {}
            for st, lp in inner.items():
                for new, e in self._gen(kind, word[0], st):
                    acc = res.setdefault(new, {})
                    for ex, c in lp.items():
                        acc[ex + e] = acc.get(ex + e, 0) + c
            res = {s: {e: c for e, c in lp.items() if c} for s, lp in res.items()}
            res = {s: lp for s, lp in res.items() if lp}
        self._word_cache[key] = res
        return res

    def k_value(self, kexp, state) -> int:
        w = self.weight(state)
        return sum(a * b for a, b in zip(kexp, w))

    def element_matrix(self, x: AlgebraElement) -> SparseMatrix:
        """The matrix of ``x`` on V^{(x)L}, exact over Q(q)."""
        n = self.size
        cols: dict[int, dict[int, dict]] = {}
        # group by (E-word, K) so E actions are shared
        acc: dict[tuple[int, int], QRat] = defaultdict(lambda: ZERO)
        grouped: dict[tuple, dict] = defaultdict(dict)
        for (f, k, e), c in x.terms.items():
            grouped[(e, k)][f] = c
        for s_idx, state in enumerate(self.states):
            for (e, k), fterms in grouped.items():
                mid = self.word_action("E", e, state)
                if not mid:
                    continue
                for st, lp in mid.items():
                    kv = self.k_value(k, st)
                    for f, c in fterms.items():
                        out = self.word_action("F", f, st)
                        for st2, lp2 in out.items():
                            poly: dict[int, int] = {}
                            for e1, c1 in lp.items():
                                for e2, c2 in lp2.items():
                                    ex = e1 + e2 + kv
                                    poly[ex] = poly.get(ex, 0) + c1 * c2
                            val = QRat.laurent(poly)
                            if val:
                                key = (self.index[st2], s_idx)
                                acc[key] = acc[key] + c * val
        m = SparseMatrix(n, n)
        for (r, col), v in acc.items():
            m.set(r, col, v)
        return m

    def generator_matrix(self, kind: str, i: int) -> SparseMatrix:
        rd = self.rep.rd
        zero = (0,) * rd.eps.shape[0]
        if kind == "E":
            x = AlgebraElement({((), zero, (i,)): ONE})
        elif kind == "F":
            x = AlgebraElement({((i,), zero, ()): ONE})
        else:
            x = AlgebraElement.generator(rd, "K", i)
        return self.element_matrix(x)


def coproduct_power(rep: Representation, x: AlgebraElement, L: int, c: Convention = Convention()) -> SparseMatrix:
    return TensorPower(rep, L, c).element_matrix(x)


@dataclass
class Hamiltonian:
    sites: int
    matrix: SparseMatrix
    states: list
    labels: list
    source: str = ""

    def to_json(self) -> dict:
        return {
            "sites": self.sites,
            "size": self.matrix.nrows,
            "states": self.labels,
            "source": self.source,
            "entries": [[i, j, str(v)] for i, r in sorted(self.matrix.rows.items()) for j, v in sorted(r.items())],
        }


def bond_sum(rep: Representation, x: AlgebraElement, L: int, c: Convention = Convention()) -> SparseMatrix:
    """``sum_b 1 (x) .. (x) D(x) (x) .. (x) 1`` with the two-site image on bond (b, b+1).

    When ``x`` is central this commutes with the L-fold coproduct of every
    generator (coassociativity), and it only couples neighbouring sites.
    """
    if L < 2:
        return TensorPower(rep, 1, c).element_matrix(x)
    two = TensorPower(rep, 2, c)
    local = two.element_matrix(x)
    d = rep.dim
    tp = TensorPower(rep, L, c)
    acc: dict[tuple[int, int], QRat] = {}
    for col, state in enumerate(tp.states):
        for b in range(L - 1):
            j = state[b] * d + state[b + 1]
            for i_loc, r in local.rows.items():
                v = r.get(j)
                if v is None:
                    continue
                new = state[:b] + divmod(i_loc, d) + state[b + 2:]
                key = (tp.index[new], col)
                acc[key] = acc.get(key, ZERO) + v
    m = SparseMatrix(tp.size, tp.size)
    for (i, j), v in acc.items():
        m.set(i, j, v)
    return m


def hamiltonian(rep: Representation, x: AlgebraElement, L: int, c: Convention = Convention(), source: str = "",
                kind: str = "bond") -> Hamiltonian:
    """Image of ``x`` on L sites: ``bond`` (nearest-neighbour sum) or ``full`` (L-fold coproduct)."""
    if hasattr(x, "element"):
        x = x.element
    tp = TensorPower(rep, L, c)
    labels = ["".join(rep.labels[v] if len(rep.labels[v]) == 1 else f"[{rep.labels[v]}]" for v in s) for s in tp.states]
    if kind == "bond":
        m = bond_sum(rep, x, L, c)
    elif kind == "full":
        m = tp.element_matrix(x)
    else:
        raise ValueError(f"unknown Hamiltonian kind {kind!r}")
    return Hamiltonian(L, m, tp.states, labels, source)


def _commutator_witness(a: SparseMatrix, b: SparseMatrix, evaluate=None):
    ab = a @ b
    ba = b @ a
    keys = set()
    for i, r in ab.rows.items():
        keys.update((i, j) for j in r)
    for i, r in ba.rows.items():
        keys.update((i, j) for j in r)
    for i, j in sorted(keys):
        x = ab[i, j]
        y = ba[i, j]
        if evaluate is None:
            d = (x if x is not None else ZERO) - (y if y is not None else ZERO)
        else:
            d = (x if x is not None else 0) - (y if y is not None else 0)
        if d:
            return (i, j, str(d))
    return None


@dataclass
class Verdict:
    passed: bool
    mode: str
    sites: int
    checked: list
    witness: tuple | None = None
    generator: str | None = None

    def to_json(self):
        return {
            "passed": self.passed,
            "mode": self.mode,
            "sites": self.sites,
            "checked": self.checked,
            "generator": self.generator,
            "witness": list(self.witness) if self.witness else None,
        }


def commutes_with_generators(
    H: SparseMatrix,
    rep: Representation,
    L: int,
    mode: str = "symbolic",
    samples: Sequence = (Fraction(4, 5), Fraction(5, 3)),
    c: Convention = Convention(),
    raise_on_fail: bool = True,
) -> Verdict:
    """Check [H, D^L(g)] = 0 for every generator g in {K_i, E_i, F_i}.

    ``symbolic`` demands exact zero over Q(q); ``sampled`` evaluates every
    entry at each exact rational sample first.
    """
    tp = TensorPower(rep, L, c)
    gens = []
    for i in range(rep.rd.rank):
        for kind in ("E", "F", "K"):
            gens.append((f"{kind}{i + 1}", tp.generator_matrix(kind, i)))
    # weight check (K) first: it is the cheapest and most telling failure
    gens.sort(key=lambda g: g[0][0] != "K")
    checked = []
    if mode == "symbolic":
        for name, g in gens:
            w = _commutator_witness(H, g)
            checked.append(name)
            if w is not None:
                if raise_on_fail:
                    raise NotCentral(name, w)
                return Verdict(False, mode, L, checked, w, name)
        return Verdict(True, mode, L, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    for q0 in samples:
        q0 = Fraction(q0)
        Hq = H.map(lambda v: eval_at(v, q0))
        for name, g in gens:
            gq = g.map(lambda v: eval_at(v, q0))
            w = _commutator_witness(Hq, gq, evaluate=True)
            checked.append(f"{name}@{q0}")
            if w is not None:
                if raise_on_fail:
                    raise NotCentral(f"{name} at q={q0}", w)
                return Verdict(False, mode, L, checked, w, f"{name}@{q0}")
    return Verdict(True, mode, L, checked)


def verify_central(
    element,
    rep: Representation,
    L: int,
    mode: str = "symbolic",
    samples: Sequence = (Fraction(4, 5), Fraction(5, 3)),
    c: Convention = Convention(),
    raise_on_fail: bool = True,
) -> Verdict:
    """Centrality on V^{(x)L}: the L-fold coproduct image must commute with every generator."""
    if hasattr(element, "element"):
        element = element.element
    H = TensorPower(rep, L, c).element_matrix(element)
    return commutes_with_generators(H, rep, L, mode, samples, c, raise_on_fail)
