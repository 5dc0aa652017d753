"""From a Hamiltonian to a continuous-time Markov generator, and sampling it.

The ground-state transform: let ``c`` be the eigenvalue of H on the
highest-weight product state and ``v`` a kernel vector of ``H - c`` with
maximal support; then ``G = D^{-1} (H - c) D`` with ``D = diag(v)`` has
``G 1 = 0``.  H preserves weight, so the kernel is computed separately on
each connected block of H.  Inside a block the kernel vector is fixed only
up to the choice inside the kernel; we take the sum of the reduced kernel
basis (free coordinate set to one), and if that cancels an entry we retry
with weights ``j**t``.

Rows with a negative off-diagonal rate at the sample point are
"problematic" and removed.  Removal is only legitimate when nothing flows
into them from a retained row, which is checked.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import SparseMatrix, nullspace
from .qsym import ONE, ZERO, QRat, eval_at, parse_qrat
from .rep import Hamiltonian

__all__ = [
    "MarkovGenerator",
    "NoGroundState",
    "ZeroSupport",
    "DiscardLeakage",
    "DimensionMismatch",
    "DualityVerdict",
    "Trajectory",
    "ground_transform",
    "flag_problematic",
    "check_duality",
    "simulate",
    "HEIGHT_CONVENTION",
    "three_sigma_ok",
]

HEIGHT_CONVENTION = (
    "height(b, t) = net number of particles (local state != 0) that crossed bond b "
    "(between sites b and b+1) from left to right up to time t; 0 at t = 0"
)


class NoGroundState(ArithmeticError):
    pass


class ZeroSupport(ArithmeticError):
    pass


class DiscardLeakage(AssertionError):
    def __init__(self, src, dst, rate):
        super().__init__(f"retained state {src} has rate {rate} into discarded state {dst}")
        self.pair = (src, dst)
        self.rate = rate


class DimensionMismatch(ValueError):
    pass


@dataclass
class MarkovGenerator:
    states: list[str]
    rates: SparseMatrix
    discarded: list[str] = field(default_factory=list)
    q0: Fraction | None = None
    eigenvalue: object = None

    @property
    def size(self) -> int:
        return len(self.states)

    def is_symbolic(self) -> bool:
        return any(isinstance(v, QRat) for r in self.rates.rows.values() for v in r.values())

    def row_sums(self) -> list:
        zero = ZERO if self.is_symbolic() else Fraction(0)
        out = []
        for i in range(self.size):
            acc = zero
            for v in self.rates.rows.get(i, {}).values():
                acc = acc + v
            out.append(acc)
        return out

    def rows_sum_to_zero(self) -> bool:
        return all(not s for s in self.row_sums())

    def at(self, q0) -> "MarkovGenerator":
        """Exact rational rates at ``q = q0``."""
        q0 = Fraction(q0)
        if not self.is_symbolic():
            return self
        r = self.rates.map(lambda v: eval_at(v, q0))
        ev = eval_at(self.eigenvalue, q0) if isinstance(self.eigenvalue, QRat) else self.eigenvalue
        return MarkovGenerator(list(self.states), r, list(self.discarded), q0, ev)

    def negative_offdiagonal(self) -> list[tuple[int, int]]:
        if self.is_symbolic():
            raise ValueError("evaluate at a sample point first")
        return [(i, j) for i, r in self.rates.rows.items() for j, v in r.items() if i != j and v < 0]

    def transitions(self) -> list[tuple[int, int, object]]:
        return [(i, j, v) for i, r in sorted(self.rates.rows.items()) for j, v in sorted(r.items()) if i != j]

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "q0": str(self.q0) if self.q0 is not None else None,
            "eigenvalue": str(self.eigenvalue) if self.eigenvalue is not None else None,
            "rates": [[i, j, str(v)] for i, r in sorted(self.rates.rows.items()) for j, v in sorted(r.items())],
            "discarded": list(self.discarded),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MarkovGenerator":
        q0 = Fraction(data["q0"]) if data.get("q0") else None
        n = len(data["states"])
        m = SparseMatrix(n, n)
        for i, j, s in data["rates"]:
            m.set(int(i), int(j), Fraction(s) if q0 is not None else parse_qrat(s))
        ev = data.get("eigenvalue")
        if ev is not None:
            ev = Fraction(ev) if q0 is not None else parse_qrat(ev)
        return cls(list(data["states"]), m, list(data.get("discarded", [])), q0, ev)


def _components(m: SparseMatrix) -> list[list[int]]:
    adj = defaultdict(set)
    for i, r in m.rows.items():
        for j in r:
            adj[i].add(j)
            adj[j].add(i)
    seen = set()
    comps = []
    for s in range(m.nrows):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def _kernel_vector(block: SparseMatrix, one, zero) -> list:
    basis = nullspace(block, one, zero)
    if not basis:
        return [zero] * block.ncols
    union = {k for b in basis for k, x in enumerate(b) if x}
    for t in range(0, 6):
        v = [zero] * block.ncols
        for j, b in enumerate(basis, start=1):
            w = one * (j ** t)
            for k, x in enumerate(b):
                if x:
                    v[k] = v[k] + w * x
        if {k for k, x in enumerate(v) if x} == union:
            return v
    raise ZeroSupport("could not find a kernel vector with maximal support")


def ground_transform(H: Hamiltonian | SparseMatrix, labels: Sequence[str] | None = None, hw_index: int = 0,
                     q0=None) -> MarkovGenerator:
    """``D^{-1} (H - c) D`` over Q(q), or over Q at ``q0`` when given."""
    if isinstance(H, Hamiltonian):
        labels = H.labels if labels is None else labels
        H = H.matrix
    n = H.nrows
    labels = list(labels) if labels is not None else [str(k) for k in range(n)]
    if q0 is not None:
        q0 = Fraction(q0)
        H = H.map(lambda v: eval_at(v, q0) if isinstance(v, QRat) else Fraction(v))
        one, zero = Fraction(1), Fraction(0)
    else:
        one, zero = ONE, ZERO
    col = {i: r[hw_index] for i, r in H.rows.items() if hw_index in r}
    if any(i != hw_index for i in col):
        raise NoGroundState("the highest-weight state is not an eigenvector of H")
    c = col.get(hw_index, zero)
    shifted = SparseMatrix(n, n, {i: dict(r) for i, r in H.rows.items()})
    for i in range(n):
        shifted.set(i, i, shifted.rows.get(i, {}).get(i, zero) - c)
    v = [zero] * n
    for comp in _components(shifted):
        pos = {s: k for k, s in enumerate(comp)}
        sub = SparseMatrix(len(comp), len(comp))
        for s in comp:
            for t, x in shifted.rows.get(s, {}).items():
                sub.set(pos[s], pos[t], x)
        kv = _kernel_vector(sub, one, zero)
        for s, x in zip(comp, kv):
            v[s] = x
    support = [i for i in range(n) if v[i]]
    if not [i for i in support if i != hw_index]:
        raise ZeroSupport("kernel vector vanishes off the highest-weight state")
    idx = {s: k for k, s in enumerate(support)}
    G = SparseMatrix(len(support), len(support))
    for s in support:
        inv = 1 / v[s] if not isinstance(v[s], QRat) else v[s].inverse()
        for t, x in shifted.rows.get(s, {}).items():
            if t in idx:
                G.set(idx[s], idx[t], inv * x * v[t])
            elif x:
                raise AssertionError("H - c maps the support of the kernel vector outside it")
    out = MarkovGenerator([labels[s] for s in support], G, [], q0, c)
    if not out.rows_sum_to_zero():
        raise AssertionError("ground-state transform produced a nonzero row sum")
    return out


def flag_problematic(G: MarkovGenerator, q0=None) -> MarkovGenerator:
    """Remove states whose row has a negative off-diagonal rate at ``q0``."""
    if q0 is None:
        q0 = G.q0 if G.q0 is not None else Fraction(4, 5)
    Gq = G.at(q0)
    bad = sorted({i for i, _ in Gq.negative_offdiagonal()})
    if not bad:
        return Gq
    bad_set = set(bad)
    keep = [i for i in range(Gq.size) if i not in bad_set]
    for i in keep:
        for j, x in Gq.rates.rows.get(i, {}).items():
            if j in bad_set and x:
                raise DiscardLeakage(Gq.states[i], Gq.states[j], x)
    pos = {s: k for k, s in enumerate(keep)}
    R = SparseMatrix(len(keep), len(keep))
    for i in keep:
        for j, x in Gq.rates.rows.get(i, {}).items():
            R.set(pos[i], pos[j], x)
    out = MarkovGenerator(
        [Gq.states[i] for i in keep], R, list(Gq.discarded) + [Gq.states[i] for i in bad], Gq.q0, Gq.eigenvalue
    )
    if not out.rows_sum_to_zero():
        raise AssertionError("retained block has a nonzero row sum")
    return out


@dataclass
class DualityVerdict:
    passed: bool
    witness: tuple | None = None
    degenerate: bool = False

    def to_json(self):
        return {"passed": self.passed, "witness": list(self.witness) if self.witness else None,
                "degenerate": self.degenerate}


def check_duality(G: MarkovGenerator, D: SparseMatrix, G_dual: MarkovGenerator) -> DualityVerdict:
    """Exact check of ``G D = D transpose(G_dual)``."""
    if D.nrows != G.size or D.ncols != G_dual.size:
        raise DimensionMismatch(f"D is {D.nrows}x{D.ncols}, generators have {G.size} and {G_dual.size} states")
    if D.nnz() == 0:
        warnings.warn("zero duality matrix: the identity holds trivially", stacklevel=2)
        return DualityVerdict(True, None, True)
    lhs = G.rates @ D
    rhs = D @ G_dual.rates.transpose()
    for i in range(D.nrows):
        a, b = lhs.rows.get(i, {}), rhs.rows.get(i, {})
        for j in sorted(set(a) | set(b)):
            x, y = a.get(j, 0), b.get(j, 0)
            if x != y:
                return DualityVerdict(False, (i, j, str(x - y)))
    return DualityVerdict(True)


# ---------------------------------------------------------------------------
# simulation


@dataclass
class Trajectory:
    states: list[str]
    start: int
    t_max: float
    events: list[tuple[float, int, int]]
    heights: list[tuple[float, int, int]]

    def occupation_times(self) -> np.ndarray:
        occ = np.zeros(len(self.states))
        t_prev, cur = 0.0, self.start
        for t, a, b in self.events:
            occ[cur] += t - t_prev
            t_prev, cur = t, b
        occ[cur] += self.t_max - t_prev
        return occ

    def jump_counts(self) -> dict[tuple[int, int], int]:
        out: dict = defaultdict(int)
        for _, a, b in self.events:
            out[(a, b)] += 1
        return dict(out)

    def events_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# start={self.states[self.start]} t_max={self.t_max}; one row per jump\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "from", "to"])
        for t, a, b in self.events:
            w.writerow([repr(t), self.states[a], self.states[b]])
        return buf.getvalue()

    def heights_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {HEIGHT_CONVENTION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "site", "height"])
        for t, b, h in self.heights:
            w.writerow([repr(t), b, h])
        return buf.getvalue()


def _site_occupation(label: str) -> list[int]:
    """Particle indicator per site: bracketed tokens are single sites."""
    sites = []
    k = 0
    while k < len(label):
        if label[k] == "[":
            end = label.index("]", k)
            tok = label[k + 1:end]
            k = end + 1
        else:
            tok = label[k]
            k += 1
        sites.append(0 if tok in ("0", "+1") else 1)
    return sites


def simulate(G: MarkovGenerator, t_max: float, seed: int, start: int | str | None = None) -> Trajectory:
    """Gillespie sampling; exponential holding times with rate ``-G[i][i]``."""
    if G.is_symbolic():
        raise ValueError("simulate needs rates at a sample point; call .at(q0) first")
    if G.negative_offdiagonal():
        raise ValueError("generator has negative off-diagonal rates; discard problematic states first")
    rng = np.random.default_rng(seed)
    n = G.size
    if start is None:
        cur = int(rng.integers(n))
    elif isinstance(start, str):
        cur = G.states.index(start)
    else:
        cur = int(start)
    first = cur
    out_rates = []
    for i in range(n):
        row = [(j, float(v)) for j, v in sorted(G.rates.rows.get(i, {}).items()) if j != i and v > 0]
        tot = sum(r for _, r in row)
        targets = [j for j, _ in row]
        probs = np.array([r for _, r in row]) / tot if tot > 0 else np.array([])
        out_rates.append((tot, targets, probs))
    occ = [_site_occupation(s) for s in G.states]
    L = len(occ[0]) if occ else 0
    height = [0] * max(L - 1, 0)
    events, heights = [], []
    t = 0.0
    while True:
        tot, targets, probs = out_rates[cur]
        if tot <= 0:
            break
        t += rng.exponential(1.0 / tot)
        if t > t_max:
            break
        nxt = targets[int(rng.choice(len(targets), p=probs))] if len(targets) > 1 else targets[0]
        events.append((t, cur, nxt))
        # current through bond b = -(change of particle count on sites 0..b)
        acc = 0
        for b in range(L - 1):
            acc += occ[nxt][b] - occ[cur][b]
            if acc:
                height[b] -= acc
                heights.append((t, b, height[b]))
        cur = nxt
    return Trajectory(list(G.states), first, float(t_max), events, heights)


def three_sigma_ok(count: int, rate: float, time_in_state: float) -> bool:
    """Poisson check: observed jump count against rate * holding time."""
    mean = rate * time_in_state
    return abs(count - mean) <= 3 * math.sqrt(max(mean, 1e-12))
