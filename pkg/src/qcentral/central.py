"""Assembly of the representation-trace central element.

For a finite-dimensional weight module V with weight basis (b) the element is

    C = sum_{a, b : mu = wt a - wt b >= 0}
            q^{(2 rho, wt b) - (mu, mu)/2} * Y_ab * K_{wt a + wt b} * E(X_ba)

where ``Y_ab`` is the element of U^-_mu dual (under the pairing) to the
functional ``w -> <a| E_w |b>`` and ``X_ba`` the one dual to
``w -> <b| F_w |a>``; ``E(.)`` replaces every letter F_i by E_i keeping the
order.  Both are obtained as ``G^{-1} r`` with the word Gram matrix
``G = B^T M B`` inverted through the sparse B^{-1}.

The scalar exponents were fixed by solving the commutator constraints for
one free scalar per basis pair; the solution space is one-dimensional for
A_1..A_3 and D_4 and this closed form fits all of them.  Centrality is not
asserted here: :func:`qcentral.rep.verify_central` is the judge.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cartan import CartanType, RootData, build_root_data
from .pbw import WeightBlock, build_weight_block, gram_inverse_apply
from .qsym import ONE, ZERO, QRat, parse_qrat, qpow
from .rep import Representation, vector_rep
from .uqalg import AlgebraElement, Convention, word_weight

__all__ = [
    "CentralElement",
    "CutoffIncomplete",
    "required_weights",
    "assemble_central",
    "central_for",
    "coefficient_report",
]

log = logging.getLogger(__name__)


class CutoffIncomplete(KeyError):
    pass


@dataclass
class CentralElement:
    element: AlgebraElement
    type_rank: CartanType
    convention: Convention
    weight_cutoff: dict
    provenance: dict = field(default_factory=dict)

    @property
    def rd(self) -> RootData:
        return build_root_data(self.type_rank)

    def zero_weight_balanced(self) -> bool:
        n = self.type_rank.rank
        return all(word_weight(f, n) == word_weight(e, n) for f, _, e in self.element.terms)

    def to_json(self) -> dict:
        terms = [
            {"f_word": list(f), "k_exp": list(k), "e_word": list(e), "coeff": str(c)}
            for (f, k, e), c in sorted(self.element.terms.items(), key=lambda t: (len(t[0][0]), t[0]))
        ]
        return {
            "type": self.type_rank.family,
            "rank": self.type_rank.rank,
            "convention": self.convention.to_json(),
            "weight_cutoff": self.weight_cutoff,
            "terms": terms,
            "stats": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CentralElement":
        t = CartanType(data["type"], int(data["rank"]))
        conv = data.get("convention", {})
        c = Convention(braid=conv.get("braid", "primary"), coproduct=conv.get("coproduct", "standard"))
        terms = {}
        for term in data["terms"]:
            key = (tuple(term["f_word"]), tuple(term["k_exp"]), tuple(term["e_word"]))
            terms[key] = parse_qrat(term["coeff"])
        return cls(AlgebraElement(terms), t, c, data.get("weight_cutoff", {}), data.get("stats", {}))


def _root_coords(rd: RootData, d) -> tuple[int, ...] | None:
    """Express an epsilon-coordinate vector in simple roots, or None."""
    sol, *_ = np.linalg.lstsq(rd.eps.astype(float), np.asarray(d, dtype=float), rcond=None)
    r = tuple(int(round(x)) for x in sol)
    if tuple(int(x) for x in rd.eps @ np.asarray(r)) != tuple(d):
        return None
    return r


def _pairs(rd: RootData, rep: Representation):
    out = []
    for a in range(rep.dim):
        for b in range(rep.dim):
            d = tuple(x - y for x, y in zip(rep.weights[a], rep.weights[b]))
            mu = _root_coords(rd, d)
            if mu is not None and min(mu) >= 0:
                out.append((a, b, mu))
    return out


def required_weights(rd: RootData, rep: Representation) -> list[tuple[int, ...]]:
    """Positive-cone differences of representation weights (the weight cutoff)."""
    return sorted({mu for _, _, mu in _pairs(rd, rep) if any(mu)}, key=lambda m: (sum(m), m))


def _matrix_coeff(rep: Representation, kind: str, word, a: int, b: int) -> int:
    """<a| X_{w1} ... X_{wm} |b> in a module with 0/1 generator matrices."""
    table = rep.E if kind == "E" else rep.F
    v = b
    for i in reversed(word):
        v = table[i].get(v)
        if v is None:
            return 0
    return 1 if v == a else 0


def _block_job(args):
    t, mu, c = args
    wb = build_weight_block(build_root_data(t), mu, c)
    wb.rd = None
    return wb


def build_blocks(rd: RootData, weights, c: Convention, jobs: int = 1) -> dict:
    weights = list(weights)
    if jobs > 1 and len(weights) > 1:
        # largest blocks first so the pool stays busy
        order = sorted(weights, key=lambda m: -sum(m))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            res = list(ex.map(_block_job, [(rd.ctype, mu, c) for mu in order]))
        for wb in res:
            wb.rd = rd
        return {wb.weight: wb for wb in res}
    return {mu: build_weight_block(rd, mu, c) for mu in weights}


def assemble_central(
    rd: RootData,
    rep: Representation,
    c: Convention = Convention(),
    blocks: dict | None = None,
    jobs: int = 1,
) -> CentralElement:
    t0 = time.perf_counter()
    needed = required_weights(rd, rep)
    if blocks is None:
        blocks = build_blocks(rd, needed, c, jobs)
    missing = [mu for mu in needed if mu not in blocks]
    if missing:
        raise CutoffIncomplete(f"missing weight blocks {missing}")
    t_blocks = time.perf_counter() - t0
    rho2 = rd.rho2_eps()
    terms: dict = {}
    for a, b, mu in _pairs(rd, rep):
        wa, wb_ = rep.weights[a], rep.weights[b]
        kexp = tuple(x + y for x, y in zip(wa, wb_))
        mu_eps = tuple(x - y for x, y in zip(wa, wb_))
        expo = sum(x * y for x, y in zip(rho2, wb_)) - sum(x * x for x in mu_eps) // 2
        scal = qpow(expo)
        if not any(mu):
            key = ((), kexp, ())
            terms[key] = terms.get(key, ZERO) + scal
            continue
        block: WeightBlock = blocks[mu]
        words = block.monomials
        r = [ONE if _matrix_coeff(rep, "E", w, a, b) else ZERO for w in words]
        rp = [ONE if _matrix_coeff(rep, "F", w, b, a) else ZERO for w in words]
        if not any(r) or not any(rp):
            continue
        y = gram_inverse_apply(block, r)
        x = gram_inverse_apply(block, rp)
        ys = [(words[m], v * scal) for m, v in enumerate(y) if v]
        xs = [(words[m], v) for m, v in enumerate(x) if v]
        for fw, yv in ys:
            for ew, xv in xs:
                key = (fw, kexp, ew)
                val = terms.get(key, ZERO) + yv * xv
                if val:
                    terms[key] = val
                else:
                    terms.pop(key, None)
    elem = AlgebraElement()
    elem.terms = terms
    elapsed = time.perf_counter() - t0
    stats = {
        "blocks": [blocks[mu].stats_line() for mu in needed],
        "largest_block": max((blocks[mu].dimension for mu in needed), default=0),
        "term_count": len(terms),
        "elapsed_blocks_s": round(t_blocks, 3),
        "elapsed_total_s": round(elapsed, 3),
    }
    cutoff = {
        "representation": "vector",
        "dimension": rep.dim,
        "weights": [list(mu) for mu in needed],
    }
    ce = CentralElement(elem, rd.ctype, c, cutoff, stats)
    if not ce.zero_weight_balanced():
        raise AssertionError("assembled element has a term of nonzero total weight")
    return ce


def central_for(family: str, rank: int, c: Convention = Convention(), jobs: int = 1) -> CentralElement:
    """Central element built from the vector representation of the given type."""
    t = CartanType(family, rank)
    return assemble_central(build_root_data(t), vector_rep(t), c, jobs=jobs)


def coefficient_report(ce) -> dict:
    """Size statistics of the coefficients.

    ``complexity = log10(max_coeff) + max_degree_spread / 4 + log10(terms)``;
    a sanity number for humans, not a correctness check.
    """
    elem = ce.element if isinstance(ce, CentralElement) else ce
    coeffs = list(elem.terms.values())
    if not coeffs:
        return {"terms": 0, "max_coeff": 0, "degree_spread": 0, "laurent_fraction": 1.0, "complexity": 0.0}
    max_coeff = max(x.max_abs_coeff() for x in coeffs)
    spread = max(x.degree_spread() for x in coeffs)
    laurent = sum(1 for x in coeffs if x.is_laurent()) / len(coeffs)
    score = math.log10(max_coeff) + spread / 4 + math.log10(len(coeffs))
    return {
        "terms": len(coeffs),
        "max_coeff": max_coeff,
        "degree_spread": spread,
        "laurent_fraction": round(laurent, 4),
        "complexity": round(score, 3),
    }
