import json
import random
from fractions import Fraction

import pytest
import sympy

from qcentral.cartan import CartanType, build_root_data
from qcentral.central import (
    CentralElement,
    CutoffIncomplete,
    _matrix_coeff,
    _pairs,
    assemble_central,
    central_for,
    coefficient_report,
    required_weights,
)
from qcentral.linalg import SparseMatrix, solve
from qcentral.qsym import ONE, ZERO, Q, QRat, eval_at, qpow
from qcentral.rep import TensorPower, vector_rep, verify_central
from qcentral.uqalg import AlgebraElement, Convention, standard_words, word_pairing, word_weight


def test_a1_is_the_textbook_casimir():
    ce = central_for("A", 1)
    qq = Q - Q.inverse()
    assert ce.element.terms == {
        ((), (2, 0), ()): Q,
        ((), (0, 2), ()): qpow(-1),
        ((0,), (1, 1), (0,)): qq * qq,
    }


@pytest.mark.parametrize("fam,rank", [("A", 1), ("A", 2), ("A", 3), ("D", 4)])
def test_zero_weight_and_k_part(fam, rank):
    ce = central_for(fam, rank)
    assert ce.zero_weight_balanced()
    rd = build_root_data(CartanType(fam, rank))
    rep = vector_rep(CartanType(fam, rank))
    rho2 = rd.rho2_eps()
    k_part = {k: c for (f, k, e), c in ce.element.terms.items() if not f and not e}
    expected = {}
    for w in rep.weights:
        expected[tuple(2 * x for x in w)] = qpow(sum(a * b for a, b in zip(rho2, w)))
    assert k_part == expected


def test_deterministic():
    a = central_for("A", 3).to_json()
    b = central_for("A", 3).to_json()
    assert a["terms"] == b["terms"]


def test_json_round_trip():
    ce = central_for("A", 2, Convention("alt", "flipped"))
    back = CentralElement.from_json(json.loads(json.dumps(ce.to_json())))
    assert back.element == ce.element
    assert back.convention == ce.convention
    assert back.type_rank == ce.type_rank


def test_missing_block_is_reported():
    rd = build_root_data(CartanType("A", 2))
    rep = vector_rep(CartanType("A", 2))
    with pytest.raises(CutoffIncomplete):
        assemble_central(rd, rep, blocks={})


def test_required_weights_a2():
    rd = build_root_data(CartanType("A", 2))
    assert required_weights(rd, vector_rep(CartanType("A", 2))) == [(0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize("fam,rank,L", [("A", 1, 2), ("A", 2, 2), ("A", 3, 1)])
def test_central(fam, rank, L):
    ce = central_for(fam, rank)
    assert verify_central(ce, vector_rep(CartanType(fam, rank)), L).passed


def test_parallel_blocks_match_serial():
    a = central_for("D", 4, jobs=1)
    b = central_for("D", 4, jobs=2)
    assert a.element == b.element


def test_report_examples():
    rd = build_root_data(CartanType("A", 1))
    ident = coefficient_report(AlgebraElement.identity(rd))
    assert (ident["terms"], ident["max_coeff"], ident["degree_spread"]) == (1, 1, 0)
    ce = central_for("A", 1)
    r = coefficient_report(ce)
    assert r["max_coeff"] <= 4
    scaled = coefficient_report(ce.element.scale(QRat(10**6)))
    assert scaled["max_coeff"] == r["max_coeff"] * 10**6


# --- independent calibration of the assembly scalars -------------------------

def _pieces(rd, rep):
    """Per basis pair the unscaled piece Y_ab K X_ba, via a dense Gram solve."""
    out = {}
    for a, b, mu in _pairs(rd, rep):
        k = tuple(x + y for x, y in zip(rep.weights[a], rep.weights[b]))
        if not any(mu):
            out[(a, b)] = AlgebraElement({((), k, ()): ONE})
            continue
        S = standard_words(rd, mu)
        G = SparseMatrix.from_rows([[word_pairing(rd, s, u) for u in S] for s in S])
        y = solve(G, [QRat(_matrix_coeff(rep, "E", w, a, b)) for w in S], ZERO)
        x = solve(G, [QRat(_matrix_coeff(rep, "F", w, b, a)) for w in S], ZERO)
        out[(a, b)] = AlgebraElement({(S[m], k, S[n]): ym * xn for m, ym in enumerate(y)
                                      for n, xn in enumerate(x) if ym and xn})
    return out


@pytest.mark.parametrize("fam,rank,q0", [("A", 2, 2), ("A", 2, 3), ("A", 3, 2)])
def test_scalars_are_the_unique_solution(fam, rank, q0):
    """Solve [sum_ab s_ab piece_ab, g] = 0 for free scalars s_ab at a numeric q."""
    t = CartanType(fam, rank)
    rd, rep = build_root_data(t), vector_rep(t)
    pieces = _pieces(rd, rep)
    keys = sorted(pieces)
    tp = TensorPower(rep, 2)
    q0 = Fraction(q0)
    gens = [tp.generator_matrix(k, i).map(lambda v: eval_at(v, q0)) for i in range(rd.rank) for k in "EFK"]
    cols = []
    for key in keys:
        H = tp.element_matrix(pieces[key]).map(lambda v: eval_at(v, q0))
        col = []
        for g in gens:
            d1, d2 = (H @ g).to_dense(0), (g @ H).to_dense(0)
            col += [d1[i][j] - d2[i][j] for i in range(tp.size) for j in range(tp.size)]
        cols.append(col)
    rows = [r for r in zip(*cols) if any(r)]
    random.Random(0).shuffle(rows)
    ns = sympy.Matrix(rows[:400]).nullspace()
    assert len(ns) == 1
    v = ns[0] / ns[0][keys.index((0, 0))]
    rho2 = rd.rho2_eps()
    ref = None
    for key, s in zip(keys, v):
        a, b = key
        mu = [x - y for x, y in zip(rep.weights[a], rep.weights[b])]
        e = sum(x * y for x, y in zip(rho2, rep.weights[b])) - sum(x * x for x in mu) // 2
        val = sympy.Rational(q0.numerator, q0.denominator) ** e
        ref = ref or val / s
        assert val / s == ref


def test_mutation_is_caught():
    ce = central_for("A", 2)
    key = sorted(ce.element.terms)[5]
    ce.element.terms[key] = ce.element.terms[key] * (ONE + qpow(-2))
    rep = vector_rep(CartanType("A", 2))
    assert not verify_central(ce, rep, 2, raise_on_fail=False).passed
    assert not verify_central(ce, rep, 2, mode="sampled", raise_on_fail=False).passed
