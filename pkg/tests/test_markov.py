import warnings
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qcentral.cartan import CartanType
from qcentral.central import central_for
from qcentral.linalg import SparseMatrix
from qcentral.markov import (
    DimensionMismatch,
    DiscardLeakage,
    MarkovGenerator,
    NoGroundState,
    ZeroSupport,
    check_duality,
    flag_problematic,
    ground_transform,
    simulate,
)
from qcentral.qsym import ONE, ZERO, Q, QRat, qpow
from qcentral.rep import hamiltonian, vector_rep

Fr = Fraction


def a1_generator(L):
    ce = central_for("A", 1)
    return ground_transform(hamiltonian(vector_rep(CartanType("A", 1)), ce, L))


def test_scalar_hamiltonian_gives_zero_generator():
    H = SparseMatrix.identity(4, QRat(3))
    G = ground_transform(H)
    assert G.rates.nnz() == 0 and G.size == 4


def test_non_eigenvector_raises():
    H = SparseMatrix.from_rows([[ONE, ONE], [ONE, ONE]])
    with pytest.raises(NoGroundState):
        ground_transform(H)


def test_zero_support_raises():
    # the only kernel direction of H - c is the highest state itself
    H = SparseMatrix.from_rows([[ZERO, ZERO], [ZERO, ONE]])
    with pytest.raises(ZeroSupport):
        ground_transform(H)


def test_a1_two_sites_against_sympy():
    G = a1_generator(2)
    moves = {(G.states[i], G.states[j]): v for i, j, v in G.transitions()}
    assert set(moves) == {("01", "10"), ("10", "01")}
    ratio = moves[("10", "01")] / moves[("01", "10")]
    assert ratio.is_laurent() and len(ratio.numerator_laurent()) == 1
    # brute force: build the 4x4 Hamiltonian in sympy and transform by hand
    q = sympy.symbols("q")
    H = hamiltonian(vector_rep(CartanType("A", 1)), central_for("A", 1), 2).matrix

    def to_sym(x):
        n = sum(int(c) * q**k for k, c in enumerate(x.num.coeffs()))
        d = sum(int(c) * q**k for k, c in enumerate(x.den.coeffs()))
        return n * q**x.shift / d

    Hs = sympy.Matrix(4, 4, lambda i, j: to_sym(H[i, j]) if H[i, j] is not None else 0)
    c = Hs[0, 0]
    ker = (Hs - c * sympy.eye(4)).nullspace()
    v = sum(ker, sympy.zeros(4, 1))
    D = sympy.diag(*v)
    Gs = sympy.simplify(D.inv() * (Hs - c * sympy.eye(4)) * D)
    for i in range(4):
        for j in range(4):
            mine = G.rates[i, j]
            assert sympy.simplify(Gs[i, j] - (to_sym(mine) if mine is not None else 0)) == 0


def test_a1_three_sites_rows_and_support():
    G = a1_generator(3)
    assert G.size == 8 and G.rows_sum_to_zero()
    for i, j, _ in G.transitions():
        a, b = G.states[i], G.states[j]
        diff = [k for k in range(3) if a[k] != b[k]]
        assert len(diff) == 2 and diff[1] == diff[0] + 1 and a[diff[0]] == b[diff[1]]


def test_shift_invariance():
    rep = vector_rep(CartanType("A", 1))
    H = hamiltonian(rep, central_for("A", 1), 3)
    G1 = ground_transform(H)
    shifted = SparseMatrix(H.matrix.nrows, H.matrix.ncols, {i: dict(r) for i, r in H.matrix.rows.items()})
    for i in range(shifted.nrows):
        shifted.set(i, i, (shifted[i, i] or ZERO) + QRat(7) * Q)
    G2 = ground_transform(shifted, H.labels)
    assert G1.rates.equals(G2.rates)


def test_exact_at_q0_matches_symbolic():
    G = a1_generator(3)
    rep = vector_rep(CartanType("A", 1))
    Gq = ground_transform(hamiltonian(rep, central_for("A", 1), 3), q0=Fr(4, 5))
    assert G.at(Fr(4, 5)).rates.equals(Gq.rates)


def test_no_discard_when_nonnegative():
    R = flag_problematic(a1_generator(3), Fr(4, 5))
    assert R.discarded == [] and R.size == 8
    assert all(v >= 0 for _, _, v in R.transitions())


def test_leakage_fixture():
    # state 0 feeds state 1, and state 1 has a negative rate
    m = SparseMatrix.from_rows([[Fr(-1), Fr(1)], [Fr(-1), Fr(1)]])
    with pytest.raises(DiscardLeakage):
        flag_problematic(MarkovGenerator(["a", "b"], m, q0=Fr(4, 5)))


def test_clean_discard_fixture():
    m = SparseMatrix.from_rows([[Fr(0), Fr(0), Fr(0)], [Fr(2), Fr(-2), Fr(0)], [Fr(-1), Fr(0), Fr(1)]])
    R = flag_problematic(MarkovGenerator(["a", "b", "c"], m, q0=Fr(4, 5)))
    assert R.discarded == ["c"] and R.states == ["a", "b"]


def test_d4_discard_terminates():
    rep = vector_rep(CartanType("D", 4))
    G = ground_transform(hamiltonian(rep, central_for("D", 4), 2))
    R = flag_problematic(G, Fr(4, 5))
    keep = set(R.states)
    assert R.rows_sum_to_zero()
    assert not keep & set(R.discarded)


def test_duality_identity_and_zero():
    G = a1_generator(2).at(Fr(4, 5))
    Gt = MarkovGenerator(G.states, G.rates.transpose(), q0=G.q0)
    eye = SparseMatrix.identity(4, Fr(1))
    assert check_duality(G, eye, Gt).passed
    assert not check_duality(G, eye, G).passed or G.rates.equals(G.rates.transpose())
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        v = check_duality(G, SparseMatrix(4, 4), G)
    assert v.passed and v.degenerate
    with pytest.raises(DimensionMismatch):
        check_duality(G, SparseMatrix(3, 4), G)


def test_generator_json_round_trip():
    G = a1_generator(2)
    assert MarkovGenerator.from_json(G.to_json()).rates.equals(G.rates)
    Gq = G.at(Fr(4, 5))
    back = MarkovGenerator.from_json(Gq.to_json())
    assert back.rates.equals(Gq.rates) and back.q0 == Fr(4, 5)


def test_zero_generator_has_no_events():
    G = MarkovGenerator(["0", "1"], SparseMatrix(2, 2), q0=Fr(1, 2))
    assert simulate(G, 100.0, seed=1).events == []


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_simulation_reproducible(seed):
    G = a1_generator(3).at(Fr(4, 5))
    a = simulate(G, 50.0, seed)
    b = simulate(G, 50.0, seed)
    assert a.events == b.events and a.heights == b.heights


def test_height_function_tracks_current():
    G = a1_generator(3).at(Fr(4, 5))
    tr = simulate(G, 200.0, seed=5, start="110")
    # heights are the cumulative left-to-right crossings per bond
    h = [0, 0]
    for t, a, b in tr.events:
        x, y = tr.states[a], tr.states[b]
        k = next(i for i in range(3) if x[i] != y[i])
        h[k] += 1 if x[k] == "1" else -1
    final = {}
    for t, bond, val in tr.heights:
        final[bond] = val
    assert [final.get(0, 0), final.get(1, 0)] == h
