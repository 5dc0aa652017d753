from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcentral.cartan import CartanType, UnsupportedType
from qcentral.linalg import SparseMatrix
from qcentral.qsym import ONE, ZERO, Q, qpow
from qcentral.rep import (
    NotCentral,
    TensorPower,
    bond_sum,
    commutes_with_generators,
    coproduct_power,
    relation_self_test,
    vector_rep,
    verify_central,
)
from qcentral.uqalg import AlgebraElement, Convention


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    out = SparseMatrix(a.nrows * b.nrows, a.ncols * b.ncols)
    for i, r in a.rows.items():
        for j, x in r.items():
            for k, s in b.rows.items():
                for l, y in s.items():
                    out.set(i * b.nrows + k, j * b.ncols + l, x * y)
    return out


def add(a, b):
    out = SparseMatrix(a.nrows, a.ncols, {i: dict(r) for i, r in a.rows.items()})
    for i, r in b.rows.items():
        for j, v in r.items():
            out.set(i, j, (out[i, j] or ZERO) + v)
    return out


@pytest.mark.parametrize("fam,rank,dim", [("A", 1, 2), ("A", 2, 3), ("A", 3, 4), ("D", 3, 6), ("D", 4, 8), ("D", 6, 12)])
def test_vector_reps(fam, rank, dim):
    rep = vector_rep(CartanType(fam, rank))
    assert rep.dim == dim
    relation_self_test(rep)


def test_a1_matrices():
    rep = vector_rep(CartanType("A", 1))
    assert rep.matrix("E", 0).to_dense(ZERO) == [[ZERO, ONE], [ZERO, ZERO]]
    assert rep.matrix("F", 0).to_dense(ZERO) == [[ZERO, ZERO], [ONE, ZERO]]
    assert rep.matrix("K", 0).to_dense(ZERO) == [[Q, ZERO], [ZERO, qpow(-1)]]


def test_unsupported():
    with pytest.raises(UnsupportedType):
        vector_rep("E6")


@pytest.mark.parametrize("cop", ["standard", "flipped"])
def test_two_site_generators_against_kronecker(cop):
    rep = vector_rep(CartanType("A", 2))
    c = Convention(coproduct=cop)
    tp = TensorPower(rep, 2, c)
    I = SparseMatrix.identity(3, ONE)
    for i in range(2):
        E, F, K, Ki = (rep.matrix(k, i) for k in ("E", "F", "K", "Kinv"))
        if cop == "standard":
            e2 = add(kron(E, I), kron(K, E))
            f2 = add(kron(F, Ki), kron(I, F))
        else:
            e2 = add(kron(I, E), kron(E, K))
            f2 = add(kron(Ki, F), kron(F, I))
        assert tp.generator_matrix("E", i).equals(e2)
        assert tp.generator_matrix("F", i).equals(f2)
        assert tp.generator_matrix("K", i).equals(kron(K, K))


def test_single_site_is_plain_rep():
    rep = vector_rep(CartanType("D", 4))
    tp = TensorPower(rep, 1)
    for i in range(4):
        assert tp.generator_matrix("E", i).equals(rep.matrix("E", i))


@pytest.mark.parametrize("cop", ["standard", "flipped"])
def test_coassociativity_surrogate(cop):
    # three sites: grouping (12)3 vs 1(23) of the two-site action
    rep = vector_rep(CartanType("A", 1))
    c = Convention(coproduct=cop)
    t2, t3 = TensorPower(rep, 2, c), TensorPower(rep, 3, c)
    I = SparseMatrix.identity(2, ONE)
    K, E = rep.matrix("K", 0), rep.matrix("E", 0)
    e2 = t2.generator_matrix("E", 0)
    k2 = t2.generator_matrix("K", 0)
    if cop == "standard":
        left = add(kron(e2, I), kron(k2, E))
        right = add(kron(E, SparseMatrix.identity(4, ONE)), kron(K, e2))
    else:
        left = add(kron(SparseMatrix.identity(4, ONE), E), kron(e2, K))
        right = add(kron(I, e2), kron(E, k2))
    assert left.equals(right)
    assert left.equals(t3.generator_matrix("E", 0))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=0, max_size=3), st.lists(st.integers(0, 1), min_size=0, max_size=3),
       st.lists(st.integers(0, 1), min_size=0, max_size=3), st.lists(st.integers(0, 1), min_size=0, max_size=3))
def test_coproduct_multiplicative(f1, e1, f2, e2):
    rep = vector_rep(CartanType("A", 2))
    tp = TensorPower(rep, 2)
    z = (0, 0, 0)
    x = AlgebraElement({(tuple(f1), z, tuple(e1)): ONE})
    y = AlgebraElement({(tuple(f2), z, tuple(e2)): ONE})
    # product x*y as a matrix vs. matrices of the pieces
    m = tp.element_matrix(AlgebraElement({(tuple(f1), z, ()): ONE})) @ tp.element_matrix(
        AlgebraElement({((), z, tuple(e1)): ONE})) @ tp.element_matrix(
        AlgebraElement({(tuple(f2), z, ()): ONE})) @ tp.element_matrix(AlgebraElement({((), z, tuple(e2)): ONE}))
    assert (tp.element_matrix(x) @ tp.element_matrix(y)).equals(m)


def test_identity_is_central():
    for fam, rank in [("A", 1), ("D", 4)]:
        t = CartanType(fam, rank)
        rep = vector_rep(t)
        from qcentral.cartan import build_root_data

        assert verify_central(AlgebraElement.identity(build_root_data(t)), rep, 2).passed


def test_f1_is_not_central():
    from qcentral.cartan import build_root_data

    rd = build_root_data(CartanType("A", 1))
    with pytest.raises(NotCentral) as err:
        verify_central(AlgebraElement.generator(rd, "F", 0), vector_rep(CartanType("A", 1)), 1)
    v = verify_central(AlgebraElement.generator(rd, "F", 0), vector_rep(CartanType("A", 1)), 1, raise_on_fail=False)
    assert not v.passed and v.witness is not None
    assert v.generator == "K1"
    assert err.value.generator == "K1"


def test_bond_sum_commutes():
    from qcentral.central import central_for

    for fam, rank, L in [("A", 1, 3), ("A", 2, 3), ("D", 4, 2)]:
        ce = central_for(fam, rank)
        rep = vector_rep(CartanType(fam, rank))
        H = bond_sum(rep, ce.element, L)
        assert commutes_with_generators(H, rep, L).passed
