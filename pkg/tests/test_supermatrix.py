"""Supermatrix products, block determinants, and the superdeterminant."""

import random
from fractions import Fraction

import pytest

from superint.algebra import GrassmannElement as G
from superint.casegen import rand_even_matrix, rand_supermatrix
from superint.errors import BodySingularError, DimensionError, ParityError, ZeroBodyError
from superint.supermatrix import (
    EvenSuperMatrix,
    even_det,
    even_matrix_inverse,
    mat_mul,
    sdet,
    sm_inverse,
    sm_mul,
)

LEVEL = 6


def s(*indices):
    return G.monomial(1, indices, LEVEL)


def one():
    return G.scalar(1, LEVEL)


def test_identity_absorbs():
    rng = random.Random(7)
    q = rand_supermatrix(rng, 1, 2, LEVEL)
    eye = EvenSuperMatrix.identity(1, 2, LEVEL)
    assert sm_mul(eye, q) == q
    assert sm_mul(q, eye) == q


def test_product_associative():
    rng = random.Random(11)
    p = rand_supermatrix(rng, 1, 2, LEVEL)
    q = rand_supermatrix(rng, 1, 2, LEVEL)
    r = rand_supermatrix(rng, 1, 2, LEVEL)
    assert sm_mul(sm_mul(p, q), r) == sm_mul(p, sm_mul(q, r))


def test_dimension_mismatch():
    rng = random.Random(3)
    with pytest.raises(DimensionError):
        sm_mul(rand_supermatrix(rng, 1, 2, LEVEL), rand_supermatrix(rng, 2, 1, LEVEL))


def test_block_parity_enforced():
    with pytest.raises(ParityError):
        EvenSuperMatrix(a=((s(1),),), c=((),), d=((),), b=())


def test_even_det_identity():
    eye = tuple(tuple(one() if i == j else G.zero(LEVEL) for j in range(3)) for i in range(3))
    assert even_det(eye) == one()


def test_even_det_one_by_one():
    entry = 1 + s(1, 2) * Fraction(5, 3)
    assert even_det(((entry,),)) == entry


def test_even_det_multiply_back_oracle():
    rng = random.Random(23)
    e = rand_even_matrix(rng, 3, LEVEL)
    inv = even_matrix_inverse(e)
    assert even_det(e) * even_det(inv) == one()
    prod = mat_mul(e, inv)
    for i in range(3):
        for j in range(3):
            assert prod[i][j] == (one() if i == j else G.zero(LEVEL))


def test_even_det_elimination_matches_leibniz():
    from superint.supermatrix import _det_eliminate, _det_leibniz

    rng = random.Random(5)
    e = rand_even_matrix(rng, 4, LEVEL)
    assert _det_eliminate(e) == _det_leibniz(e)


def test_sdet_identity():
    assert sdet(EvenSuperMatrix.identity(2, 2, LEVEL)) == one()


def test_sdet_block_diagonal_collapses():
    rng = random.Random(17)
    a = rand_even_matrix(rng, 2, LEVEL)
    b = rand_even_matrix(rng, 2, LEVEL)
    zero_block = tuple(tuple(G.zero(LEVEL) for _ in range(2)) for _ in range(2))
    m = EvenSuperMatrix(a, zero_block, zero_block, b)
    assert sdet(m) == even_det(a) * even_det(b).inverse_even()


@pytest.mark.parametrize("dims", [(1, 2), (2, 2)])
def test_sdet_formula_agreement(dims):
    rng = random.Random(29)
    from superint.supermatrix import _sdet_via_a, _sdet_via_b

    for _ in range(10):
        m = rand_supermatrix(rng, *dims, LEVEL)
        assert _sdet_via_a(m) == _sdet_via_b(m)


@pytest.mark.parametrize("dims", [(1, 2), (2, 2)])
def test_sdet_multiplicative(dims):
    rng = random.Random(31)
    for _ in range(10):
        p = rand_supermatrix(rng, *dims, LEVEL)
        q = rand_supermatrix(rng, *dims, LEVEL)
        assert sdet(sm_mul(p, q)) == sdet(p) * sdet(q)


def test_sdet_of_inverse():
    rng = random.Random(37)
    m = rand_supermatrix(rng, 2, 2, LEVEL)
    assert sdet(sm_inverse(m)) == sdet(m).inverse_even()


def test_sm_inverse_round_trip():
    rng = random.Random(41)
    for _ in range(5):
        m = rand_supermatrix(rng, 2, 2, LEVEL)
        inv = sm_inverse(m)
        assert sm_mul(m, inv) == EvenSuperMatrix.identity(2, 2, LEVEL)
        assert sm_mul(inv, m) == EvenSuperMatrix.identity(2, 2, LEVEL)


def test_sdet_body_singular_raises():
    nil = s(1, 2)
    zero = G.zero(LEVEL)
    m = EvenSuperMatrix(a=((nil,),), c=((zero, zero),), d=((zero,), (zero,)),
                        b=((nil, zero), (zero, nil)))
    with pytest.raises(BodySingularError):
        sdet(m)


def test_pure_even_matrix_is_plain_determinant():
    rng = random.Random(43)
    a = rand_even_matrix(rng, 2, LEVEL)
    m = EvenSuperMatrix(a=a, c=((),) * 2, d=(), b=())
    assert sdet(m) == even_det(a)


def test_sm_inverse_rejects_body_singular():
    nil = s(1, 2)
    zero = G.zero(LEVEL)
    m = EvenSuperMatrix(a=((nil,),), c=((zero, zero),), d=((zero,), (zero,)),
                        b=((one(), zero), (zero, one())))
    with pytest.raises(ZeroBodyError):
        sm_inverse(m)
