from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dshier.exact import (
    Poly1,
    RatMatrix,
    chevalley_decomposition,
    fmt_q,
    in_span,
    is_nilpotent_matrix,
    kernel_basis,
    minimal_polynomial,
    solve_linear,
    span_rank,
)

small = st.integers(-4, 4).map(Fraction)


def matrices(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(RatMatrix)


def test_fmt_q():
    assert fmt_q(Fraction(3, 2)) == "3/2"
    assert fmt_q(Fraction(-4, 2)) == "-2"


def test_kernel_of_rank_one():
    M = RatMatrix([[1, 2, 3], [2, 4, 6]])
    ker = kernel_basis(M)
    assert len(ker) == 2
    for v in ker:
        assert all(x == 0 for x in M.apply(v))


@given(matrices(3))
def test_rank_nullity(M):
    assert M.rank() + len(kernel_basis(M)) == 3


@given(matrices(3), st.lists(small, min_size=3, max_size=3))
def test_solve_linear_consistent(M, x):
    b = M.apply(x)
    y = solve_linear(M, b)
    assert y is not None
    assert M.apply(y) == b


def test_inverse_singular():
    with pytest.raises(ZeroDivisionError):
        RatMatrix([[1, 2], [2, 4]]).inverse()


@given(matrices(3))
def test_inverse_roundtrip(M):
    if M.rank() < 3:
        return
    assert (M @ M.inverse()).rows == RatMatrix.identity(3).rows


def test_span_helpers():
    vs = [(1, 0, 1), (0, 1, 1)]
    assert span_rank(vs, 3) == 2
    assert in_span((2, 3, 5), vs, 3)
    assert not in_span((0, 0, 1), vs, 3)


def test_minpoly_nilpotent_jordan_block():
    J = RatMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert minimal_polynomial(J).coeffs == Poly1([0, 0, 0, 1]).coeffs
    assert is_nilpotent_matrix(J)


def test_minpoly_companion():
    # x^3 - 2x has companion matrix below; its min poly is itself
    C = RatMatrix([[0, 0, 0], [1, 0, 2], [0, 1, 0]])
    assert minimal_polynomial(C).coeffs == Poly1([0, -2, 0, 1]).coeffs


@given(matrices(3))
def test_minpoly_annihilates(M):
    p = minimal_polynomial(M)
    assert p.eval_matrix(M).is_zero()


@given(matrices(3))
def test_chevalley_decomposition(M):
    S, N = chevalley_decomposition(M)
    assert (S @ N).rows == (N @ S).rows
    assert is_nilpotent_matrix(N)
    assert [[a + b for a, b in zip(r, t)] for r, t in zip(S.rows, N.rows)] == [list(r) for r in M.rows]
    # S is semisimple: its minimal polynomial is squarefree
    from dshier.exact import is_squarefree
    assert is_squarefree(minimal_polynomial(S))
