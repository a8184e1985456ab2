from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preproj_hh.exactla import (ExactMatrix, FieldSpec, PreparedSolver,
                                UnsupportedCharacteristicError, rank_mod_p,
                                sparse_rank)

QQ = FieldSpec(0)
F5 = FieldSpec(5)


def test_field_validation():
    assert FieldSpec(0).characteristic == 0
    assert FieldSpec(3).characteristic == 3
    with pytest.raises(UnsupportedCharacteristicError, match="characteristic 2"):
        FieldSpec(2)
    with pytest.raises(UnsupportedCharacteristicError):
        FieldSpec(9)
    with pytest.raises(UnsupportedCharacteristicError):
        FieldSpec(-3)


def test_scalar_coercion():
    assert QQ(3) == Fraction(3)
    assert F5(7) == 2
    assert F5(Fraction(1, 2)) == 3  # 2 * 3 = 6 = 1 mod 5
    with pytest.raises(ZeroDivisionError):
        F5(Fraction(1, 5))


def test_echelonize_identity_and_zero():
    assert ExactMatrix.identity(QQ, 2).echelonize().rank == 2
    assert ExactMatrix.zero(QQ, 3, 4).echelonize().rank == 0


def test_rank_of_c_matrix_mod_5():
    # the multiplication-by-y matrix for two vertices drops to rank 1 when
    # the characteristic divides 2n+1 = 5
    m5 = ExactMatrix(F5, [[-2, 1], [1, -3]])
    assert m5.rank() == 1
    m0 = ExactMatrix(QQ, [[-2, 1], [1, -3]])
    assert m0.rank() == 2


def test_kernel_basis_examples():
    assert ExactMatrix.identity(QQ, 3).kernel_basis() == []
    kb = ExactMatrix.zero(QQ, 2, 2).kernel_basis()
    assert kb == [[1, 0], [0, 1]]
    kb = ExactMatrix(QQ, [[1, 1]]).kernel_basis()
    assert len(kb) == 1
    v = kb[0]
    assert v[0] == -v[1] != 0  # spans (1, -1)


def test_solve_examples():
    ident = ExactMatrix.identity(QQ, 2)
    assert ident.solve([3, 4]) == [3, 4]
    assert ExactMatrix.zero(QQ, 2, 2).solve([1, 0]) is None
    assert ExactMatrix(QQ, [[2]]).solve([1]) == [Fraction(1, 2)]


def test_solve_variable_order_gives_other_particular_solution():
    m = ExactMatrix(QQ, [[1, 1]])
    assert m.solve([2]) == [2, 0]
    assert m.solve([2], variable_order=[1, 0]) == [0, 2]


matrix_strategy = st.integers(min_value=1, max_value=5).flatmap(
    lambda nr: st.integers(min_value=1, max_value=5).flatmap(
        lambda nc: st.lists(
            st.lists(st.integers(min_value=-4, max_value=4),
                     min_size=nc, max_size=nc),
            min_size=nr, max_size=nr)))

field_strategy = st.sampled_from([0, 3, 5, 7])


@given(rows=matrix_strategy, char=field_strategy)
@settings(max_examples=120, deadline=None)
def test_rank_transpose_and_kernel_count(rows, char):
    F = FieldSpec(char)
    m = ExactMatrix(F, rows)
    r = m.rank()
    assert r == m.transpose().rank()
    kb = m.kernel_basis()
    assert m.ncols == r + len(kb)
    for v in kb:
        assert all(x == 0 for x in m.matvec(v))


@given(rows=matrix_strategy, char=field_strategy, data=st.data())
@settings(max_examples=100, deadline=None)
def test_solve_consistency(rows, char, data):
    F = FieldSpec(char)
    m = ExactMatrix(F, rows)
    x = [F(data.draw(st.integers(min_value=-4, max_value=4)))
         for _ in range(m.ncols)]
    b = m.matvec(x)
    s = m.solve(b)
    assert s is not None
    assert m.matvec(s) == b
    s2 = PreparedSolver(m).solve(b)
    assert s2 == s


@given(rows=matrix_strategy, char=field_strategy)
@settings(max_examples=80, deadline=None)
def test_sparse_rank_matches_dense(rows, char):
    F = FieldSpec(char)
    m = ExactMatrix(F, rows)
    sparse = sparse_rank(({j: x for j, x in enumerate(row) if x != 0}
                          for row in rows), F)
    assert sparse == m.rank()
    if char:
        assert rank_mod_p(rows, char) == m.rank()
