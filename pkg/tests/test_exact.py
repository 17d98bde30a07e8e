from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from shadowbound.errors import DimensionMismatch, Singular
from shadowbound.exact import Q, QMatrix, QVector, bit_size, dot, fmt, invert, parse_vector, rank, solve

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def square_matrices(n):
    return st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)


def test_scalar_is_lowest_terms():
    q = Q("6/-4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert fmt(q) == "-3/2"
    assert fmt(Q(4)) == "4"


def test_rejects_inexact_float():
    with pytest.raises(TypeError):
        Q(0.1)
    assert Q(3.0) == 3


def test_parse_vector():
    assert parse_vector("1,-2/3, 4") == QVector([1, Fraction(-2, 3), 4])


@pytest.mark.parametrize("M, rhs, expected", [
    ([[1, 0], [0, 1]], [3, "5/2"], [3, "5/2"]),
    ([[1, 1], [1, -1]], [1, 0], ["1/2", "1/2"]),
])
def test_solve_examples(M, rhs, expected):
    assert solve(QMatrix(M), QVector(rhs)) == QVector(expected)


def test_solve_singular():
    with pytest.raises(Singular):
        solve(QMatrix([[1, 2], [2, 4]]), QVector([1, 1]))


def test_invert_examples():
    assert invert(QMatrix.identity(3)) == QMatrix.identity(3)
    assert invert(QMatrix.diag([2, "1/3"])) == QMatrix.diag(["1/2", 3])
    assert invert(QMatrix([[1, 1], [0, 1]])) == QMatrix([[1, -1], [0, 1]])


@pytest.mark.parametrize("a, b, expected", [
    ([1, 0], [0, 1], 0),
    ([1, 2], [3, 4], 11),
    (["1/2", "1/3"], [2, 3], 2),
])
def test_dot_examples(a, b, expected):
    assert dot(QVector(a), QVector(b)) == expected


def test_dot_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dot(QVector([1, 2]), QVector([1]))


def test_vector_norms():
    v = QVector(["1/2", "-1/3"])
    assert v.norm1() == Q("5/6")
    assert v.norm_inf() == Q("1/2")
    assert v.norm2_sq() == Q("13/36")


def test_rank_and_bits():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank(QMatrix.identity(4)) == 4
    assert bit_size(Q("3/4")) == 5  # 2 bits for 3, 3 bits for 4


@given(square_matrices(3), st.lists(rationals, min_size=3, max_size=3))
def test_solve_satisfies_system(rows, rhs):
    M = QMatrix(rows)
    assume(rank(M) == 3)
    x = solve(M, QVector(rhs))
    assert M @ x == QVector(rhs)


@given(square_matrices(4))
def test_invert_gives_identity(rows):
    M = QMatrix(rows)
    if rank(M) < 4:
        with pytest.raises(Singular):
            invert(M)
        return
    inv = invert(M)
    assert M @ inv == QMatrix.identity(4)
    assert inv @ M == QMatrix.identity(4)
    for row in inv:
        for q in row:
            assert Fraction(int(q.numerator), int(q.denominator)).denominator == q.denominator


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_vector_arithmetic_is_exact(a, b):
    u, v = QVector(a), QVector(b)
    assert (u + v) - v == u
    assert dot(u, v) == sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))
