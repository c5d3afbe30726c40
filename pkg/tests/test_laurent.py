import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2approx.cellcomplex import laplacians
from l2approx.laurent import (
    LaurentMatrix,
    LaurentPoly,
    adjoint,
    evaluate,
    multiply,
    power,
    vn_trace,
    vn_trace_power,
)

t = LaurentPoly.monomial((1,), 1)
one = LaurentPoly.constant(1, 1)


def mat1(p: LaurentPoly) -> LaurentMatrix:
    return LaurentMatrix(1, 1, p.rank, {(0, 0): p})


def polys(rank, max_terms=4, span=2, coef=3):
    shift = st.tuples(*[st.integers(-span, span)] * rank)
    return st.lists(st.tuples(shift, st.integers(-coef, coef)), max_size=max_terms).map(
        lambda items: LaurentPoly(items, rank)
    )


@st.composite
def matrices(draw, rows=None, cols=None, rank=None):
    rank = rank or draw(st.integers(1, 2))
    rows = rows if rows is not None else draw(st.integers(0, 3))
    cols = cols if cols is not None else draw(st.integers(0, 3))
    entries = {(i, j): draw(polys(rank)) for i in range(rows) for j in range(cols)}
    return LaurentMatrix(rows, cols, rank, entries)


@st.composite
def chains(draw, length):
    rank = draw(st.integers(1, 2))
    dims = [draw(st.integers(1, 3)) for _ in range(length + 1)]
    return [draw(matrices(dims[i], dims[i + 1], rank)) for i in range(length)]


def test_zero_coefficients_are_pruned():
    p = LaurentPoly([((1,), 2), ((1,), -2), ((0,), 3)], 1)
    assert p.terms == {(0,): 3}
    assert LaurentMatrix(2, 2, 1, {(0, 1): LaurentPoly({}, 1)}).entries == {}


def test_shift_length_checked():
    with pytest.raises(ValueError):
        LaurentPoly({(1, 0): 1}, 1)


def test_circle_product():
    p = (t - one) * (t.star() - one)
    assert p.terms == {(-1,): -1, (0,): 2, (1,): -1}


def test_identity_is_neutral():
    a = mat1(t * 3 - one)
    assert multiply(a, LaurentMatrix.identity(1, 1)) == a


def test_square_of_circle_laplacian_constant_term():
    delta = mat1(LaurentPoly({(0,): 2, (1,): -1, (-1,): -1}, 1))
    assert power(delta, 2)[0, 0].constant_term() == 6


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(LaurentMatrix.zeros(2, 3, 1), LaurentMatrix.zeros(2, 3, 1))


def test_adjoint_of_monomial_difference():
    assert adjoint(mat1(t - one)) == mat1(t.star() - one)


def test_adjoint_of_integer_matrix_is_transpose():
    a = np.array([[1, 2, 0], [0, -3, 4]])
    assert adjoint(LaurentMatrix.from_integers(a, 2)) == LaurentMatrix.from_integers(a.T, 2)


def test_evaluate_substitutes_characters():
    p = mat1(LaurentPoly({(0,): 2, (1,): -1, (-1,): -1}, 1))
    for theta in (0.0, 0.1, 0.25, 0.7):
        assert evaluate(p, [theta])[0, 0] == pytest.approx(2 - 2 * math.cos(2 * math.pi * theta))
    assert evaluate(p, [0.25])[0, 0] == pytest.approx(2)


def test_evaluate_at_zero_is_coefficient_sum(torus):
    fam = laplacians(torus)
    for d in fam.d:
        at0 = evaluate(d, (0.0, 0.0))
        sums = np.zeros(d.shape)
        for (i, j), p in d.items():
            sums[i, j] = sum(c for _, c in p.items())
        np.testing.assert_allclose(at0, sums)


def test_vn_trace_power_circle_central_binomials(circle):
    delta = laplacians(circle).delta[0]
    assert vn_trace_power(delta, 0) == 1
    assert [vn_trace_power(delta, k) for k in range(1, 7)] == [math.comb(2 * k, k) for k in range(1, 7)]


@given(matrices())
def test_adjoint_is_involution(a):
    assert adjoint(adjoint(a)) == a


@given(chains(3))
def test_multiply_is_associative(ms):
    a, b, c = ms
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(chains(2))
def test_adjoint_reverses_products(ms):
    a, b = ms
    assert adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a))


@given(matrices(), st.floats(0, 1), st.floats(0, 1))
def test_evaluate_commutes_with_adjoint(a, x, y):
    theta = (x, y)[: a.rank]
    np.testing.assert_allclose(evaluate(adjoint(a), theta), evaluate(a, theta).conj().T, atol=1e-9)


@given(matrices())
def test_trace_of_gram_is_sum_of_squares(a):
    tr = vn_trace(multiply(adjoint(a), a))
    assert tr >= 0
    assert tr == sum(c * c for _, p in a.items() for _, c in p.items())


@given(matrices(rows=2, cols=2), st.integers(0, 4))
def test_power_matches_repeated_product(a, k):
    expected = LaurentMatrix.identity(2, a.rank)
    for _ in range(k):
        expected = multiply(expected, a)
    assert power(a, k) == expected
