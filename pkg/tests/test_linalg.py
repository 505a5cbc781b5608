from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from rankinpadic import _linalg
from rankinpadic._poly import Poly

entries = st.integers(min_value=-9, max_value=9).map(Fraction)


def square(n):
    return st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_charpoly_and_det_match_sympy(A):
    S = sympy.Matrix(A)
    x = sympy.Symbol("x")
    ref = sympy.Poly(S.charpoly(x).as_expr(), x).all_coeffs()[::-1]
    assert [Fraction(int(c)) for c in ref] == list(_linalg.charpoly(A))
    assert _linalg.det(A) == S.det()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_inverse_and_kernel(A):
    n = len(A)
    if _linalg.det(A) != 0:
        B = _linalg.inverse(A)
        assert _linalg.mat_mul(A, B) == _linalg.identity(n, Fraction(1), Fraction(0))
    else:
        K = _linalg.kernel(A)
        assert len(K) == n - _linalg.rank(A)
        for v in K:
            assert all(x == 0 for x in _linalg.mat_vec(A, v))


def test_poly_reciprocal_series():
    P = Poly([1, -3, 2])  # (1 - X)(1 - 2X)
    assert [P.reciprocal_series(6)[i] for i in range(7)] == [2 ** (i + 1) - 1 for i in range(7)]
