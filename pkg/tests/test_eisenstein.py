import cmath
import warnings
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from rankinpadic import eisenstein as eis
from rankinpadic.coefficients import DirichletCharacter
from rankinpadic.eisenstein import (KatoCombination, KatoEisSymbol, bernoulli_numbers, bernoulli_poly,
                                    decomposition, distribution_sides, eis_E, eis_F, eis_F_tilde, gl2_act,
                                    kato_constant_term, kato_q_expansion, sl2_act, w_route_chain,
                                    w_route_statement)
from rankinpadic.qseries import sigma

TAU = 0.13 + 1.1j


def cval(x):
    M = x.field.M
    return sum(float(c) * cmath.exp(2j * cmath.pi * i / M) for i, c in enumerate(x.coords))


def evaluate(sym, tau, prec=300):
    """Complex value of F_{g1,g2}|B_Q at tau, from the rendered coefficients."""
    D = sym.g1.denominator
    s = sym if sym.Q % D == 0 else KatoEisSymbol(sym.m, sym.g1, sym.g2, sym.Q * D)
    step = s.Q // sym.Q
    E = kato_q_expansion(s, prec)
    q = cmath.exp(2j * cmath.pi * tau / step)
    return sum(cval(E[n]) * q ** n for n in range(prec))


def test_bernoulli_against_sympy():
    B = bernoulli_numbers(20)
    assert B[1] == Fraction(-1, 2)
    for n in range(2, 21):
        assert B[n] == Fraction(str(sympy.bernoulli(n)))
    x = sympy.Symbol("x")
    for m in (1, 2, 3, 6):
        for a in (Fraction(1, 3), Fraction(2, 7)):
            ref = sympy.bernoulli(m, x).subs(x, sympy.Rational(a.numerator, a.denominator))
            assert bernoulli_poly(m, a) == Fraction(str(ref))


@pytest.mark.parametrize("m,a,b", [(3, Fraction(1, 3), Fraction(1, 4)), (4, Fraction(1, 5), Fraction(2, 5)),
                                   (2, Fraction(1, 3), Fraction(0)), (3, Fraction(0), Fraction(1, 3))])
def test_modularity_numerically(m, a, b):
    # S: tau^{-m} F_{a,b}(-1/tau) = F_{b,-a}(tau);  T: F_{a,b}(tau + 1) = F_{a,a+b}(tau)
    sym = KatoEisSymbol(m, a, b)
    S = sl2_act(sym, ((0, -1), (1, 0)))
    assert (S.g1, S.g2) == (b, eis.frac_part(-a))
    lhs = TAU ** (-m) * evaluate(sym, -1 / TAU)
    assert abs(lhs - evaluate(S, TAU)) < 1e-12 * (1 + abs(lhs))
    T = sl2_act(sym, ((1, 1), (0, 1)))
    assert abs(evaluate(sym, TAU + 1) - evaluate(T, TAU)) < 1e-12


def test_gl2_diagonal_numerically():
    sym = KatoEisSymbol(3, Fraction(1, 3), Fraction(1, 4), 3)
    M = ((1, 0), (0, 3))
    new, factor = gl2_act(sym, M)
    lhs = 3 ** (sym.m - 1) * 3 ** (-sym.m) * evaluate(sym, TAU / 3)
    assert abs(lhs - float(factor) * evaluate(new, TAU)) < 1e-12


def test_gl2_rejects_unsupported_shape():
    with pytest.raises(ValueError, match="unsupported"):
        gl2_act(KatoEisSymbol(3, Fraction(1, 3), Fraction(1, 4), 3), ((3, 1), (12, 7)))


def test_level_one_is_twice_E4():
    F = kato_q_expansion(KatoEisSymbol(4, 0, 0), 40)
    assert kato_constant_term(4, 0) == Fraction(1, 120)
    assert all(F[n] == F[n].field(2 * sigma(n, 3)) for n in range(1, 40))


def test_symbol_json_roundtrip():
    sym = KatoEisSymbol(3, Fraction(2, 9), Fraction(1, 3), 9)
    assert KatoEisSymbol.from_json(sym.to_json(5, p=3)) == (sym, 5)
    comb = decomposition(2, DirichletCharacter.all_mod(3)[1], 4, 3)
    assert KatoCombination.from_json(comb.to_json(p=3)) == comb


def test_cache_is_transparent():
    comb = decomposition(3, DirichletCharacter.all_mod(5)[2], 4, 5)
    eis.clear_cache()
    warm = kato_q_expansion(comb, 60)
    cached = kato_q_expansion(comb, 60)
    eis.CACHE_ENABLED = False
    try:
        cold = kato_q_expansion(comb, 60)
    finally:
        eis.CACHE_ENABLED = True
    assert warm == cached == cold


def test_weight_one_warns():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        kato_q_expansion(KatoEisSymbol(1, Fraction(1, 3), 0, 3), 10)
    assert any("experimental" in str(x.message) for x in w)


def test_F_tilde_constant_and_depletion():
    chi = DirichletCharacter.all_mod(5)[1]
    F = eis_F(3, chi, 4, 5, 50)
    assert F[0] == 0 or F[0].is_zero()
    assert all((F[n] == 0 or F[n].is_zero()) for n in range(50) if n % 5 == 0)
    E = eis_E(2, 4, 3, 40)
    assert all(E[n] == 0 for n in range(0, 40, 3))


small = st.tuples(st.sampled_from([3, 5]), st.sampled_from([1, 2, 4, 7]), st.integers(2, 4))


@settings(max_examples=12, deadline=None)
@given(small)
def test_identities_at_small_parameters(params):
    p, N, m = params
    for chi in DirichletCharacter.all_mod(p):
        A = kato_q_expansion(decomposition(m, chi, N, p), 30)
        assert A == eis_F_tilde(m, chi, N, p, 30, 1)
    lhs, rhs = distribution_sides(m, N, p)
    assert kato_q_expansion(lhs, 30 * p) == kato_q_expansion(rhs, 30 * p)


def test_W_routes_nonzero_and_equal():
    for chi in DirichletCharacter.all_mod(3):
        a = kato_q_expansion(w_route_statement(2, chi, 4, 3), 30)
        b = kato_q_expansion(w_route_chain(2, chi, 4, 3), 30)
        assert a == b and not a.is_zero()
