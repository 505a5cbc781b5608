import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from rankinpadic import datasets
from rankinpadic._poly import Poly
from rankinpadic.forms import NewformData
from rankinpadic.localfactors import (CrysLocalData, WeilDeligneDatum, adjoint_factor, crys_identities,
                                      gamma_from_L, modified_factor, modified_factor_dual, modified_factor_ratio,
                                      random_crys_data, random_wd_datum, rankin_P4, rankin_P4_sym,
                                      reciprocal_check, tame_gamma, unramified_eps0)

nonzero = st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(bool)


@settings(max_examples=60, deadline=None)
@given(nonzero, nonzero, nonzero, nonzero)
def test_P4_from_roots_and_from_traces(r1, r2, s1, s2):
    assert rankin_P4((r1, r2), (s1, s2)) == rankin_P4_sym(r1 + r2, r1 * r2, s1 + s2, s1 * s2)


def test_P4_sym_against_sympy():
    a, e1, b, e2, X = sympy.symbols("a e1 b e2 X")
    r1, r2, s1, s2 = sympy.symbols("r1 r2 s1 s2")
    prod = sympy.expand((1 - r1 * s1 * X) * (1 - r1 * s2 * X) * (1 - r2 * s1 * X) * (1 - r2 * s2 * X))
    sym = rankin_P4_sym(a, e1, b, e2)
    for i in range(5):
        expr = sympy.expand(sympy.sympify(sym[i]).subs({a: r1 + r2, e1: r1 * r2, b: s1 + s2, e2: s1 * s2}))
        assert sympy.simplify(expr - prod.coeff(X, i)) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7, 11]))
def test_crystalline_identities_property(seed, p):
    d = random_crys_data(random.Random(seed), p)
    assert d.alpha * d.beta == d.psi_p * Fraction(p) ** (d.k - 1)
    assert all(rec["ok"] for rec in crys_identities(d).values())
    try:
        assert modified_factor(d) == modified_factor_ratio(d)
    except ZeroDivisionError:
        pass


def test_modified_factor_small_case():
    # k=4, l=2, t=0, p=5 with alpha=1, beta=125, g: b_p=2, eps=1
    d = CrysLocalData(5, 4, 2, 0, Fraction(1), Fraction(1), Fraction(2), Fraction(1))
    assert modified_factor(d) == modified_factor_ratio(d)
    assert modified_factor_dual(d) != 0


def test_reciprocal_check_reports_depth():
    for label in datasets.NEWFORMS:
        rec = reciprocal_check(datasets.newform(label), 3, 8)
        assert rec["ok"] and rec["depth"] == 8
    short = datasets.newform("11a")
    trunc = NewformData("short", 2, 11, short.char, short.an[:100])
    rec = reciprocal_check(trunc, 3, 8)
    assert not rec["ok"] and rec["depth"] == 4


def test_reciprocal_check_finds_corruption():
    f = datasets.newform("Delta")
    an = list(f.an)
    an[81] += 1
    bad = NewformData("bad", 12, 1, f.char, tuple(an))
    assert reciprocal_check(bad, 3, 8)["first_failure"] == 4


def test_adjoint_factor_crystalline():
    D = datasets.newform("Delta")
    alpha = Fraction(2)  # formula check only
    beta = Fraction(11) ** 11 / alpha
    assert adjoint_factor(D, 11, alpha) == (1 - beta / alpha) * (1 - beta / (11 * alpha))


# gamma factors

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7, 25]), nonzero)
def test_twist_law_property(seed, nu, x):
    rep = random_wd_datum(random.Random(seed), nu)
    assert tame_gamma(rep.twist(x)) == tame_gamma(rep).subs_scale(x)


def test_wd_validation_rejects_broken_relation():
    F = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(3)]]
    S = [[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]]
    with pytest.raises(ValueError, match="tame relation"):
        WeilDeligneDatum(2, F, S, 0, Fraction(1), 5).validate()
    with pytest.raises(ValueError, match="missing"):
        WeilDeligneDatum.from_json({"dim": 1})


def test_wd_json_roundtrip():
    rep = random_wd_datum(random.Random(3), 7)
    again = WeilDeligneDatum.from_json(rep.to_json())
    assert again.frob_inv == rep.frob_inv and again.eps0 == rep.eps0


def test_unramified_gamma_matches_classical():
    c = Fraction(5, 3)
    rep = WeilDeligneDatum(1, [[c]], [[Fraction(1)]], 0, unramified_eps0([[c]]), 7)
    for s in range(-2, 3):
        X = Fraction(7) ** (-s)
        assert tame_gamma(rep, X) == gamma_from_L(Poly([1, -c]), Poly([1, -1 / c]), 1, s, 1, 7)


def test_gamma_from_L_pole():
    with pytest.raises(ZeroDivisionError):
        gamma_from_L(Poly([1, -3]), Poly([1]), 1, 1, 1, 3)


def test_rank4_guard():
    rep = random_wd_datum(random.Random(1), 5, max_blocks=1)
    if rep.dim != 4:
        with pytest.raises(ValueError, match="dimension 4"):
            tame_gamma(rep, rank4=True)
