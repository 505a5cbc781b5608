from fractions import Fraction

import pytest

from rankinpadic import _linalg, datasets, suites
from rankinpadic.coefficients import PadicScalar
from rankinpadic.forms import hecke_roots, p_stabilise
from rankinpadic.padicL import (Budgets, MultiplicityError, OrdinarySpace, PrecisionError, UnsupportedPoint,
                                dual_padic_L_at, fe_exponent, fe_report, interp_rhs_algebraic, newform_functional,
                                newton_polygon, newton_unit_root_count, ordinary_projector, padic_L_at,
                                projector_checks, result_record, stabilised_coords, synthetic_space,
                                to_padic_matrix)
from rankinpadic.qseries import QExpansion


@pytest.fixture(scope="module")
def space():
    return datasets.space_12_11()


@pytest.fixture(scope="module")
def point():
    return suites.genuine_point()


def close(A, B):
    return all((a - b).is_zero() for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def test_newton_polygon():
    # (x - 1)(x - 5)(x - 25) has coefficient valuations 3, 1, 0, 0
    assert newton_polygon([3, 1, 0, 0]) == [(2, 1), (1, 1), (0, 1)]
    assert newton_polygon([None, 0, 0]) == [(float("inf"), 1), (0, 1)]
    assert newton_unit_root_count([[1, 0, 0], [0, 5, 0], [0, 0, 25]], 5) == 1
    assert newton_unit_root_count([[0, -1], [1, 0]], 3) == 2


def test_projector_on_a_conjugated_diagonal():
    P = [[Fraction(1), Fraction(2)], [Fraction(1), Fraction(3)]]
    Pi = _linalg.inverse(P)
    M = _linalg.mat_mul(_linalg.mat_mul(P, [[Fraction(2), 0], [0, Fraction(10)]]), Pi)
    e = ordinary_projector(M, 5, 20)
    expect = _linalg.mat_mul(_linalg.mat_mul(P, [[Fraction(1), 0], [0, Fraction(0)]]), Pi)
    assert close(e, to_padic_matrix(expect, 5, 20))


def test_projector_with_unit_roots_outside_Qp():
    # eigenvalues +-i have residues in F_9, not F_3; a (p-1)-power schedule cannot converge here
    e = ordinary_projector([[0, -1], [1, 0]], 3, 20)
    assert close(e, to_padic_matrix([[1, 0], [0, 1]], 3, 20))


def test_projector_reports_failure():
    with pytest.raises(PrecisionError):
        ordinary_projector([[1, 1], [0, 1]], 5, 30, max_j=0)


def test_genuine_up_matrix(space):
    assert space.dim == 12
    U = space.up
    assert _linalg.mat_mul(U, space.hecke(2)) == _linalg.mat_mul(space.hecke(2), U)
    e = ordinary_projector(U, 11, 30)
    chk = projector_checks(e, U, [("T_2", space.hecke(2))])
    assert chk["idempotent"] and chk["commutes_U_p"] and chk["commutes_T_2"]
    assert (chk["trace"] - 2).is_zero() and newton_unit_root_count(U, 11) == 2


def test_functional_properties(space):
    D = datasets.newform("Delta")
    lam = newform_functional(space, D, 30)
    alpha, beta = hecke_roots(D, 11, prec=40)
    assert (lam(stabilised_coords(space, D, beta)) - 1).is_zero()
    T2 = to_padic_matrix(space.hecke(2), 11, 40)
    assert all((a - b * (-24)).is_zero() for a, b in zip(_linalg.vec_mat(lam.row, T2), lam.row))
    assert lam.normalization["kernel_dim"] >= 1
    assert "separately" in lam.normalization["petersson_constant"]
    # the other ordinary vector (an Eisenstein-type eigenvector) is killed
    E = QExpansion(tuple(Fraction(c) for c in space.basis[2].coeffs), 12, 11)
    assert space.coords(E)  # in the span


def test_coords_reject_outside_span(space):
    bad = QExpansion(tuple([Fraction(0), Fraction(1)] + [Fraction(0)] * 600), 12, 11)
    with pytest.raises(ValueError, match="span"):
        space.coords(bad)


def test_rank_deficient_basis():
    b = QExpansion(tuple(Fraction(n) for n in range(30)), 4, 5)
    with pytest.raises(ValueError, match="rank-deficient"):
        OrdinarySpace(4, 5, 5, [b, b.scale(2)], sturm=12)


def test_synthetic_space_roundtrip():
    sp, change, eig = synthetic_space(5, 4, [({2: 3}, Fraction(2)), ({2: -1}, Fraction(5))], 80)
    again = OrdinarySpace.from_json(sp.to_json())
    assert again.coords(eig[1]) == sp.coords(eig[1]) == change[1]


def test_collision_names_basis_vectors():
    sp, ch, _, sys_ = suites.synthetic_setup_collision()
    with pytest.raises(MultiplicityError, match="mix"):
        suites.synthetic_functional(sp, ch, sys_, 0, 20)


# [DERIVED] regression of the genuine value, reproduced at doubled budgets by the acceptance suite
L_UNIT = 7069234579331464431251646576188


def test_genuine_value_frozen(space, point):
    L, prov = padic_L_at(point, space, Budgets(), with_provenance=True)
    assert (L.unit, L.val, L.prec) == (L_UNIT, 1, 31)
    assert prov == padic_L_at(point, space, Budgets(), with_provenance=True)[1]
    rec = result_record(point, L, prov)
    assert set(rec) == {"point", "value", "provenance"}
    assert set(rec["value"]) == {"unit", "valuation", "precision"}


def test_dual_equals_value_at_level_one(space, point):
    L = padic_L_at(point, space, Budgets())
    Ld = dual_padic_L_at(point, space, Budgets())
    rep = fe_report(point, L, Ld, 1, tamper=12)
    assert rep["zero"] and rep["tamper"]["detected"]


def test_t_positive_is_unsupported(space):
    with pytest.raises(UnsupportedPoint):
        padic_L_at(suites.genuine_point(1), space, Budgets())
    assert fe_exponent(suites.genuine_point(0)) - fe_exponent(suites.genuine_point(1)) == 4


def test_small_budget_fails_loudly(space, point):
    with pytest.raises((PrecisionError, ValueError)):
        padic_L_at(point, space, Budgets(qprec=50, pprec=10))


def test_interp_slots(point):
    rhs = interp_rhs_algebraic(point)
    assert rhs.slots == {"Lambda": "opaque", "petersson": "opaque"} and rhs.numeric() is None
    from rankinpadic.localfactors import CrysLocalData
    loc = CrysLocalData(5, 4, 2, 0, Fraction(1), Fraction(1), Fraction(2), Fraction(1))
    blk = interp_rhs_algebraic(local=loc, ingested={"Lambda": 2.0, "petersson": 4.0})
    # local data alone gives only the Euler block, so there is nothing to evaluate
    assert blk.algebraic is None and blk.slots["Lambda"] == 2.0


def test_budgets_double():
    assert Budgets(10, 3).doubled() == Budgets(20, 6)


def test_stabilised_coords_match_p_stabilise(space):
    D = datasets.newform("Delta")
    alpha, beta = hecke_roots(D, 11, prec=30)
    x = stabilised_coords(space, D, beta)
    fa = p_stabilise(D, 11, beta, prec=space.prec)
    S = space.series([xi for xi in x])
    assert all((S[n] - fa[n]).is_zero() for n in range(50))
