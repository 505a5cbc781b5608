"""One test per acceptance criterion, at the stated parameters and tolerances.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal summary.
"""
import pytest

from rankinpadic import datasets, suites
from rankinpadic.padicL import Budgets


def _failed(report):
    return [c["name"] for c in report["checks"] if not c["ok"]]


@pytest.fixture(scope="module")
def pipeline():
    return suites.pipeline_suite(Budgets(), seed=7)


@pytest.mark.parametrize("p,N,m,r", [(3, 4, 2, 1), (3, 5, 2, 1), (5, 4, 3, 1)])
def test_eisenstein_suite(acceptance, p, N, m, r):
    w_prec = 60 if (p, N, m, r) == (3, 4, 2, 1) else None
    rep = suites.eisenstein_suite(p, N, m, r, prec=100, w_prec=w_prec)
    bad = _failed(rep)
    assert acceptance(f"Eisenstein suite (p,N,m,r)=({p},{N},{m},{r})", not bad,
                      f"{len(rep['checks'])} checks, prec 100" + (", W routes to 60" if w_prec else ""))
    assert all(c["compared"] == 100 for c in rep["checks"] if c["name"].startswith("F~"))


def test_euler_suite(acceptance):
    rep = suites.euler_suite(samples=100, seed=7, depth=8, forms=tuple(datasets.NEWFORMS))
    bad = _failed(rep)
    assert acceptance("Euler suite", not bad, "100 seeded instances; reciprocal series to depth 8")
    assert sum(c["name"].startswith("reciprocal") for c in rep["checks"]) >= len(datasets.NEWFORMS)


def test_key_lemma(acceptance):
    rep = suites.key_lemma_suite(("11a", "Delta"), p=3, cmax=3)
    assert acceptance("Key-lemma oracle", not _failed(rep), "11a and Delta, c = 0..3")


def test_gamma_suite(acceptance):
    rep = suites.gamma_suite(samples=50, seed=7)
    assert acceptance("gamma suite", not _failed(rep), "; ".join(c["name"] for c in rep["checks"]))


def test_projector_suite(acceptance):
    rep = suites.projector_suite(count=20, seed=7, prec=30)
    assert acceptance("Projector suite", not _failed(rep), "20 seeded matrices, p in {3,5}, 30 digits, plus U_11")
    assert all(c["precision"] >= 30 for c in rep["checks"])


def test_pipeline_invariance(acceptance, pipeline):
    names = ["synthetic V_p-perturbation invariance", "ingested V_p-perturbation invariance",
             "ingested dual V_p-perturbation invariance"]
    checks = {c["name"]: c for c in pipeline["checks"]}
    assert acceptance("Pipeline invariance", all(checks[n]["ok"] for n in names),
                      f"ingested precision {checks[names[1]]['precision']}")


def test_interpolation_shape(acceptance, pipeline):
    euler = suites.euler_suite(samples=100, seed=11, forms=())
    checks = {c["name"]: c for c in euler["checks"] + pipeline["checks"]}
    ok = (checks["interpolation euler block x P_p(f,g*,l+t)"]["ok"]
          and checks["interp euler block x P_p(f,g*,l+t) = modified factor (ingested point)"]["ok"])
    assert acceptance("Cross-module interpolation shape", ok, "100 random crystalline points and the ingested point")


def test_functional_equation(acceptance):
    rep = suites.fe_suite(Budgets())
    res, tamper = rep["checks"]
    assert acceptance("Functional-equation residual", res["ok"] and tamper["ok"],
                      f"residual zero to p^{res['precision']}; tamper residual {tamper['residual']['valuation']}")
    assert res["precision"] >= 20


def test_precision_honesty(acceptance, pipeline):
    checks = [c for c in pipeline["checks"] if "precision honesty" in c["name"]]
    assert acceptance("Precision honesty", len(checks) == 3 and all(c["ok"] for c in checks),
                      ", ".join(f"{c['digits']}->{c['doubled']}" for c in checks))
