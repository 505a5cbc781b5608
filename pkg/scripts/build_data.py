"""Regenerate the packaged data files under src/rankinpadic/data.

    python3 scripts/build_data.py

11a: a_p = p + 1 - #E(F_p) for y^2 + y = x^3 - x^2 - 10x - 20, counted with
Legendre symbols.  Delta: q prod (1 - q^n)^24 from Jacobi's formula for
prod (1 - q^n)^3.  The weight-12 level-11 basis is a greedy selection of
products of level-1 and level-11 forms.
"""
from __future__ import annotations

import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from rankinpadic import _linalg  # noqa: E402
from rankinpadic.coefficients import DirichletCharacter, primes_up_to  # noqa: E402
from rankinpadic.forms import from_hecke_eigenvalues  # noqa: E402
from rankinpadic.localfactors import random_wd_datum  # noqa: E402
from rankinpadic.qseries import QExpansion, mul, sigma  # noqa: E402

DATA = ROOT / "src" / "rankinpadic" / "data"
NEWFORM_PREC = 6562  # 3^8 + 1
SPACE_PREC = 11 * 48


def ap_11a(p: int) -> int:
    if p == 2:
        count = sum(1 for x in range(2) for y in range(2)
                    if (y * y + y - (x ** 3 - x * x - 10 * x - 20)) % 2 == 0)
        return p - count
    squares = [0] * p
    for y in range(p):
        squares[y * y % p] += 1
    count = 0
    for x in range(p):
        rhs = (4 * (x ** 3 - x * x - 10 * x - 20) + 1) % p
        count += squares[rhs]
    return p - count


def series_mul(a, b, n):
    out = [0] * n
    nz = [(j, y) for j, y in enumerate(b[:n]) if y]
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in nz:
                if i + j >= n:
                    break
                out[i + j] += x * y
    return out


def delta_coeffs(n: int) -> list:
    A = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        A[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    A2 = series_mul(A, A, n)
    A4 = series_mul(A2, A2, n)
    A8 = series_mul(A4, A4, n)
    return [0] + A8[: n - 1]


def eisenstein(k: int, n: int, const: Fraction, scale: int) -> list:
    return [const] + [scale * sigma(m, k - 1) for m in range(1, n)]


def V(a, d, n):
    out = [0] * n
    for i in range(0, n, d):
        out[i] = a[i // d]
    return out


def eta_power_prod(n):
    """eta(tau)^2 eta(11 tau)^2 from prod (1-q^m)^2 (1-q^{11m})^2."""
    def euler2(N):
        c = [1] + [0] * (N - 1)
        for m in range(1, N):
            # multiply by (1 - q^m)^2
            for _ in range(2):
                for i in range(N - 1, m - 1, -1):
                    c[i] -= c[i - m]
        return c
    e = euler2(n)
    e11 = V(e, 11, n)
    prod = series_mul(e, e11, n)
    return [0] + prod[: n - 1]


def newform_json(f):
    return f.to_json()


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    ap = {p: ap_11a(p) for p in primes_up_to(NEWFORM_PREC)}
    assert ap[2] == -2 and ap[3] == -1 and ap[5] == 1 and ap[11] == 1
    f11 = from_hecke_eigenvalues("11a", 2, 11, DirichletCharacter.trivial(11), ap, NEWFORM_PREC)
    eta = eta_power_prod(2000)
    assert list(f11.an[:2000]) == eta, "point counts disagree with the eta product"
    (DATA / "11a.json").write_text(json.dumps(newform_json(f11.validate())))
    print("11a", time.time() - t0)

    dl = delta_coeffs(NEWFORM_PREC)
    assert dl[1:4] == [1, -24, 252] and dl[11] == 534612
    from rankinpadic.forms import NewformData
    delta = NewformData("Delta", 12, 1, DirichletCharacter.trivial(1), tuple(dl)).validate()
    (DATA / "delta.json").write_text(json.dumps(delta.to_json()))
    print("Delta", time.time() - t0)

    e4 = [Fraction(1, 240)] + [sigma(m, 3) for m in range(1, NEWFORM_PREC)]
    g = NewformData("E4", 4, 1, DirichletCharacter.trivial(1), tuple(e4)).validate()
    (DATA / "e4.json").write_text(json.dumps(g.to_json()))

    n = SPACE_PREC
    E4 = eisenstein(4, n, Fraction(1), 240)
    E6 = eisenstein(6, n, Fraction(1), -504)
    D = dl[:n]
    F11 = eta[:n]
    E2 = [1] + [-24 * sigma(m, 1) for m in range(1, n)]
    E2_11 = [Fraction(11 * a - b, 10) for a, b in zip(V(E2, 11, n), E2)]
    m = lambda *xs: _prod(xs, n)
    cands = [
        ("Delta", D), ("V11(Delta)", V(D, 11, n)), ("E4^3", m(E4, E4, E4)), ("E6^2", m(E6, E6)),
        ("V11(E4)^3", V(m(E4, E4, E4), 11, n)), ("E4^2 V11(E4)", m(E4, E4, V(E4, 11, n))),
        ("E4 V11(E4)^2", m(E4, V(E4, 11, n), V(E4, 11, n))), ("E6 V11(E6)", m(E6, V(E6, 11, n))),
        ("f11 E4 E6", m(F11, E4, E6)), ("f11^2 E4^2", m(F11, F11, E4, E4)),
        ("f11^3 E6", m(F11, F11, F11, E6)), ("f11^4 E4", m(F11, F11, F11, F11, E4)),
        ("f11^6", m(F11, F11, F11, F11, F11, F11)), ("E2_11 E4 E6", m(E2_11, E4, E6)),
        ("E2_11^6", m(E2_11, E2_11, E2_11, E2_11, E2_11, E2_11)),
        ("f11 V11(E4) E6", m(F11, V(E4, 11, n), E6)), ("f11 E2_11^5", m(F11, E2_11, E2_11, E2_11, E2_11, E2_11)),
    ]
    chosen, rows = [], []
    for label, c in cands:
        trial = rows + [[Fraction(x) for x in c[:13]]]
        if _linalg.rank(trial) == len(trial):
            rows = trial
            chosen.append((label, c))
        if len(chosen) == 12:
            break
    assert len(chosen) == 12, f"only {len(chosen)} independent forms"
    # full-length independence and a consistency check on the overdetermined system
    full = [[Fraction(x) for x in c] for _, c in chosen]
    assert _linalg.rank(full) == 12
    space = {"k": 12, "level": 11, "p": 11, "char": DirichletCharacter.trivial(1).to_json(), "sturm": 12,
             "verified_prec": n,
             "basis": [{"label": lab, "coeffs": [_tojson(x) for x in c]} for lab, c in chosen]}
    (DATA / "space_12_11.json").write_text(json.dumps(space))
    print("space", [lab for lab, _ in chosen], time.time() - t0)

    rng = random.Random(2024)
    wd = [random_wd_datum(rng, nu).to_json() for nu in (3, 5, 7)]
    (DATA / "wd_samples.json").write_text(json.dumps(wd, indent=1))


def _prod(xs, n):
    out = list(xs[0])
    for x in xs[1:]:
        out = series_mul(out, list(x), n)
    return out


def _tojson(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


if __name__ == "__main__":
    main()
