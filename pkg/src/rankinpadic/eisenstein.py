"""Eisenstein families and Kato's series F^{(m)}_{a,b} as symbols.

Kato's series are rendered from

    F_{a,b} = c_0(a) + sum_{d in a+Z, d>0} sum_{e>=1} d^{m-1} e(b e) q^{d e}
                  + (-1)^m sum_{d in -a+Z, d>0} sum_{e>=1} d^{m-1} e(-b e) q^{d e},

with c_0(a) = (zeta(1-m, <a>) + (-1)^m zeta(1-m, <-a>)) / 2 and <x> in (0, 1].
This expansion transforms as F_{a,b}|_m gamma = F_{(a,b) gamma} (checked
numerically in the tests).  All matrix manipulations act on symbols; a
q-expansion is produced only at the end.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .coefficients import CyclotomicElement, CyclotomicField, DirichletCharacter, lcm
from .qseries import QExpansion, deplete

CACHE_ENABLED = True
_cache: dict = {}
_cache_lock = threading.Lock()


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple:
    """B_0 .. B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, k) * B[k] for k in range(m)) / Fraction(m + 1))
    return tuple(B)


def bernoulli_poly(m: int, x) -> Fraction:
    B = bernoulli_numbers(m)
    x = Fraction(x)
    return sum(math.comb(m, k) * B[k] * x ** (m - k) for k in range(m + 1))


def hurwitz_at_negative(m: int, x) -> Fraction:
    """zeta(1 - m, x) = -B_m(x)/m for x in (0, 1]."""
    return -bernoulli_poly(m, x) / m


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def kato_constant_term(m: int, a) -> Fraction:
    a = Fraction(a)
    xa = frac_part(a) or Fraction(1)
    xm = frac_part(-a) or Fraction(1)
    return (hurwitz_at_negative(m, xa) + (-1) ** m * hurwitz_at_negative(m, xm)) / 2


# ---------------------------------------------------------------------------
# symbols


@dataclass(frozen=True)
class KatoEisSymbol:
    """F^{(m)}_{g1,g2} | B_Q, where B_Q is q -> q^Q."""
    m: int
    g1: Fraction
    g2: Fraction
    Q: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("weight must be >= 1")
        object.__setattr__(self, "g1", frac_part(Fraction(self.g1)))
        object.__setattr__(self, "g2", frac_part(Fraction(self.g2)))

    def to_json(self, coeff=1, p: Optional[int] = None):
        from .coefficients import scalar_to_json
        out = {"m": self.m, "g1": f"{self.g1.numerator}/{self.g1.denominator}",
               "g2": f"{self.g2.numerator}/{self.g2.denominator}", "coeff": scalar_to_json(coeff)}
        if p is not None:
            e = round(math.log(self.Q, p)) if self.Q > 1 else 0
            if p ** e != self.Q:
                raise ValueError(f"B-index {self.Q} is not a power of {p}")
            out.update({"p": p, "Bp_power": e})
        else:
            out["B"] = self.Q
        return out

    @staticmethod
    def from_json(obj):
        from .coefficients import scalar_from_json
        Q = obj["p"] ** obj["Bp_power"] if "Bp_power" in obj else obj.get("B", 1)
        return KatoEisSymbol(int(obj["m"]), Fraction(obj["g1"]), Fraction(obj["g2"]), Q), \
            scalar_from_json(obj.get("coeff", "1"))


class KatoCombination:
    """Formal linear combination sum c_i * symbol_i with no duplicate symbols."""

    def __init__(self, terms=None):
        self.terms: dict = {}
        for sym, c in (terms.items() if isinstance(terms, dict) else (terms or [])):
            self.add(sym, c)

    def add(self, sym: KatoEisSymbol, c):
        cur = self.terms.get(sym)
        new = c if cur is None else cur + c
        if _is_zero(new):
            self.terms.pop(sym, None)
        else:
            self.terms[sym] = new
        return self

    def scale(self, s):
        return KatoCombination({k: v * s for k, v in self.terms.items()})

    def __add__(self, other):
        out = KatoCombination(dict(self.terms))
        for k, v in other.terms.items():
            out.add(k, v)
        return out

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        diff = self + other.scale(-1)
        return len(diff) == 0

    def act(self, M):
        out = KatoCombination()
        for sym, c in self.terms.items():
            s2, factor = gl2_act(sym, M)
            out.add(s2, c * factor)
        return out

    def sl2(self, gamma):
        return KatoCombination({sl2_act(s, gamma): c for s, c in self.terms.items()})

    def to_json(self, p=None):
        return [s.to_json(c, p) for s, c in self.terms.items()]

    @staticmethod
    def from_json(lst):
        out = KatoCombination()
        for obj in lst:
            s, c = KatoEisSymbol.from_json(obj)
            out.add(s, c)
        return out


def _is_zero(c):
    z = getattr(c, "is_zero", None)
    return z() if z is not None else c == 0


def sl2_act(sym: KatoEisSymbol, gamma) -> KatoEisSymbol:
    """F_{(a,b)} | gamma = F_{(a,b) gamma} (row vector times matrix); B_Q must be trivial."""
    (a, b), (c, d) = gamma
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL_2(Z)")
    if sym.Q != 1:
        raise ValueError("use gl2_act for symbols carrying B_Q")
    return KatoEisSymbol(sym.m, sym.g1 * a + sym.g2 * c, sym.g1 * b + sym.g2 * d, 1)


def _mat_mul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def _upper_factor(M):
    """Write integral M (det > 0) as gamma * D with gamma in SL_2(Z), D upper triangular."""
    (a, b), (c, d) = M
    # row operations on the first column (left multiplication by SL_2(Z))
    E = ((1, 0), (0, 1))
    A = M
    while A[1][0] != 0:
        q = A[0][0] // A[1][0]
        # rows: r0 <- r0 - q r1, then swap with sign to stay in SL_2
        T = ((1, -q), (0, 1))
        A = _mat_mul(T, A)
        E = _mat_mul(T, E)
        S = ((0, -1), (1, 0))
        A = _mat_mul(S, A)
        E = _mat_mul(S, E)
    if A[0][0] < 0:
        A = _mat_mul(((-1, 0), (0, -1)), A)
        E = _mat_mul(((-1, 0), (0, -1)), E)
    q = A[0][1] // A[1][1]
    T = ((1, -q), (0, 1))
    A = _mat_mul(T, A)
    E = _mat_mul(T, E)
    # E M = A, so M = E^{-1} A
    (e0, e1), (e2, e3) = E
    gamma = ((e3, -e1), (-e2, e0))
    return gamma, A


def gl2_act(sym: KatoEisSymbol, M):
    """(F|B_Q)|_m M = factor * F_{(a,b) gamma}|B_{Q'} for integral M of positive determinant.

    Uses diag(Q,1) M = gamma * lam * diag(Q', 1); other shapes are rejected.
    Returns (symbol, factor).
    """
    m, Q = sym.m, sym.Q
    DM = _mat_mul(((Q, 0), (0, 1)), M)
    gamma, D = _upper_factor(DM)
    (d0, d1), (_, d3) = D
    if d1 != 0 or d0 % d3:
        raise ValueError(f"unsupported matrix shape: upper factor {D}")
    lam, Q2 = d3, d0 // d3
    chk = _mat_mul(gamma, ((lam * Q2, 0), (0, lam)))
    if chk != DM or gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0] != 1:
        raise AssertionError("matrix factorisation failed")
    base = sl2_act(KatoEisSymbol(m, sym.g1, sym.g2, 1), gamma)
    # B_Q = Q^{1-m} |diag(Q,1);  |lam I = lam^{m-2};  |diag(Q',1) = Q'^{m-1} B_{Q'}
    factor = Fraction(Q) ** (1 - m) * Fraction(lam) ** (m - 2) * Fraction(Q2) ** (m - 1)
    return KatoEisSymbol(m, base.g1, base.g2, Q2), factor


# ---------------------------------------------------------------------------
# rendering


def _render_terms(sym: KatoEisSymbol, prec: int):
    """Coefficients as dicts {root-of-unity exponent mod L: rational}, plus L."""
    key = (sym, prec)
    if CACHE_ENABLED:
        with _cache_lock:
            hit = _cache.get(key)
        if hit is not None:
            return hit
    m, a, b, Q = sym.m, sym.g1, sym.g2, sym.Q
    Da = a.denominator
    if Q % Da:
        raise ValueError(f"B_{Q} does not clear the denominator of {a}")
    step = Q // Da
    L = b.denominator
    Bn = b.numerator
    out = [dict() for _ in range(prec)]
    c0 = kato_constant_term(m, a)
    if prec and c0:
        out[0][0] = c0
    for sign, A, eb in ((1, a.numerator % Da, Bn), ((-1) ** m, (-a.numerator) % Da, -Bn)):
        d = A if A else Da
        while d * step < prec:
            w = sign * Fraction(d, Da) ** (m - 1)
            e = 1
            while d * e * step < prec:
                n = d * e * step
                j = (eb * e) % L
                bucket = out[n]
                bucket[j] = bucket.get(j, 0) + w
                e += 1
            d += Da
    res = (L, out)
    if CACHE_ENABLED:
        with _cache_lock:
            _cache[key] = res
    return res


def clear_cache():
    with _cache_lock:
        _cache.clear()


def kato_q_expansion(obj, prec: int, level: Optional[int] = None) -> QExpansion:
    """q-expansion of a symbol or a combination, coefficients in a common Q(zeta_L)."""
    comb = obj if isinstance(obj, KatoCombination) else KatoCombination({obj: 1})
    rendered = []
    L = 1
    m = None
    for sym, c in comb.terms.items():
        if sym.m == 1:
            import warnings
            warnings.warn("weight-1 Kato series are experimental", stacklevel=2)
        Lsym, terms = _render_terms(sym, prec)
        rendered.append((Lsym, terms, c))
        L = lcm(L, Lsym, c.field.M if isinstance(c, CyclotomicElement) else 1)
        m = sym.m
    F = CyclotomicField(L)
    coeffs = []
    for n in range(prec):
        acc = F.zero()
        for Lsym, terms, c in rendered:
            bucket = terms[n]
            if bucket:
                scale = L // Lsym
                val = F.from_exponents({j * scale: v for j, v in bucket.items()})
                acc = acc + val * c
        coeffs.append(acc)
    return QExpansion(tuple(coeffs), m, level or 1)


# ---------------------------------------------------------------------------
# the families


def _extend_char(chi: DirichletCharacter, p: int, r: int) -> DirichletCharacter:
    if chi.modulus == p ** r:
        return chi
    if (p ** r) % chi.modulus:
        raise ValueError(f"character modulus {chi.modulus} is not a power of {p} up to {p}^{r}")
    return chi.extend(p ** r)


def _char_r(chi: DirichletCharacter, p: int) -> int:
    r, M = 0, chi.modulus
    while M % p == 0:
        M //= p
        r += 1
    if M != 1:
        raise ValueError("character must have p-power modulus")
    return max(r, 1)


def eis_F(m: int, chi: Optional[DirichletCharacter], N: int, p: int, prec: int) -> QExpansion:
    """The depleted family F^{[p]}_{m,chi}; no constant term, support on p not dividing n."""
    if N % p == 0:
        raise ValueError("p must not divide N")
    if chi is None or chi.is_trivial():
        F = CyclotomicField(N)
        sgn = (-1) ** m
        coeffs = [F.zero()]
        for n in range(1, prec):
            if n % p == 0:
                coeffs.append(F.zero())
                continue
            terms = {}
            for d in _divisors(n):
                w = (n // d) ** (m - 1)
                terms[d % N] = terms.get(d % N, 0) + w
                terms[(-d) % N] = terms.get((-d) % N, 0) + sgn * w
            coeffs.append(F.from_exponents(terms))
        return QExpansion(tuple(coeffs), m, N * N * p * p)
    Ft = eis_F_tilde(m, chi, N, p, prec)
    out = deplete(Ft, p)
    z = out.coeffs[0] * 0
    return out.with_tags(coeffs=(z,) + out.coeffs[1:])


def eis_E(m: int, N: int, p: int, prec: int) -> QExpansion:
    """The dual family E^{[p]}_m."""
    if N % p == 0:
        raise ValueError("p must not divide N")
    F = CyclotomicField(N)
    sgn = (-1) ** m
    coeffs = [F.zero()]
    for n in range(1, prec):
        if n % p == 0:
            coeffs.append(F.zero())
            continue
        terms = {}
        for d in _divisors(n):
            w = d ** (m - 1)
            terms[d % N] = terms.get(d % N, 0) + w
            terms[(-d) % N] = terms.get((-d) % N, 0) + sgn * w
        coeffs.append(F.from_exponents(terms))
    return QExpansion(tuple(coeffs), m, N * N * p * p)


def _divisors(n):
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def decomposition(m: int, chi: DirichletCharacter, N: int, p: int, r: int = 1) -> KatoCombination:
    """p^{r(m-1)} sum_{c mod p^r} chi(c) F_{c/p^r, 1/N} | B_{p^r}."""
    chi = _extend_char(chi, p, r)
    pr = p ** r
    comb = KatoCombination()
    scale = Fraction(p) ** (r * (m - 1))
    for c in range(pr):
        v = chi(c)
        if _is_zero(v):
            continue
        comb.add(KatoEisSymbol(m, Fraction(c, pr), Fraction(1, N), pr), v * scale)
    return comb


def eis_F_tilde_constant(m: int, chi: DirichletCharacter, N: int, p: int, r: int = 1):
    """a_0 of F~, read off from the constant term of the decomposition."""
    total = 0
    for sym, c in decomposition(m, chi, N, p, r).terms.items():
        total = total + c * kato_constant_term(m, sym.g1)
    return total


def eis_F_tilde(m: int, chi: DirichletCharacter, N: int, p: int, prec: int, r: Optional[int] = None) -> QExpansion:
    """a_0 + sum_n sum_{d|n, p not dividing d} chi(d) d^{m-1} (zeta^{n/d} + (-1)^m chi(-1) zeta^{-n/d}) q^n."""
    if N % p == 0:
        raise ValueError("p must not divide N")
    r = _char_r(chi, p) if r is None else r
    chi = _extend_char(chi, p, r)
    L = lcm(N, chi.order)
    F = CyclotomicField(L)
    sgn = (-1) ** m * chi.parity()
    sN, se = L // N, L // chi.order
    coeffs = [F(0) + eis_F_tilde_constant(m, chi, N, p, r)]
    for n in range(1, prec):
        terms = {}
        for d in _divisors(n):
            ex = chi.exponent(d)
            if ex is None or d % p == 0:
                continue
            w = d ** (m - 1)
            j = n // d
            terms[(j * sN + ex * se) % L] = terms.get((j * sN + ex * se) % L, 0) + w
            terms[(-j * sN + ex * se) % L] = terms.get((-j * sN + ex * se) % L, 0) + sgn * w
        coeffs.append(F.from_exponents(terms))
    return QExpansion(tuple(coeffs), m, N * N * p ** (2 * r))


def distribution_sides(m: int, N: int, p: int, r: int = 1):
    """Both sides of F_{0,1/(N p^r)}|B_{p^r} = p^{-r} sum_{c mod p^r} F_{0,(1+N p^r c)/(N p^{2r})}."""
    pr = p ** r
    lhs = KatoCombination({KatoEisSymbol(m, 0, Fraction(1, N * pr), pr): 1})
    rhs = KatoCombination()
    for c in range(pr):
        rhs.add(KatoEisSymbol(m, 0, Fraction(1 + N * pr * c, N * pr * pr), 1), Fraction(1, pr))
    return lhs, rhs


def atkin_lehner_W(Q: int, R: int):
    """A matrix (Qx, y; RQz, Qw) with Qxw - Ryz = 1, Qx = w = 1 mod R, y = -1, Rz = 1 mod Q."""
    from .forms import atkin_lehner_matrix
    return atkin_lehner_matrix(Q, R)


def w_route_statement(m: int, chi: DirichletCharacter, N: int, p: int, r: int = 1) -> KatoCombination:
    """p^{r(2m-3)} chi(-1) sum_c chi(c) F_{0, c/p^r + p^r/N} | B_{p^r}."""
    chi = _extend_char(chi, p, r)
    pr = p ** r
    scale = Fraction(p) ** (r * (2 * m - 3)) * chi.parity()
    comb = KatoCombination()
    for c in range(pr):
        v = chi(c)
        if _is_zero(v):
            continue
        comb.add(KatoEisSymbol(m, 0, Fraction(c, pr) + Fraction(pr, N), pr), v * scale)
    return comb


def w_route_chain(m: int, chi: DirichletCharacter, N: int, p: int, r: int = 1) -> KatoCombination:
    """F~|W_{p^{2r}}: apply the Atkin-Lehner matrix symbol by symbol to the decomposition."""
    W = atkin_lehner_W(p ** (2 * r), N)
    return decomposition(m, chi, N, p, r).act(W)


def w_p2r_on_F_tilde(m: int, chi: DirichletCharacter, N: int, p: int, r: int, prec: int,
                     route: str = "chain") -> QExpansion:
    comb = w_route_chain(m, chi, N, p, r) if route == "chain" else w_route_statement(m, chi, N, p, r)
    return kato_q_expansion(comb, prec, level=N * p ** (2 * r))


def diamond_matrix(d: int, L: int):
    """An element of Gamma_0(L) with lower-right entry d (gcd(d, L) = 1)."""
    if math.gcd(d, L) != 1:
        raise ValueError("d must be a unit mod L")
    c = L
    while math.gcd(c, d) != 1:
        c += L
    # a d - b c = 1
    a = pow(d, -1, c) if c > 1 else 1
    b = (a * d - 1) // c
    return ((a, b), (c, d))


def level_reduction_symbols(m: int, N: int, p: int, r: int = 1):
    """F_{0,1/p^r+p^r/N} and the image of F_{0,1/(N p^r)} under <N>_p <p^{2r}>_N."""
    target = KatoEisSymbol(m, 0, Fraction(1, p ** r) + Fraction(p ** r, N))
    L = N * p ** (2 * r)
    gam = diamond_matrix((N + p ** (2 * r)) % L, L)
    image = sl2_act(KatoEisSymbol(m, 0, Fraction(1, N * p ** r)), gam)
    return target, image, gam
