"""Newform eigendata and the Atkin-Lehner bookkeeping at p.

The central oracle here is :func:`oldspace_W_matrix`: the action of W_{p^c}
on the span of h|V_p^j is derived by factoring B_{p^j} W_{p^c} explicitly as
(gamma in Gamma_0(M)) * diag(p^c, p^j), so the key Dirichlet-series lemma can be
checked against something other than its own closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ._poly import LaurentSeries, Poly
from .coefficients import (CyclotomicElement, DirichletCharacter, PadicEmbedding, PadicScalar,
                           char_decompose, embed, factorint, gauss_sum, primes_up_to, scalar_from_json,
                           scalar_to_json, valuation)
from .qseries import QExpansion, U_p, V_p, sturm_bound


class IngestError(ValueError):
    """Raised when ingested data violates an invariant; names the first failing index."""


class ExternalDataRequired(ValueError):
    pass


def conj(x):
    if isinstance(x, CyclotomicElement):
        return x.conjugate()
    return x


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass
class NewformData:
    label: str
    weight: int
    level: int
    char: DirichletCharacter
    an: tuple
    ap_local: dict = field(default_factory=dict)  # p -> {"b", "lambda_pb", "lambda_tame", ...}
    sturm_ok: bool = True

    def __post_init__(self):
        self.an = tuple(self.an)
        if self.char.modulus != self.level:
            self.char = self.char.extend(self.level) if self.level % self.char.modulus == 0 else self.char

    @property
    def prec(self) -> int:
        return len(self.an)

    def a(self, n: int):
        if n >= len(self.an):
            raise IndexError(f"a_{n} not stored for {self.label} (prec {self.prec})")
        return self.an[n]

    def q_expansion(self, prec: Optional[int] = None) -> QExpansion:
        coeffs = self.an if prec is None else self.an[:prec]
        return QExpansion(coeffs, self.weight, self.level, self.char)

    # local data at p
    def b(self, p: int) -> int:
        return _vp(self.level, p)

    def tame_level(self, p: int) -> int:
        return self.level // p ** self.b(p)

    def char_parts(self, p: int):
        """(p-part, prime-to-p part) of the nebentypus."""
        b = self.b(p)
        if b == 0:
            return DirichletCharacter.trivial(1), self.char
        return char_decompose(self.char, p ** b)

    def tame_char(self, p: int) -> DirichletCharacter:
        return self.char_parts(p)[1]

    def local(self, p: int) -> dict:
        return self.ap_local.get(p, {})

    def is_crystalline(self, p: int) -> bool:
        return self.b(p) == 0

    # validation
    def validate(self):
        an = self.an
        if len(an) < 2 or an[1] != 1:
            raise IngestError(f"{self.label}: a_1 must be 1 (index 1)")
        k, chi = self.weight, self.char
        n_max = len(an)
        for l in primes_up_to(int(math.isqrt(n_max - 1))):
            c = chi(l) * l ** (k - 1)
            pw = l
            prev, cur = 1, an[l]
            while pw * l < n_max:
                nxt = an[l] * cur - c * prev
                if an[pw * l] != nxt:
                    raise IngestError(f"{self.label}: Hecke recursion fails at index {pw * l}")
                prev, cur, pw = cur, nxt, pw * l
        for m in range(2, n_max):
            for n in range(m + 1, n_max // m + 1):
                if m * n >= n_max:
                    break
                if math.gcd(m, n) == 1 and an[m * n] != an[m] * an[n]:
                    raise IngestError(f"{self.label}: multiplicativity fails at index {m * n} = {m}*{n}")
        return self

    # serialization
    def to_json(self):
        local = []
        for p, rec in sorted(self.ap_local.items()):
            local.append({"p": p, **{k: (scalar_to_json(v) if v is not None and k != "b" else v)
                                     for k, v in rec.items()}})
        return {"label": self.label, "weight": self.weight, "level": self.level,
                "char": self.char.to_json(), "an": [scalar_to_json(x) for x in self.an],
                "ap_local": local, "sturm_ok": self.sturm_ok}

    @staticmethod
    def from_json(obj, validate: bool = True):
        for key in ("label", "weight", "level", "char", "an"):
            if key not in obj:
                raise IngestError(f"newform record missing field {key!r}")
        local = obj.get("ap_local") or []
        if isinstance(local, dict):
            local = [local]
        ap_local = {}
        for rec in local:
            rec = dict(rec)
            p = rec.pop("p", None)
            if p is None:
                raise IngestError("ap_local entries must name their prime 'p'")
            ap_local[int(p)] = {k: (scalar_from_json(v) if v is not None and k != "b" else v)
                                for k, v in rec.items()}
        an = [scalar_from_json(x) for x in obj["an"]]
        f = NewformData(obj["label"], int(obj["weight"]), int(obj["level"]),
                        DirichletCharacter.from_json(obj["char"]), tuple(an), ap_local,
                        obj.get("sturm_ok", True))
        if len(an) < sturm_bound(f.weight, f.level) + 1:
            f.sturm_ok = False
        for p, rec in ap_local.items():
            if "b" in rec and rec["b"] is not None and int(rec["b"]) != f.b(p):
                raise IngestError(f"{f.label}: declared b={rec['b']} at p={p} but level gives {f.b(p)}")
        return f.validate() if validate else f


def from_hecke_eigenvalues(label, k, level, char, ap: dict, prec: int, ap_local=None) -> NewformData:
    """Build a_n for n < prec from prime eigenvalues via the Hecke recursion and multiplicativity."""
    an = [0] * prec
    if prec > 1:
        an[1] = 1
    ppow = {}
    for l in primes_up_to(prec - 1):
        if l not in ap:
            raise ValueError(f"missing a_{l}")
        c = char(l) * l ** (k - 1)
        vals = [1, ap[l]]
        while l ** len(vals) < prec:
            vals.append(ap[l] * vals[-1] - c * vals[-2])
        ppow[l] = vals
    for n in range(2, prec):
        val = 1
        for l, e in factorint(n).items():
            val = val * ppow[l][e]
        an[n] = val
    return NewformData(label, k, level, char, tuple(an), dict(ap_local or {}))


# ---------------------------------------------------------------------------
# roots and stabilisation


def _to_padic(x, p, emb, prec):
    if isinstance(x, PadicScalar):
        return x
    if isinstance(x, CyclotomicElement) and not x.is_rational():
        if emb is None:
            raise ValueError("a p-adic embedding is needed for non-rational values")
        return embed(emb, x)
    if isinstance(x, CyclotomicElement):
        x = x.to_rational()
    return PadicScalar.make(p, x, prec)


def hecke_roots(f: NewformData, p: int, emb: Optional[PadicEmbedding] = None, prec: int = 30):
    """Unit root alpha and beta = eps(p) p^{k-1} / alpha of X^2 - a_p X + eps(p) p^{k-1}."""
    if f.b(p) > 0:
        raise ValueError(f"{f.label} is not crystalline at {p}: use a_p as the single U_p eigenvalue")
    if emb is not None:
        prec = emb.prec
    ap = _to_padic(f.a(p), p, emb, prec)
    e = _to_padic(f.char(p), p, emb, prec) * p ** (f.weight - 1)
    if ap.is_zero() or ap.val > 0:
        raise ValueError(f"{f.label} is not ordinary at {p}")
    x = ap
    for _ in range(4 * prec + 8):
        fx = x * x - ap * x + e
        step = fx / (x + x - ap)
        nxt = x - step
        if nxt == x and step.is_zero():
            break
        x = nxt
    alpha = x.with_prec(prec)
    beta = e / alpha
    return alpha, beta


def exact_roots(f: NewformData, p: int):
    """Rational (alpha, beta) when the Hecke polynomial splits over Q, else None."""
    ap = f.a(p)
    if isinstance(ap, CyclotomicElement):
        if not ap.is_rational():
            return None
        ap = ap.to_rational()
    ev = f.char(p)
    if isinstance(ev, CyclotomicElement):
        if not ev.is_rational():
            return None
        ev = ev.to_rational()
    e = Fraction(ev) * p ** (f.weight - 1)
    disc = Fraction(ap) ** 2 - 4 * e
    if disc < 0:
        return None
    rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
    if rn * rn != disc.numerator or rd * rd != disc.denominator:
        return None
    r = Fraction(rn, rd)
    r1, r2 = (ap + r) / 2, (ap - r) / 2
    # the unit root first
    if r1 != 0 and valuation(r1, p) == 0:
        return r1, r2
    return r2, r1


def p_stabilise(f: NewformData, p: int, beta, alpha=None, prec: Optional[int] = None) -> QExpansion:
    """f_alpha = f - beta V_p f, checked to be a U_p eigenform on the stored range."""
    if f.b(p) > 0:
        raise ValueError("p-stabilisation needs a crystalline form")
    F = f.q_expansion(prec)
    if isinstance(beta, PadicScalar):
        F = F.map(lambda c: _to_padic(c, p, None, beta.prec + beta.val))
    fa = F - V_p(F, p).scale(beta)
    fa = fa.with_tags(level=f.level * p)
    if alpha is not None:
        U = U_p(fa, p)
        if not (U == fa.truncate(U.prec).scale(alpha)):
            raise ValueError("p-stabilisation is not a U_p eigenform; check the roots")
        if U.prec < sturm_bound(f.weight, f.level * p):
            warnings.warn("precision too small to verify the eigen-property up to the Sturm bound")
    return fa


def conjugate_star(f: NewformData) -> NewformData:
    local = {p: {k: (conj(v) if k != "b" else v) for k, v in rec.items()} for p, rec in f.ap_local.items()}
    return NewformData(f.label + "*" if not f.label.endswith("*") else f.label[:-1], f.weight, f.level,
                       f.char.inverse(), tuple(conj(a) for a in f.an), local, f.sturm_ok)


# ---------------------------------------------------------------------------
# Atkin-Lehner pseudo-eigenvalues


def al_pseudo_eigenvalue_p(f: NewformData, p: int, emb=None):
    """lambda_{p^a}(f) in the normalisation where pseudo-eigenvalues are strictly multiplicative.

    Computed from the Atkin-Li formulas and converted by psi_p(-1) psi(p^a);
    other cases must be ingested.
    """
    a = f.b(p)
    if a == 0:
        return 1
    stored = f.local(p).get("lambda_pb")
    psi_p, psi = f.char_parts(p)
    alpha = f.a(p)
    k = f.weight
    if psi_p.is_trivial() and a == 1:
        lam_al = Fraction(-p ** (k - 2)) / alpha if not isinstance(alpha, CyclotomicElement) \
            else (alpha.inverse() * (-p ** (k - 2)))
    elif psi_p.conductor() == p ** a:
        G = gauss_sum(psi_p.primitive())
        lam_al = G * (p ** (k - 2)) ** a / alpha ** a
    else:
        if stored is not None:
            return stored
        raise ExternalDataRequired(f"{f.label}: lambda_{{{p}^{a}}} is outside the Atkin-Li formulas; "
                                   "external data required")
    return lam_al * psi_p(-1) * psi(p ** a)


def lambda_tame(f: NewformData, p: int):
    """lambda of f at its prime-to-p level (ingested; 1 for tame level 1)."""
    M = f.tame_level(p)
    rec = f.local(p)
    if rec.get("lambda_tame") is not None:
        return rec["lambda_tame"]
    if M == 1:
        return 1
    raise ExternalDataRequired(f"{f.label}: tame Atkin-Lehner pseudo-eigenvalue must be ingested")


# ---------------------------------------------------------------------------
# W_{p^c} on the p-oldspace of a crystalline form


def _mat_mul2(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def atkin_lehner_matrix(Q: int, M: int, w_divisor: int = 1):
    """A matrix (Qx, y; MQz, Qw) with Qxw - Myz = 1, Qx = w = 1 mod M, y = -1, Mz = 1 mod Q.

    ``w_divisor`` forces w to be divisible by a power of p coprime to M (needed
    when factoring B_{p^j} W_{p^c} with j > c).
    """
    for z in range(1, 50 * max(Q, 2) * max(M, 2)):
        if (M * z - 1) % Q or math.gcd(M * z, w_divisor) != 1:
            continue
        wp = pow(w_divisor, -1, M) if M > 1 else 1
        if math.gcd(z, wp) != 1:
            wp += M * next(t for t in range(1, 100) if math.gcd(z, wp + M * t) == 1)
        w = w_divisor * wp
        mod = Q * w
        # y = -1 mod Q and 1 + M y z = 0 mod Q w
        y = (-pow(M * z, -1, mod)) % mod
        assert (y + 1) % Q == 0
        x, r = divmod(1 + M * y * z, Q * w)
        assert r == 0
        mat = ((Q * x, y), (M * Q * z, Q * w))
        assert Q * x * w - M * y * z == 1 and (Q * x - 1) % M == 0 and (w - 1) % M == 0
        return mat
    raise RuntimeError("no Atkin-Lehner matrix found")


def w_coefficient(p: int, M: int, c: int, j: int, l: int, chi: DirichletCharacter):
    """Scalar s with (h|V^j)|W_{p^c} = s * h|V^{c-j}, h of level M, weight l, character chi.

    V^{c-j} for j > c means the formal substitution q -> q^{p^{c-j}}.
    Derived by writing B_{p^j} W = gamma diag(p^c, p^j) with gamma in Gamma_0(M).
    """
    Q = p ** c
    e = max(j - c, 0)
    W = atkin_lehner_matrix(Q, M, p ** e)
    BW = _mat_mul2(((p ** j, 0), (0, 1)), W)
    # gamma = BW * diag(p^-c, p^-j)
    g = ((Fraction(BW[0][0], p ** c), Fraction(BW[0][1], p ** j)),
         (Fraction(BW[1][0], p ** c), Fraction(BW[1][1], p ** j)))
    if any(x.denominator != 1 for row in g for x in row):
        raise AssertionError("factorisation is not integral")
    a_, b_, c_, d_ = (int(g[0][0]), int(g[0][1]), int(g[1][0]), int(g[1][1]))
    if a_ * d_ - b_ * c_ != 1 or c_ % M:
        raise AssertionError("factor is not in Gamma_0(M)")
    # V^j h = p^{-j(l-1)} h|diag(p^j,1);  h|diag(p^c,p^j) = p^{(c+j)(l-1) - j l} h(p^{c-j} tau)
    return chi(d_) * Fraction(p) ** ((c + j) * (l - 1) - j * l - j * (l - 1))


def oldspace_W_matrix(h: NewformData, p: int, c: int):
    """Matrix of W_{p^c} on the basis h|V^j (0 <= j <= c); column j is the image of h|V^j."""
    if h.level % p == 0:
        raise ValueError("oldspace_W_matrix needs p coprime to the level")
    n = c + 1
    W = [[0] * n for _ in range(n)]
    for j in range(n):
        W[c - j][j] = w_coefficient(p, h.level, c, j, h.weight, h.char)
    return W


def check_W_involution(h: NewformData, p: int, c: int) -> bool:
    """W^2 = chi(p)^c p^{c(l-2)} on the span."""
    from ._linalg import mat_mul
    W = oldspace_W_matrix(h, p, c)
    W2 = mat_mul(W, W)
    s = h.char(p) ** c * Fraction(p) ** (c * (h.weight - 2))
    return all(W2[i][j] == (s if i == j else 0) for i in range(c + 1) for j in range(c + 1))


def p_poly(h: NewformData, p: int) -> Poly:
    """P_p(h, X) with P_p(h, X)^{-1} = sum_u a_{p^u}(h) X^u."""
    if h.b(p) > 0:
        return Poly([1, -h.a(p)])
    return Poly([1, -h.a(p), h.char(p) * p ** (h.weight - 1)])


def _lambda_pb(h, p, b, lambda_pb):
    if lambda_pb is not None:
        return lambda_pb
    if b == 0:
        return 1
    return al_pseudo_eigenvalue_p(h, p)


def depleted_W_series(h: NewformData, p: int, b: int, c: int, degree: Optional[int] = None,
                      lambda_pb=None) -> LaurentSeries:
    """Closed form of sum_u X^u a_{p^u}(h^{[p]}_{eps^{-1}} | W_{p^{b+c}}) up to X^degree.

    It is eps^{-1}(p^{b+c}) lambda_{p^b}(h) (p^{l-1} X)^c P_p(h, p^{-l}/X) / P_p(h*, X)
    with eps the prime-to-p nebentypus of h.
    """
    if b != h.b(p):
        raise ValueError(f"b={b} but {h.label} is new at p^{h.b(p)}")
    degree = c if degree is None else degree
    l = h.weight
    eps = h.tame_char(p)
    lam = _lambda_pb(h, p, b, lambda_pb)
    pre = lam * (1 / _as_field(eps(p ** (b + c)))) * Fraction(p) ** ((l - 1) * c)
    P = p_poly(h, p)
    # P(h, p^{-l} X^{-1}) = sum_i P_i p^{-l i} X^{-i}
    num = {-i: P[i] * Fraction(p) ** (-l * i) for i in range(P.degree + 1)}
    span = degree - (c - P.degree)
    inv = p_poly(conjugate_star(h), p).reciprocal_series(max(span, 0))
    terms = {}
    for e_num, cn in num.items():
        for u, cu in enumerate(inv):
            e = c + e_num + u
            if e > degree:
                break
            terms[e] = terms.get(e, 0) + pre * cn * cu
    return LaurentSeries(terms, degree)


def _as_field(x):
    return Fraction(x) if isinstance(x, int) else x


def depleted_W_series_oracle(h: NewformData, p: int, c: int, degree: Optional[int] = None) -> LaurentSeries:
    """The same series computed from q-expansion data and the W-matrix (b = 0 only).

    Uses h^{[p]}_{eps^{-1}} = (h*)^{[p]} on p^u and (h*)^{[p]} = h* - a_p(h*) V h* + eps*(p) p^{l-1} V^2 h*.
    """
    if h.b(p) != 0:
        raise ValueError("the oracle route is restricted to crystalline forms")
    degree = c if degree is None else degree
    hs = conjugate_star(h)
    l = hs.weight
    vmax = 0
    while p ** (vmax + 1) < hs.prec:
        vmax += 1
    S = [hs.a(p ** v) for v in range(vmax + 1)]
    if degree > c - 2 + vmax:
        raise ValueError(f"stored coefficients only determine the series to X^{c - 2 + vmax}")
    comb = [1, -hs.a(p), hs.char(p) * p ** (l - 1)]
    terms = {}
    for j, cj in enumerate(comb):
        w = w_coefficient(p, hs.level, c, j, l, hs.char)
        shift = c - j
        for v, sv in enumerate(S):
            e = shift + v
            if e > degree:
                break
            terms[e] = terms.get(e, 0) + cj * w * sv
    return LaurentSeries(terms, degree)


# ---------------------------------------------------------------------------
# classical points


@dataclass
class PointSpec:
    f: NewformData
    g: NewformData
    t: int
    p: int
    N: int
    r: Optional[int] = None

    def __post_init__(self):
        k, l = self.f.weight, self.g.weight
        if self.N % self.p == 0:
            raise ValueError("p must not divide N")
        if not 0 <= self.t <= k - l - 1:
            raise ValueError(f"t={self.t} outside [0, k-l-1] = [0, {k - l - 1}]")
        if k < 2 or l < 1:
            raise ValueError("need k >= 2 and l >= 1")
        for h in (self.f, self.g):
            if self.N % h.tame_level(self.p):
                raise ValueError(f"N={self.N} is not divisible by the tame level of {h.label}")
        if self.r is None:
            self.r = max(self.f.b(self.p), 1) + 1

    @property
    def k(self):
        return self.f.weight

    @property
    def l(self):
        return self.g.weight

    @property
    def m(self) -> int:
        return self.k - self.l - 2 * self.t

    @property
    def crystalline_f(self) -> bool:
        return self.f.b(self.p) == 0

    @property
    def crystalline_g(self) -> bool:
        return self.g.b(self.p) == 0

    @property
    def in_sigma(self) -> bool:
        return self.m >= 1

    @property
    def in_sigma_dual(self) -> bool:
        return self.in_sigma and self.crystalline_f and self.crystalline_g

    def describe(self) -> dict:
        return {"f": self.f.label, "g": self.g.label, "k": self.k, "l": self.l, "t": self.t,
                "p": self.p, "N": self.N, "m": self.m, "r": self.r,
                "crystalline_f": self.crystalline_f, "crystalline_g": self.crystalline_g}


def correction_term(point: PointSpec, alpha, validate: bool = False, depth: int = 8):
    """Closed form of sum_{n in S(pN)} a_n((f_beta|W_{N_1})*) a_n(g^{[pN]}_{eps^{-1}}|W_{p^{2r}}) n^s.

    With ``validate`` the closed form is also checked formally: the truncated
    key-lemma series times P_p(g*, X) must reproduce the numerator polynomial.
    The numeric direct sum is a divergent series in general and is not used.
    """
    f, g, p = point.f, point.g, point.p
    l, t, r = point.l, point.t, point.r
    b = g.b(p)
    s = -l - t
    lam_f = conj(lambda_tame(f, p))
    eps = g.tame_char(p)
    lam_g = al_pseudo_eigenvalue_p(g, p) if b else 1
    X0 = alpha * Fraction(p) ** s
    Pg = p_poly(g, p)
    Pgs = p_poly(conjugate_star(g), p)
    val = (lam_f * (1 / _as_field(eps(p ** (2 * r)))) * lam_g * (alpha * Fraction(p) ** (s + l - 1)) ** (2 * r - b)
           * Pg(Fraction(p) ** (-l - s) / alpha) / Pgs(X0))
    if not validate:
        return val
    c = 2 * r - b
    ser = depleted_W_series(g, p, b, c, degree=c + depth)
    low = ser.low()
    coeffs = [ser[e] for e in range(low, c + depth + 1)]
    prod = {}
    for i, x in enumerate(coeffs):
        for j in range(Pgs.degree + 1):
            e = low + i + j
            if e <= c + depth:
                prod[e] = prod.get(e, 0) + x * Pgs[j]
    pre = lam_g * (1 / _as_field(eps(p ** (b + c)))) * Fraction(p) ** ((l - 1) * c)
    expected = {c - i: pre * Pg[i] * Fraction(p) ** (-l * i) for i in range(Pg.degree + 1)}
    ok = all(prod.get(e, 0) == expected.get(e, 0) for e in set(prod) | set(expected))
    return val, {"formal_check": ok, "depth": depth, "exponent": c}
