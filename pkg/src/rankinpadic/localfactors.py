"""Local Euler factors at p and at bad primes, and local gamma factors.

Crystalline computations use an explicit Frobenius matrix: the companion
matrix C_g of X^2 - b_p X + eps(p) p^{l-1} stands for phi on D_cris(rho_g),
and every filtered piece of V = V_f (x) V_g^*(1+t) gets its phi as a scalar
multiple of C_g or C_g^{-1}.  Determinants of these matrices are compared to
the polynomial values P_p(g, .) and P_p(g*, .).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import _linalg
from ._poly import Poly
from .coefficients import CyclotomicElement, gauss_sum
from .forms import NewformData, p_poly

__all__ = ["p_poly", "reciprocal_check", "rankin_P4", "rankin_P4_sym", "CrysLocalData", "crys_identities",
           "modified_factor", "modified_factor_ratio", "modified_factor_dual", "adjoint_factor",
           "euler_E", "euler_E_star", "gamma_from_L", "WeilDeligneDatum", "RationalFunction",
           "tame_gamma", "gamma_product", "random_crys_data", "random_wd_datum"]


def reciprocal_check(h: NewformData, p: int, depth: int = 8) -> dict:
    """Compare 1/P_p(h, X) with the stored a_{p^u}, u <= depth."""
    avail = 0
    while p ** (avail + 1) < h.prec:
        avail += 1
    depth_used = min(depth, avail)
    series = p_poly(h, p).reciprocal_series(depth_used)
    bad = [u for u in range(depth_used + 1) if series[u] != h.a(p ** u)]
    return {"label": h.label, "p": p, "depth": depth_used, "requested": depth, "ok": not bad and
            depth_used >= depth, "first_failure": bad[0] if bad else None}


def rankin_P4(f_roots, g_roots) -> Poly:
    """prod_{i,j} (1 - r_i s_j X)."""
    out = Poly([1])
    for r in f_roots:
        for s in g_roots:
            out = out * Poly([1, -r * s])
    return out


def rankin_P4_sym(a, e1, b, e2) -> Poly:
    """The same product from traces and determinants (a, e1) of f and (b, e2) of g."""
    return Poly([1, -a * b, a * a * e2 + b * b * e1 - 2 * e1 * e2, -a * b * e1 * e2, e1 * e1 * e2 * e2])


# ---------------------------------------------------------------------------
# crystalline data


@dataclass(frozen=True)
class CrysLocalData:
    p: int
    k: int
    l: int
    t: int
    alpha: object
    psi_p: object  # psi(p): alpha * beta = psi(p) p^{k-1}
    bp: object  # b_p = a_p(g)
    eps_p: object  # eps(p) for g

    @property
    def beta(self):
        return self.psi_p * Fraction(self.p) ** (self.k - 1) / self.alpha

    @property
    def g_det(self):
        return self.eps_p * Fraction(self.p) ** (self.l - 1)

    def P_g(self, X):
        return 1 - self.bp * X + self.g_det * X * X

    def P_gstar(self, X):
        # b(g*) = b/eps, eps(g*) = 1/eps
        return 1 - (self.bp / self.eps_p) * X + (1 / self.eps_p) * Fraction(self.p) ** (self.l - 1) * X * X

    def companion(self):
        """Frobenius on D_cris(rho_g): char poly X^2 - b_p X + eps(p) p^{l-1}."""
        z = self.bp * 0
        return [[z, -self.g_det], [z + 1, self.bp]]

    def f_roots(self):
        return (self.alpha, self.beta)

    def fstar_roots(self):
        # complex conjugates of alpha, beta
        q = Fraction(self.p) ** (self.k - 1)
        return (q / self.alpha, q / self.beta)


def _det2(M):
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def _one_minus(M):
    return [[(1 if i == j else 0) - M[i][j] for j in range(2)] for i in range(2)]


def _inv2(M):
    d = _det2(M)
    return [[M[1][1] / d, -M[0][1] / d], [-M[1][0] / d, M[0][0] / d]]


def _scale(c, M):
    return [[c * x for x in row] for row in M]


def _dual_twist(p, M):
    """phi on D_cris(W^*(1)) from phi on D_cris(W): p^{-1} (phi^T)^{-1}."""
    return _scale(Fraction(1, p), _linalg.transpose(_inv2(M)))


def frobenius_pieces(d: CrysLocalData) -> dict:
    """phi on D_cris of V^+, V/V^+, (V^*(1))^+ and V^*(1)/(V^*(1))^+."""
    p, t = d.p, d.t
    Cinv = _inv2(d.companion())
    Vplus = _scale(d.alpha * Fraction(p) ** (-1 - t), Cinv)
    Vquot = _scale(d.beta * Fraction(p) ** (-1 - t), Cinv)
    return {"V+": Vplus, "V/V+": Vquot, "V*(1)+": _dual_twist(p, Vquot), "V*(1)/+": _dual_twist(p, Vplus)}


def crys_identities(d: CrysLocalData) -> dict:
    """The four determinant identities, each as {'poly': ..., 'det': ..., 'ok': bool}."""
    p, l, t = d.p, d.l, d.t
    al, be = d.alpha, d.beta
    ph = frobenius_pieces(d)
    x = al * Fraction(p) ** (-1 - t)
    pivot = (x * x - d.bp * x + d.g_det) / d.g_det
    out = {}
    # (1) P(g*, p^{-(l+t)} alpha) = det(1 - phi | V^+)
    out["1"] = {"poly": d.P_gstar(Fraction(p) ** (-l - t) * al), "det": _det2(_one_minus(ph["V+"])),
                "pivot": pivot}
    # (2) P(g, p^t / alpha) = det(1 - p^{-1} phi^{-1} | V^+)
    out["2"] = {"poly": d.P_g(Fraction(p) ** t / al),
                "det": _det2(_one_minus(_scale(Fraction(1, p), _inv2(ph["V+"]))))}
    # (3) P(g*, p^{-(l+t)} beta) = det(1 - phi | V/V^+)
    out["3"] = {"poly": d.P_gstar(Fraction(p) ** (-l - t) * be), "det": _det2(_one_minus(ph["V/V+"]))}
    # (4) P(g, p^t / beta) = det(1 - phi | (V^*(1))^+)
    out["4"] = {"poly": d.P_g(Fraction(p) ** t / be), "det": _det2(_one_minus(ph["V*(1)+"]))}
    for rec in out.values():
        rec["ok"] = rec["poly"] == rec["det"] and rec.get("pivot", rec["det"]) == rec["det"]
    return out


def P4_f_gstar(d: CrysLocalData, s):
    """P_p(f, g*, s) from root pairs: f roots (alpha, beta), g* via traces."""
    q = Fraction(d.p) ** (-s)
    b_star = d.bp / d.eps_p
    e_star = (1 / d.eps_p) * Fraction(d.p) ** (d.l - 1)
    return rankin_P4_sym(d.alpha + d.beta, d.alpha * d.beta, b_star, e_star)(q)


def P4_fstar_g(d: CrysLocalData, s):
    q = Fraction(d.p) ** (-s)
    r1, r2 = d.fstar_roots()
    return rankin_P4_sym(r1 + r2, r1 * r2, d.bp, d.g_det)(q)


def modified_factor(d: CrysLocalData):
    """det(1 - p^{-1} phi^{-1} | V^+) * det(1 - phi | V/V^+), via the Frobenius matrices."""
    ph = frobenius_pieces(d)
    return (_det2(_one_minus(_scale(Fraction(1, d.p), _inv2(ph["V+"]))))
            * _det2(_one_minus(ph["V/V+"])))


def modified_factor_ratio(d: CrysLocalData):
    """(P(g, p^t/alpha) / P(g*, alpha p^{-l-t})) * P_p(f, g*, l+t)."""
    p, l, t = d.p, d.l, d.t
    den = d.P_gstar(d.alpha * Fraction(p) ** (-l - t))
    if den == 0:
        raise ZeroDivisionError("exceptional zero at this point")
    return d.P_g(Fraction(p) ** t / d.alpha) / den * P4_f_gstar(d, l + t)


def modified_factor_dual(d: CrysLocalData):
    """(P(g*, p^{-l-t} beta) / P(g, p^t / beta)) * P_p(f*, g, k-1-t)."""
    p, l, t, k = d.p, d.l, d.t, d.k
    den = d.P_g(Fraction(p) ** t / d.beta)
    if den == 0:
        raise ZeroDivisionError("exceptional zero at this point")
    return d.P_gstar(Fraction(p) ** (-l - t) * d.beta) / den * P4_fstar_g(d, k - 1 - t)


def random_crys_data(rng: random.Random, p: int) -> CrysLocalData:
    """Random admissible crystalline data; alpha a p-unit, alpha*beta = psi(p) p^{k-1}."""
    l = rng.randint(1, 6)
    k = l + 1 + rng.randint(1, 6)
    t = rng.randint(0, k - l - 1)

    def unit():
        while True:
            num, den = rng.randint(-60, 60), rng.randint(1, 40)
            if num and num % p and den % p:
                return Fraction(num, den)

    alpha = unit()
    psi_p = rng.choice([1, -1])
    eps_p = rng.choice([1, -1])
    bp = Fraction(rng.randint(-90, 90), rng.randint(1, 12))
    return CrysLocalData(p, k, l, t, alpha, Fraction(psi_p), bp, Fraction(eps_p))


# ---------------------------------------------------------------------------
# adjoint factor


def adjoint_factor(f: NewformData, p: int, alpha):
    """E^ad(f_alpha) in its three cases."""
    a = f.b(p)
    k = f.weight
    psi_p, psi = f.char_parts(p)
    if a == 0:
        beta = psi(p) * Fraction(p) ** (k - 1) / alpha
        return (1 - beta / alpha) * (1 - beta / (p * alpha))
    u = psi(p) * Fraction(p) ** (k - 2) / (alpha * alpha)
    if a == 1 and psi_p.is_trivial():
        return Fraction(-1, p - 1) * u
    G = gauss_sum(psi_p.primitive())
    return G * (Fraction(p) ** (1 - a) / (p - 1)) * u ** a


def euler_E(beta, alpha, p):
    """E(f_alpha) = 1 - beta/(p alpha) (adopted convention)."""
    return 1 - beta / (p * alpha)


def euler_E_star(beta, alpha):
    """E*(f_alpha) = 1 - beta/alpha (adopted convention)."""
    return 1 - beta / alpha


# ---------------------------------------------------------------------------
# gamma factors


def gamma_from_L(L_self: Poly, L_dual: Poly, eps, s, w, q):
    """eps * L_dual(w - s) / L_self(s) where L(s) = 1/P(q^{-s}).

    ``L_self`` and ``L_dual`` are the reciprocal polynomials P in q^{-s}.
    """
    X_self = Fraction(q) ** (-s)
    X_dual = Fraction(q) ** (-(w - s))
    num = L_self(X_self)
    den = L_dual(X_dual)
    if num == 0 or den == 0:
        raise ZeroDivisionError("pole of a local factor at this point")
    return eps * num / den


class RationalFunction:
    """num(X)/den(X) with exact coefficients."""

    def __init__(self, num: Poly, den: Poly):
        if den.degree < 0:
            raise ZeroDivisionError("gamma undefined at this specialization")
        self.num, self.den = num, den

    def __call__(self, X):
        d = self.den(X)
        if d == 0:
            raise ZeroDivisionError("gamma undefined at this specialization")
        return self.num(X) / d

    def subs_scale(self, x):
        return RationalFunction(self.num.scale_var(x), self.den.scale_var(x))

    def __mul__(self, other):
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __eq__(self, other):
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        return f"({self.num}) / ({self.den})"


def _mat_is_equal(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


@dataclass
class WeilDeligneDatum:
    dim: int
    frob_inv: list
    tame_gen: list
    swan: int
    eps0: object
    residue: int

    def validate(self):
        n = self.dim
        for name, M in (("frob_inv", self.frob_inv), ("tame_gen", self.tame_gen)):
            if len(M) != n or any(len(r) != n for r in M):
                raise ValueError(f"{name} must be {n}x{n}")
        if _linalg.det(self.tame_gen) == 0:
            raise ValueError("tame_gen is not invertible")
        F, S = self.frob_inv, self.tame_gen
        lhs = _linalg.mat_mul(_linalg.mat_mul(F, S), _linalg.inverse(F))
        rhs = _linalg.mat_pow(S, self.residue, 1, 0)
        if not _mat_is_equal(lhs, rhs):
            raise ValueError("Weil-Deligne tame relation Frob_inv sigma Frob_inv^-1 = sigma^nu fails")
        return self

    def twist(self, x) -> "WeilDeligneDatum":
        """rep (x) unram(x): Frob_inv scales by x and eps0 by x^(Sw + dim)."""
        return WeilDeligneDatum(self.dim, _linalg.mat_scale(x, self.frob_inv), self.tame_gen, self.swan,
                                self.eps0 * Fraction(x) ** (self.swan + self.dim) if not
                                isinstance(x, CyclotomicElement) else self.eps0 * x ** (self.swan + self.dim),
                                self.residue)

    def tensor(self, other: "WeilDeligneDatum", eps0) -> "WeilDeligneDatum":
        if self.residue != other.residue:
            raise ValueError("residue fields differ")
        return WeilDeligneDatum(self.dim * other.dim, _kron(self.frob_inv, other.frob_inv),
                                _kron(self.tame_gen, other.tame_gen), 0, eps0, self.residue)

    def to_json(self):
        from .coefficients import scalar_to_json
        return {"dim": self.dim, "frob_inv": [[scalar_to_json(x) for x in r] for r in self.frob_inv],
                "tame_gen": [[scalar_to_json(x) for x in r] for r in self.tame_gen], "swan": self.swan,
                "eps0": scalar_to_json(self.eps0), "residue": self.residue}

    @staticmethod
    def from_json(obj, validate=True):
        from .coefficients import scalar_from_json
        for key in ("dim", "frob_inv", "tame_gen", "swan", "eps0", "residue"):
            if key not in obj:
                raise ValueError(f"Weil-Deligne record missing {key!r}")
        conv = lambda M: [[_frac(scalar_from_json(x)) for x in r] for r in M]
        wd = WeilDeligneDatum(int(obj["dim"]), conv(obj["frob_inv"]), conv(obj["tame_gen"]), int(obj["swan"]),
                              _frac(scalar_from_json(obj["eps0"])), int(obj["residue"]))
        return wd.validate() if validate else wd


def _frac(x):
    return Fraction(x) if isinstance(x, int) else x


def _kron(A, B):
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def _det_one_minus_X(M) -> Poly:
    """det(1 - M X) as a polynomial in X."""
    c = _linalg.charpoly(M)  # det(x - M) = sum c_j x^j
    n = len(M)
    return Poly([c[n - i] for i in range(n + 1)])


def tame_gamma(rep: WeilDeligneDatum, X=None, rank4: bool = False):
    """eps0 X^{Sw + dim} det(1 + s + ... + s^{nu-1}) det(1 - F X) / det(1 - (1 + ... + s^{nu-1}) F X).

    Here F is the geometric Frobenius matrix ``frob_inv`` and s the tame generator.
    Returns a :class:`RationalFunction`, or its value when X is given.
    """
    if rank4 and rep.dim != 4:
        raise ValueError("the Rankin-Selberg datum must have dimension 4")
    n = rep.dim
    S = rep.tame_gen
    zero = S[0][0] * 0
    acc = _linalg.identity(n, zero + 1, zero)
    total = _linalg.identity(n, zero + 1, zero)
    for _ in range(rep.residue - 1):
        acc = _linalg.mat_mul(acc, S)
        total = _linalg.mat_add(total, acc)
    c = rep.eps0 * _linalg.det(total)
    num = _det_one_minus_X(rep.frob_inv) * Poly.monomial(c, rep.swan + n)
    den = _det_one_minus_X(_linalg.mat_mul(total, rep.frob_inv))
    if den.degree < 0:
        raise ZeroDivisionError("gamma undefined at this specialization")
    rf = RationalFunction(num, den)
    return rf if X is None else rf(X)


def gamma_product(local_data: dict, X=1):
    """Product over bad primes nu of the rank-4 tame gamma factors at X."""
    out = Fraction(1)
    for nu, rep in local_data.items():
        out = out * tame_gamma(rep, rank4=True)(X)
    return out


def random_wd_datum(rng: random.Random, nu: int, max_blocks: int = 3) -> WeilDeligneDatum:
    """A random tame Weil-Deligne datum over Q with the tame relation enforced.

    Blocks are unramified characters, order-2 tame characters (nu odd) or
    Steinberg-type unipotent blocks, then conjugated by a random matrix.
    """
    def r():
        while True:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if x:
                return x

    blocks_F, blocks_S = [], []
    for _ in range(rng.randint(1, max_blocks)):
        kind = rng.choice(["unram", "tame", "steinberg"])
        if kind == "unram":
            blocks_F.append([[r()]])
            blocks_S.append([[Fraction(1)]])
        elif kind == "tame":
            blocks_F.append([[r()]])
            blocks_S.append([[Fraction(-1)]])
        else:
            a = r()
            blocks_F.append([[nu * a, Fraction(0)], [Fraction(0), a]])
            blocks_S.append([[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]])
    F = _block_diag(blocks_F)
    S = _block_diag(blocks_S)
    n = len(F)
    while True:
        P = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if _linalg.det(P) != 0:
            break
    Pi = _linalg.inverse(P)
    conjg = lambda M: _linalg.mat_mul(_linalg.mat_mul(P, M), Pi)
    return WeilDeligneDatum(n, conjg(F), conjg(S), 0, r(), nu).validate()


def _block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[o + i][o + j] = x
        o += len(b)
    return out


def unramified_eps0(F) -> object:
    """eps0 of an unramified datum: (-1)^d det(F) (the factor det(-F X | rho^I) at X = 1)."""
    return (-1) ** len(F) * _linalg.det(F)
