"""Truncated q-expansions and the operators applied to them.

A :class:`QExpansion` is an immutable list of coefficients a_0 .. a_{prec-1}
with advisory weight/level/character tags.  Operators shrink precision by
explicit rules (U_p divides it by p, T_l by l) so that nothing is silently
truncated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .coefficients import (DirichletCharacter, PadicEmbedding, embed, factorint, join_ring_tags,
                           lcm, ring_tag, scalar_from_json, scalar_to_json)


@dataclass(frozen=True)
class QExpansion:
    coeffs: tuple
    weight: object = None
    level: int = 1
    character: Optional[DirichletCharacter] = None
    ring: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        tag = "QQ"
        for c in self.coeffs:
            t = ring_tag(c)
            if t != tag:
                tag = join_ring_tags(tag, t)
        if self.ring and self.ring != tag:
            tag = join_ring_tags(self.ring, tag)
        object.__setattr__(self, "ring", tag)

    @classmethod
    def from_coeffs(cls, coeffs, weight=None, level=1, character=None):
        return cls(tuple(coeffs), weight, level, character)

    @classmethod
    def zero(cls, prec, weight=None, level=1):
        return cls((0,) * prec, weight, level)

    @classmethod
    def monomial(cls, n, prec, coeff=1, weight=None, level=1):
        return cls(tuple(coeff if i == n else 0 for i in range(prec)), weight, level)

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.coeffs[n]
        if n >= self.prec:
            raise IndexError(f"coefficient {n} beyond precision {self.prec}")
        return self.coeffs[n]

    def __len__(self):
        return self.prec

    def truncate(self, prec):
        if prec > self.prec:
            raise ValueError(f"cannot raise precision {self.prec} to {prec}")
        return replace(self, coeffs=self.coeffs[:prec])

    def with_tags(self, **kw):
        return replace(self, **kw)

    def map(self, func):
        return replace(self, coeffs=tuple(func(c) for c in self.coeffs), ring="")

    def is_zero(self):
        return all(_is_zero(c) for c in self.coeffs)

    # ring operations (metadata of the left operand is kept)
    def __add__(self, other):
        n = min(self.prec, other.prec)
        return replace(self, coeffs=tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])),
                       ring="")

    def __sub__(self, other):
        n = min(self.prec, other.prec)
        return replace(self, coeffs=tuple(a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])),
                       ring="")

    def __neg__(self):
        return self.map(lambda c: -c)

    def scale(self, s):
        return self.map(lambda c: c * s)

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        n = min(self.prec, other.prec)
        return all(_is_zero(a - b) for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __hash__ = None

    def __repr__(self):
        shown = " + ".join(f"({c})q^{i}" for i, c in enumerate(self.coeffs[:6]) if not _is_zero(c))
        return f"QExpansion({shown or '0'} + O(q^{self.prec}); k={self.weight}, N={self.level})"

    # serialization
    def to_json(self):
        return {"prec": self.prec, "ring": self.ring, "coeffs": [scalar_to_json(c) for c in self.coeffs],
                "weight": self.weight, "level": self.level,
                "character": self.character.to_json() if self.character else None}

    @staticmethod
    def from_json(obj):
        coeffs = [scalar_from_json(c) for c in obj["coeffs"]]
        if len(coeffs) != obj["prec"]:
            raise ValueError("prec does not match the coefficient count")
        ch = obj.get("character")
        return QExpansion(tuple(coeffs), obj.get("weight"), obj.get("level", 1),
                          DirichletCharacter.from_json(ch) if ch else None)


def _is_zero(c):
    z = getattr(c, "is_zero", None)
    return z() if z is not None else c == 0


def _add_weights(a, b):
    if a is None or b is None:
        return None
    return a + b


# ---------------------------------------------------------------------------
# operators


def mul(A: QExpansion, B: QExpansion) -> QExpansion:
    """Cauchy product; weights add and levels combine by lcm."""
    ring = join_ring_tags(A.ring, B.ring)
    n = min(A.prec, B.prec)
    a, b = A.coeffs[:n], B.coeffs[:n]
    out = [0] * n
    nz_b = [(j, y) for j, y in enumerate(b) if not _is_zero(y)]
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j, y in nz_b:
            if i + j >= n:
                break
            out[i + j] = out[i + j] + x * y
    ch = None
    if A.character is not None and B.character is not None:
        ch = A.character * B.character
    elif A.character is not None or B.character is not None:
        ch = A.character or B.character
    return QExpansion(tuple(out), _add_weights(A.weight, B.weight), lcm(A.level, B.level), ch, ring)


def mul_U(A: QExpansion, B: QExpansion, Q: int, out_prec: Optional[int] = None) -> QExpansion:
    """U_Q(A*B) without forming the full product."""
    n = min(A.prec, B.prec)
    top = math.ceil(n / Q) if out_prec is None else out_prec
    if (top - 1) * Q >= n:
        raise ValueError("insufficient precision for U_Q of the product")
    a, b = A.coeffs, B.coeffs
    nz_a = [(i, x) for i, x in enumerate(a[:n]) if not _is_zero(x)]
    out = []
    for m in range(top):
        N = m * Q
        acc = 0
        for i, x in nz_a:
            if i > N:
                break
            y = b[N - i]
            if not _is_zero(y):
                acc = acc + x * y
        out.append(acc)
    prod = mul(QExpansion(a[:1], A.weight, A.level, A.character),
               QExpansion(b[:1], B.weight, B.level, B.character))
    return replace(prod, coeffs=tuple(out), ring="")


def hecke_T(A: QExpansion, l: int, k: int, chi: DirichletCharacter) -> QExpansion:
    """a_n(T_l A) = a_{nl} + chi(l) l^{k-1} a_{n/l}."""
    if A.level % l == 0:
        raise ValueError(f"{l} divides the level; use U_{l}")
    out_prec = A.prec // l
    if out_prec == 0:
        raise ValueError("insufficient precision for T_l")
    c = chi(l) * l ** (k - 1)
    out = []
    for n in range(out_prec):
        v = A.coeffs[n * l]
        if n % l == 0 and not _is_zero(c):
            v = v + c * A.coeffs[n // l]
        out.append(v)
    return replace(A, coeffs=tuple(out), ring="")


def U_p(A: QExpansion, p: int) -> QExpansion:
    out_prec = A.prec // p
    if out_prec == 0:
        raise ValueError("insufficient precision for U_p")
    return replace(A, coeffs=A.coeffs[: out_prec * p: p], ring="")


def V_p(A: QExpansion, p: int, cap: Optional[int] = None) -> QExpansion:
    n = A.prec * p if cap is None else min(A.prec * p, cap)
    z = A.coeffs[0] * 0
    out = [z] * n
    for i in range(0, n, p):
        out[i] = A.coeffs[i // p]
    lev = A.level * p
    return replace(A, coeffs=tuple(out), level=lev, ring="")


def deplete(A: QExpansion, M: int) -> QExpansion:
    """Zero every a_n with gcd(n, M) > 1."""
    if M == 1:
        return A
    z = A.coeffs[0] * 0
    primes = list(factorint(M))
    out = tuple(z if any(n % q == 0 for q in primes) else c for n, c in enumerate(A.coeffs))
    return replace(A, coeffs=out, level=lcm(A.level, _depleted_level(M)), ring="")


def _depleted_level(M):
    out = 1
    for q in factorint(M):
        out *= q * q
    return out


def theta_pow(A: QExpansion, t: int) -> QExpansion:
    if t == 0:
        return A
    w = None if A.weight is None else A.weight + 2 * t
    return replace(A, coeffs=tuple(c * n ** t for n, c in enumerate(A.coeffs)), weight=w, ring="")


def twist_naive(A: QExpansion, chi: DirichletCharacter) -> QExpansion:
    """a_n -> chi(n) a_n; the level tag grows by cond(chi)^2."""
    if chi.modulus == 1:
        return A
    vals = [chi(n) for n in range(chi.modulus)]
    out = tuple(c * vals[n % chi.modulus] for n, c in enumerate(A.coeffs))
    f = chi.conductor()
    ch = A.character * chi * chi if A.character is not None else None
    return replace(A, coeffs=out, level=A.level * f * f, character=ch, ring="")


def gamma1_index(M: int) -> int:
    if M == 1:
        return 1
    if M == 2:
        return 3
    m = M * M
    for q in factorint(M):
        m = m * (q * q - 1) // (q * q)
    return m


def gamma0_index(M: int) -> int:
    m = M
    for q in factorint(M):
        m = m * (q + 1) // q
    return m


def sturm_bound(k: int, M: int, group: str = "gamma1") -> int:
    """ceil(k mu / 12), mu the index of Gamma_1(M) (or Gamma_0(M)) in SL_2(Z)."""
    if k < 1 or M < 1:
        raise ValueError("need k >= 1 and M >= 1")
    mu = gamma1_index(M) if group == "gamma1" else gamma0_index(M)
    return -(-k * mu // 12)


def embed_series(A: QExpansion, emb: PadicEmbedding) -> QExpansion:
    return replace(A, coeffs=tuple(embed(emb, c) for c in A.coeffs), ring="")


# the two senses of S(M) used by the construction


def shares_factor(n: int, M: int) -> bool:
    """n is not coprime to M (the depletion support)."""
    return math.gcd(n, M) > 1


def supported_on(n: int, M: int) -> bool:
    """Every prime factor of n divides M."""
    return all(M % q == 0 for q in factorint(n))


# ---------------------------------------------------------------------------
# eta products and divisor sums


def sigma(n: int, k: int = 1) -> int:
    s, d = 0, 1
    while d * d <= n:
        if n % d == 0:
            s += d ** k
            if d * d != n:
                s += (n // d) ** k
        d += 1
    return s


def euler_power(r: int, prec: int) -> list:
    """Coefficients of prod_{n>=1} (1 - q^n)^r via n c_n = -r sum sigma(j) c_{n-j}."""
    sig = [0] + [sigma(j) for j in range(1, prec)]
    c = [Fraction(1)] + [Fraction(0)] * (prec - 1)
    for n in range(1, prec):
        c[n] = Fraction(-r * sum(sig[j] * c[n - j] for j in range(1, n + 1)), n)
    return [int(x) if x.denominator == 1 else x for x in c]


def eta_product(exps: dict, prec: int, weight=None, level=None) -> QExpansion:
    """prod_d eta(d tau)^{r_d} as a q-expansion; the q-shift must be integral."""
    shift = Fraction(sum(d * r for d, r in exps.items()), 24)
    if shift.denominator != 1 or shift < 0:
        raise ValueError("eta quotient has non-integral or negative leading exponent")
    s = int(shift)
    N = max(prec - s, 1)
    series = [1] + [0] * (N - 1)
    for d, r in exps.items():
        base = euler_power(r, N // d + 1)
        fac = [0] * N
        for i, c in enumerate(base):
            if i * d < N:
                fac[i * d] = c
        series = [sum(series[i] * fac[n - i] for i in range(n + 1)) for n in range(N)]
    coeffs = ([0] * s + series)[:prec]
    if weight is None:
        weight = Fraction(sum(exps.values()), 2)
        weight = int(weight) if weight.denominator == 1 else weight
    return QExpansion(tuple(coeffs), weight, level or lcm(*exps.keys()))
