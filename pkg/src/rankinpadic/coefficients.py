"""Scalar towers: rationals, cyclotomic elements, capped p-adic numbers, characters.

Rationals are plain :class:`fractions.Fraction`.  Cyclotomic elements live
in the power basis of Q(zeta_M); a precomputed table sends every root of
unity zeta_M^j to its coordinate vector so products can be accumulated in
the group ring and reduced once.  p-adic scalars carry an explicit absolute
precision that every operation lowers pessimistically.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import _linalg

DEFAULT_PREC = 30


# ---------------------------------------------------------------------------
# elementary number theory


def factorint(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == {n: 1}


def primes_up_to(n: int) -> list:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, s in enumerate(sieve) if s]


def totient(n: int) -> int:
    r = n
    for q in factorint(n):
        r = r // q * (q - 1)
    return r


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def lcm(*args) -> int:
    out = 1
    for a in args:
        out = out * a // math.gcd(out, a)
    return out


def primitive_root(n: int) -> int:
    """Smallest generator of (Z/n)^x for n = q^a with q an odd prime (or n in {1, 2, 4})."""
    if n in (1, 2):
        return 1
    if n == 4:
        return 3
    phi = totient(n)
    fac = list(factorint(phi))
    for g in range(2, n):
        if math.gcd(g, n) != 1:
            continue
        if all(pow(g, phi // q, n) != 1 for q in fac):
            return g
    raise ValueError(f"(Z/{n})^x is not cyclic")


# ---------------------------------------------------------------------------
# cyclotomic fields


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple:
    """Integer coefficients of Phi_M, lowest degree first."""
    num = [-1] + [0] * (M - 1) + [1]  # x^M - 1
    for d in range(1, M):
        if M % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(a, b):
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    assert not any(a), "inexact polynomial division"
    return q


class CyclotomicField:
    """Q(zeta_M) with its power basis 1, z, ..., z^(phi(M)-1)."""

    _cache: dict = {}

    def __new__(cls, M: int):
        if M < 1:
            raise ValueError("conductor must be positive")
        inst = cls._cache.get(M)
        if inst is None:
            inst = super().__new__(cls)
            inst._setup(M)
            cls._cache[M] = inst
        return inst

    def _setup(self, M):
        self.M = M
        self.phi = totient(M)
        self.poly = cyclotomic_poly(M)
        n = self.phi
        # table[j] = coordinates of zeta^j, j in [0, 2M)
        table = []
        cur = [0] * n
        cur[0] = 1
        for _ in range(2 * M):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(n):
                    cur[i] -= top * self.poly[i]
        self.table = table

    def __repr__(self):
        return f"CyclotomicField({self.M})"

    def __reduce__(self):
        return (CyclotomicField, (self.M,))

    def zero(self):
        return CyclotomicElement(self, (Fraction(0),) * self.phi)

    def one(self):
        return self.from_exponents({0: 1})

    def zeta(self, j: int = 1):
        return self.from_exponents({j % self.M: 1})

    def from_exponents(self, terms: dict):
        """Element sum c_j zeta^j from a dict j -> rational."""
        n = self.phi
        acc = [0] * n
        tab = self.table
        for j, c in terms.items():
            if c:
                row = tab[j % self.M]
                for i in range(n):
                    if row[i]:
                        acc[i] += c * row[i]
        return CyclotomicElement(self, tuple(Fraction(a) for a in acc))

    def __call__(self, x):
        if isinstance(x, CyclotomicElement):
            return x.lift(self.M)
        x = Fraction(x)
        return CyclotomicElement(self, (x,) + (Fraction(0),) * (self.phi - 1))


class CyclotomicElement:
    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: CyclotomicField, coords):
        self.field = field
        self.coords = tuple(coords)
        self._hash = None
        if len(self.coords) != field.phi:
            raise ValueError("coordinate length must equal phi(M)")

    @property
    def conductor(self) -> int:
        return self.field.M

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def exponent_terms(self) -> dict:
        return {i: c for i, c in enumerate(self.coords) if c}

    def lift(self, M2: int) -> "CyclotomicElement":
        M = self.field.M
        if M2 == M:
            return self
        if M2 % M:
            raise ValueError(f"Q(zeta_{M}) is not contained in Q(zeta_{M2})")
        step = M2 // M
        return CyclotomicField(M2).from_exponents(
            {i * step: c for i, c in enumerate(self.coords) if c})

    def _coerce(self, other):
        if isinstance(other, CyclotomicElement):
            if other.field is self.field:
                return self, other
            L = lcm(self.field.M, other.field.M)
            return self.lift(L), other.lift(L)
        if isinstance(other, (int, Fraction)):
            return self, self.field(other)
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return CyclotomicElement(a.field, (x + y for x, y in zip(a.coords, b.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.field, (-x for x in self.coords))

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return CyclotomicElement(a.field, (x - y for x, y in zip(a.coords, b.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.field, (x * other for x in self.coords))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        F = a.field
        acc = {}
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        acc[i + j] = acc.get(i + j, 0) + x * y
        return F.from_exponents(acc)

    __rmul__ = __mul__

    def mul_matrix(self):
        """Matrix of multiplication by self in the power basis (columns = images)."""
        F = self.field
        cols = [(self * F.zeta(j)).coords for j in range(F.phi)]
        return [[cols[j][i] for j in range(F.phi)] for i in range(F.phi)]

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        if self.is_rational():
            return self.field(1 / self.coords[0])
        e0 = [Fraction(1)] + [Fraction(0)] * (self.field.phi - 1)
        return CyclotomicElement(self.field, _linalg.solve(self.mul_matrix(), e0))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def galois(self, k: int):
        """Image under zeta -> zeta^k (k a unit mod M)."""
        F = self.field
        if math.gcd(k, F.M) != 1:
            raise ValueError("Galois exponent must be a unit")
        return F.from_exponents({i * k: c for i, c in enumerate(self.coords) if c})

    def conjugate(self):
        return self.galois(-1)

    def __eq__(self, other):
        if isinstance(other, (CyclotomicElement, int, Fraction)):
            a, b = self._coerce(other)
            return a.coords == b.coords
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            # hash the element in its minimal representation only if rational
            self._hash = hash(self.coords[0]) if self.is_rational() else hash(
                (self.field.M, self.coords))
        return self._hash

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            mon = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            cs = str(c)
            if mon:
                cs = "" if c == 1 else ("-" if c == -1 else f"({cs})*")
            terms.append(f"{cs}{mon}" if mon else cs)
        body = " + ".join(terms) if terms else "0"
        return f"[{body} in Q(zeta_{self.field.M})]"

    def to_json(self):
        return {"cyc": self.field.M, "coords": [str(c) for c in self.coords]}

    @staticmethod
    def from_json(obj):
        F = CyclotomicField(int(obj["cyc"]))
        return CyclotomicElement(F, [Fraction(c) for c in obj["coords"]])


# ---------------------------------------------------------------------------
# p-adic numbers with capped absolute precision


class PadicScalar:
    """x = p^val * unit + O(p^prec).

    ``unit`` is reduced modulo p^(prec - val) and is prime to p, except for
    the zero-at-precision value which has unit 0 and val = prec.
    """

    __slots__ = ("p", "unit", "val", "prec")

    def __init__(self, p: int, unit: int, val: int, prec: int):
        self.p = p
        self.unit = unit
        self.val = val
        self.prec = prec

    # constructors
    @classmethod
    def make(cls, p: int, x, prec: int = DEFAULT_PREC):
        """Round an exact rational x to absolute precision prec."""
        if p <= 2:
            raise ValueError("p-adic scalars require an odd prime")
        x = Fraction(x)
        if x == 0:
            return cls(p, 0, prec, prec)
        v = valuation(x, p)
        if v >= prec:
            return cls(p, 0, prec, prec)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        mod = p ** (prec - v)
        return cls(p, num * pow(den, -1, mod) % mod, v, prec)

    @classmethod
    def from_int_mod(cls, p: int, a: int, prec: int):
        """The class of the integer a modulo p^prec."""
        return cls.make(p, a % p ** prec, prec)

    @classmethod
    def zero(cls, p: int, prec: int = DEFAULT_PREC):
        return cls(p, 0, prec, prec)

    # basic queries
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def relprec(self) -> int:
        return self.prec - self.val

    def valuation(self) -> int:
        return self.val

    def lift(self) -> Fraction:
        """A rational representative (an integer when val >= 0)."""
        if self.val >= 0:
            return Fraction(self.unit * self.p ** self.val)
        return Fraction(self.unit, self.p ** (-self.val))

    def lift_int(self) -> int:
        if self.val < 0:
            raise ValueError("not p-integral")
        return self.unit * self.p ** self.val % self.p ** self.prec

    def residue(self) -> int:
        if self.val < 0:
            raise ValueError("not p-integral")
        return self.unit % self.p if self.val == 0 else 0

    def with_prec(self, prec: int) -> "PadicScalar":
        prec = min(prec, self.prec)
        if self.is_zero() or self.val >= prec:
            return PadicScalar(self.p, 0, prec, prec)
        return PadicScalar(self.p, self.unit % self.p ** (prec - self.val), self.val, prec)

    def _coerce(self, other, relative: bool):
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, CyclotomicElement):
            if not other.is_rational():
                raise TypeError("embed cyclotomic elements before mixing with p-adics")
            other = other.coords[0]
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                # an exact zero is as precise as the operand it meets
                N = self.prec if not relative else max(self.relprec, 0)
                return PadicScalar(self.p, 0, N, N)
            if relative:
                v = valuation(other, self.p)
                return PadicScalar.make(self.p, other, v + max(self.relprec, 1))
            return PadicScalar.make(self.p, other, max(self.prec, valuation(other, self.p) + 1))
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other, relative=False)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        N = min(self.prec, o.prec)
        vmin = min(self.val, o.val, N)
        s = (self.unit * p ** (self.val - vmin) + o.unit * p ** (o.val - vmin)) % p ** (N - vmin)
        return _normalize(p, s, vmin, N)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicScalar(self.p, (-self.unit) % self.p ** self.relprec, self.val, self.prec)

    def __sub__(self, other):
        o = self._coerce(other, relative=False)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other, relative=True)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        if self.is_zero() and o.is_zero():
            N = self.prec + o.prec
            return PadicScalar(p, 0, N, N)
        if self.is_zero():
            N = self.prec + o.val
            return PadicScalar(p, 0, N, N)
        if o.is_zero():
            N = o.prec + self.val
            return PadicScalar(p, 0, N, N)
        rel = min(self.relprec, o.relprec)
        v = self.val + o.val
        return PadicScalar(p, self.unit * o.unit % p ** rel, v, v + rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("p-adic value is zero at this precision")
        rel = self.relprec
        return PadicScalar(self.p, pow(self.unit, -1, self.p ** rel), -self.val, -self.val + rel)

    def __truediv__(self, other):
        o = self._coerce(other, relative=True)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicScalar.make(self.p, 1, max(self.relprec, 1))
        if self.is_zero():
            return PadicScalar(self.p, 0, self.prec * e, self.prec * e)
        rel = self.relprec
        return PadicScalar(self.p, pow(self.unit, e, self.p ** rel), self.val * e, self.val * e + rel)

    def __eq__(self, other):
        try:
            d = self - other
        except (TypeError, ValueError):
            return NotImplemented
        if d is NotImplemented:
            return NotImplemented
        return d.is_zero()

    def __hash__(self):
        raise TypeError("PadicScalar is not hashable (equality is precision dependent)")

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.prec})"

    def to_json(self):
        return {"p": self.p, "unit": str(self.unit), "valuation": self.val, "precision": self.prec}

    @staticmethod
    def from_json(obj):
        return PadicScalar(int(obj["p"]), int(obj["unit"]), int(obj["valuation"]), int(obj["precision"]))


def _normalize(p, s, v, N):
    if s == 0:
        return PadicScalar(p, 0, N, N)
    while s % p == 0:
        s //= p
        v += 1
    return PadicScalar(p, s % p ** (N - v), v, N)


def teichmuller(p: int, u: int, prec: int = DEFAULT_PREC) -> PadicScalar:
    """The (p-1)-st root of unity congruent to u mod p."""
    if u % p == 0:
        raise ValueError("Teichmuller lift needs a unit")
    mod = p ** prec
    x = u % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return PadicScalar.make(p, x, prec)
        x = y


class PadicEmbedding:
    """A fixed embedding Q(zeta_M) -> Q_p, for M | p - 1.

    zeta_M goes to the Teichmuller lift of g^((p-1)/M) where g is the
    smallest primitive root mod p.
    """

    def __init__(self, p: int, M: int, prec: int = DEFAULT_PREC):
        if p <= 2 or not is_prime(p):
            raise ValueError("p must be an odd prime")
        if M % p == 0:
            raise ValueError("p divides the conductor: zeta_M is not liftable unramifiedly")
        if (p - 1) % M:
            # TODO: unramified extensions of Q_p would lift this restriction.
            raise ValueError(f"zeta_{M} does not lie in Q_{p} (needs M | p-1)")
        self.p, self.M, self.prec = p, M, prec
        self.generator = primitive_root(p)
        self.root = teichmuller(p, pow(self.generator, (p - 1) // M, p), prec)
        self._powers = [self.root ** j for j in range(M)]

    def metadata(self) -> dict:
        return {"p": self.p, "M": self.M, "prec": self.prec, "primitive_root_mod_p": self.generator,
                "zeta_image_residue": self.root.residue()}

    def __call__(self, x):
        return embed(self, x)


def embed(emb: PadicEmbedding, x) -> PadicScalar:
    p, prec = emb.p, emb.prec
    if isinstance(x, PadicScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return PadicScalar.make(p, x, prec)
    if emb.M % x.field.M:
        raise ValueError(f"conductor {x.field.M} does not divide embedding conductor {emb.M}")
    step = emb.M // x.field.M
    acc = PadicScalar.zero(p, prec)
    for i, c in enumerate(x.coords):
        if c:
            if valuation(c, p) < -prec:
                raise ValueError("denominator exceeds precision budget")
            acc = acc + emb._powers[(i * step) % emb.M] * PadicScalar.make(p, c, prec)
    return acc.with_prec(prec) if acc.prec > prec else acc


# ---------------------------------------------------------------------------
# Dirichlet characters


@lru_cache(maxsize=None)
def unit_generators(M: int) -> tuple:
    """Canonical generators of (Z/M)^x with their orders, CRT-lifted per prime power."""
    gens = []
    for q, a in sorted(factorint(M).items()):
        Q = q ** a
        rest = M // Q

        def lift(x):
            # x mod Q, 1 mod rest
            return (x * rest * pow(rest, -1, Q) + Q * pow(Q, -1, rest)) % M if rest > 1 else x % M

        if q == 2:
            if a == 1:
                continue
            gens.append((lift(Q - 1), 2))
            if a >= 3:
                gens.append((lift(5), 2 ** (a - 2)))
        else:
            gens.append((lift(primitive_root(Q)), totient(Q)))
    return tuple(gens)


def _mult_order(g: int, M: int) -> int:
    k, x = 1, g % M
    while x != 1:
        x = x * g % M
        k += 1
    return k


class DirichletCharacter:
    """A character mod M given by root-of-unity values on generators of (Z/M)^x.

    Each value is stored as a pair (zeta_order, exponent) meaning
    zeta_order-th root exp(2 pi i exponent / zeta_order).
    """

    def __init__(self, modulus: int, gen_values):
        self.modulus = M = int(modulus)
        gv = [(int(g) % M if M > 1 else 0, int(o), int(e) % int(o)) for g, o, e in gen_values]
        self.gen_values = tuple(gv)
        self.order = lcm(*[o // math.gcd(o, e) for _, o, e in gv]) if gv else 1
        e_ord = self.order
        table = {}
        if M == 1:
            table[0] = 0
        else:
            orders = [_mult_order(g, M) for g, _, _ in gv]
            for (g, zo, ze), o in zip(gv, orders):
                if (ze * o) % zo:
                    raise ValueError(f"value at generator {g} has order not dividing {o}")
            for ks in product(*[range(o) for o in orders]):
                n, ex = 1, 0
                for (g, zo, ze), k in zip(gv, ks):
                    n = n * pow(g, k, M) % M
                    ex += k * ze * e_ord // zo
                if n in table:
                    raise ValueError("generators are not independent")
                table[n] = ex % e_ord
            if len(table) != totient(M):
                raise ValueError("generators do not span (Z/M)^x")
        self._exp = table
        self._conductor = None

    # constructors
    @classmethod
    def trivial(cls, M: int = 1):
        return cls(M, [(g, 1, 0) for g, _ in unit_generators(M)])

    @classmethod
    def from_exponents(cls, M: int, exps):
        """Character sending the k-th canonical generator (order o_k) to zeta_{o_k}^{exps[k]}."""
        gens = unit_generators(M)
        if len(exps) != len(gens):
            raise ValueError(f"(Z/{M})^x has {len(gens)} canonical generators")
        return cls(M, [(g, o, e) for (g, o), e in zip(gens, exps)])

    @classmethod
    def from_function(cls, M: int, value_exp, order: int):
        """Build from n -> exponent of zeta_order (defined on units)."""
        return cls(M, [(g, order, value_exp(g)) for g, _ in unit_generators(M)])

    @classmethod
    def all_mod(cls, M: int) -> list:
        gens = unit_generators(M)
        return [cls(M, [(g, o, e) for (g, o), e in zip(gens, es)])
                for es in product(*[range(o) for _, o in gens])]

    @classmethod
    def legendre(cls, p: int):
        g = primitive_root(p)
        return cls(p, [(g, 2, 1)])

    # evaluation
    def exponent(self, n: int):
        """Exponent of zeta_order at n, or None if gcd(n, M) > 1."""
        return self._exp.get(n % self.modulus if self.modulus > 1 else 0)

    def __call__(self, n: int):
        e = self.exponent(n)
        if e is None:
            return 0
        if self.order <= 2:
            return -1 if e else 1
        return CyclotomicField(self.order).zeta(e)

    def value(self, n: int):
        """Value as a CyclotomicElement in Q(zeta_order) (0 off units)."""
        F = CyclotomicField(self.order)
        e = self.exponent(n)
        return F.zero() if e is None else F.zeta(e)

    def values(self) -> dict:
        return {n: self(n) for n in range(self.modulus)}

    def parity(self) -> int:
        return 1 if (self.exponent(-1) or 0) == 0 else -1

    def is_trivial(self) -> bool:
        return self.order == 1

    def conductor(self) -> int:
        if self._conductor is None:
            M = self.modulus
            for d in sorted(d for d in range(1, M + 1) if M % d == 0):
                if all(e == 0 for n, e in self._exp.items() if (n - 1) % d == 0):
                    self._conductor = d
                    break
        return self._conductor

    def is_primitive(self) -> bool:
        return self.conductor() == self.modulus

    # group operations
    def _values_on(self, M2: int, f):
        return DirichletCharacter(M2, [(g, o, f(g, o)) for g, o in unit_generators(M2)])

    def extend(self, M2: int):
        """The character mod M2 (a multiple of modulus) induced by self."""
        if M2 % self.modulus:
            raise ValueError("new modulus must be a multiple")
        L = self.order
        return DirichletCharacter(M2, [(g, L, self.exponent(g)) for g, _ in unit_generators(M2)])

    def restrict(self, d: int):
        """The character mod d inducing self; d must be a multiple of the conductor."""
        M = self.modulus
        if M % d or d % self.conductor():
            raise ValueError("d must divide the modulus and be divisible by the conductor")
        gens = []
        for g, _ in unit_generators(d):
            n = g
            while math.gcd(n, M) != 1:
                n += d
            gens.append((g, self.order, self.exponent(n)))
        return DirichletCharacter(d, gens)

    def primitive(self):
        return self.restrict(self.conductor())

    def __mul__(self, other: "DirichletCharacter"):
        M = lcm(self.modulus, other.modulus)
        a, b = self.extend(M), other.extend(M)
        L = lcm(a.order, b.order)
        return DirichletCharacter(M, [(g, L, a.exponent(g) * (L // a.order) + b.exponent(g) * (L // b.order))
                                      for g, _ in unit_generators(M)])

    def inverse(self):
        return DirichletCharacter(self.modulus, [(g, o, -e) for g, o, e in self.gen_values])

    conjugate = inverse

    def __pow__(self, k: int):
        return DirichletCharacter(self.modulus, [(g, o, e * k) for g, o, e in self.gen_values])

    def same_function(self, other) -> bool:
        if self.modulus != other.modulus:
            return False
        return all(self.value(n) == other.value(n) for n in range(self.modulus))

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.same_function(other)

    def __hash__(self):
        return hash((self.modulus, tuple(sorted(
            (n, Fraction(e, self.order)) for n, e in self._exp.items()))))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, order {self.order}, gens {list(self.gen_values)})"

    def to_json(self):
        return {"modulus": self.modulus, "gen_values": [list(x) for x in self.gen_values]}

    @staticmethod
    def from_json(obj):
        return DirichletCharacter(int(obj["modulus"]), [tuple(x) for x in obj["gen_values"]])


def char_decompose(char: DirichletCharacter, Q: int):
    """Split char = char_Q * char_{M/Q} for an exact divisor Q of the modulus."""
    M = char.modulus
    if M % Q or math.gcd(Q, M // Q) != 1:
        raise ValueError(f"{Q} does not exactly divide {M}")
    R = M // Q

    def part(mod, other):
        gens = []
        for g, _ in unit_generators(mod):
            # n = g mod `mod`, 1 mod `other`
            if other == 1:
                n = g
            else:
                n = (g * other * pow(other, -1, mod) + mod * pow(mod, -1, other)) % M
            gens.append((g, char.order, char.exponent(n)))
        return DirichletCharacter(mod, gens)

    return part(Q, R), part(R, Q)


def gauss_sum(char: DirichletCharacter) -> CyclotomicElement:
    """sum over a mod c of chi(a) zeta_c^a, for primitive chi of modulus c."""
    c = char.modulus
    if not char.is_primitive():
        raise ValueError("Gauss sum requires a primitive character")
    L = lcm(c, char.order)
    F = CyclotomicField(L)
    terms = {}
    for a in range(c):
        e = char.exponent(a)
        if e is None:
            continue
        j = (a * (L // c) + e * (L // char.order)) % L
        terms[j] = terms.get(j, 0) + 1
    return F.from_exponents(terms)


# ---------------------------------------------------------------------------
# serialization of scalars


def scalar_to_json(x):
    if isinstance(x, (int, Fraction)):
        return str(x)
    if isinstance(x, CyclotomicElement):
        return x.to_json()
    if isinstance(x, PadicScalar):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def scalar_from_json(obj):
    if isinstance(obj, (int, float)):
        return Fraction(obj) if isinstance(obj, float) else obj
    if isinstance(obj, str):
        x = Fraction(obj)
        return x.numerator if x.denominator == 1 else x
    if "cyc" in obj:
        return CyclotomicElement.from_json(obj)
    if "unit" in obj:
        return PadicScalar.from_json(obj)
    raise ValueError(f"unrecognized scalar {obj!r}")


def ring_tag(x) -> str:
    if isinstance(x, (int, Fraction)):
        return "QQ"
    if isinstance(x, CyclotomicElement):
        return "QQ" if x.field.M == 1 else f"QQ(zeta_{x.field.M})"
    if isinstance(x, PadicScalar):
        return f"Qp({x.p})"
    raise TypeError(f"unsupported scalar {type(x).__name__}")


def join_ring_tags(a: str, b: str) -> str:
    """Smallest common ring of two tags; p-adic and cyclotomic rings do not mix."""
    if a == b or b == "QQ":
        return a
    if a == "QQ":
        return b
    if a.startswith("Qp") or b.startswith("Qp"):
        raise TypeError(f"ring mismatch: {a} vs {b}")
    ma, mb = int(a[8:-1]), int(b[8:-1])
    return f"QQ(zeta_{lcm(ma, mb)})"
