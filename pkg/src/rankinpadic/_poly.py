"""Dense univariate polynomials and truncated Laurent series over generic scalars."""
from __future__ import annotations

from fractions import Fraction


def _zero_like(x):
    return x * 0


def _is_zero(x):
    z = getattr(x, "is_zero", None)
    return z() if z is not None else x == 0


class Poly:
    """Polynomial with coefficients listed from degree 0 upward."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = list(coeffs) or [Fraction(0)]
        while len(c) > 1 and _is_zero(c[-1]):
            c.pop()
        self.c = c

    @classmethod
    def monomial(cls, coeff, deg):
        return cls([_zero_like(coeff)] * deg + [coeff])

    @property
    def degree(self):
        return -1 if len(self.c) == 1 and _is_zero(self.c[0]) else len(self.c) - 1

    def __getitem__(self, i):
        return self.c[i] if 0 <= i < len(self.c) else _zero_like(self.c[0])

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.c), len(other.c))
        return Poly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly([-other]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([x * other for x in self.c])
        out = [_zero_like(self.c[0] * other.c[0])] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.c):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        r = Poly([self.c[0] * 0 + 1])
        for _ in range(e):
            r = r * self
        return r

    def __call__(self, x):
        acc = _zero_like(self.c[0]) + _zero_like(x)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def scale_var(self, s):
        """P(s X)."""
        out, pw = [], None
        for i, a in enumerate(self.c):
            pw = (s * 0 + 1) if i == 0 else pw * s
            out.append(a * pw)
        return Poly(out)

    def reciprocal_series(self, depth):
        """Coefficients of 1/P up to X^depth (P(0) must be invertible)."""
        c0 = self.c[0]
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out = [inv0]
        for n in range(1, depth + 1):
            acc = _zero_like(inv0)
            for i in range(1, min(n, len(self.c) - 1) + 1):
                acc = acc + self.c[i] * out[n - i]
            out.append(-acc * inv0)
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.c), len(other.c))
        return all(_is_zero(self[i] - other[i]) for i in range(n))

    def __repr__(self):
        return "Poly(" + ", ".join(map(str, self.c)) + ")"


def series_mul(a, b, depth):
    """Truncated product of two coefficient lists to degree depth."""
    out = []
    for n in range(depth + 1):
        acc = None
        for i in range(max(0, n - len(b) + 1), min(n, len(a) - 1) + 1):
            t = a[i] * b[n - i]
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else Fraction(0))
    return out


class LaurentSeries:
    """Sum over e of coeff[e] X^e for finitely many integer e, known up to X^top."""

    def __init__(self, terms: dict, top: int):
        self.terms = {e: c for e, c in terms.items() if e <= top and not _is_zero(c)}
        self.top = top

    def __getitem__(self, e):
        return self.terms.get(e, Fraction(0))

    def low(self):
        return min(self.terms) if self.terms else self.top

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        top = min(self.top, other.top)
        keys = {e for e in set(self.terms) | set(other.terms) if e <= top}
        return all(_is_zero(self[e] - other[e]) for e in keys)

    def __repr__(self):
        body = " + ".join(f"({c})X^{e}" for e, c in sorted(self.terms.items()))
        return f"LaurentSeries({body or '0'}; O(X^{self.top + 1}))"
