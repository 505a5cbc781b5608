"""The p-adic pipeline: U_p on a finite basis, the ordinary projector, the
transpose eigen-functional and point values of the two p-adic L-functions.

Everything up to the coordinates of U_p(H) in the basis is exact rational
arithmetic.  p-adic numbers enter only through the unit root alpha, the
projector and the functional, so the reported precision is the precision of
those objects.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import _linalg
from .coefficients import (CyclotomicElement, CyclotomicField, DirichletCharacter, PadicEmbedding,
                           PadicScalar, embed, scalar_from_json, scalar_to_json, valuation)
from .eisenstein import eis_E, eis_F
from .forms import (ExternalDataRequired, NewformData, PointSpec, al_pseudo_eigenvalue_p, conj,
                    conjugate_star, hecke_roots, p_poly)
from .localfactors import CrysLocalData, adjoint_factor
from .qseries import QExpansion, V_p, hecke_T, mul_U, sturm_bound, theta_pow, U_p


class PrecisionError(ArithmeticError):
    pass


class MultiplicityError(ValueError):
    pass


class UnsupportedPoint(ValueError):
    pass


# ---------------------------------------------------------------------------
# conversions


def to_padic(x, p: int, prec: int, emb: Optional[PadicEmbedding] = None) -> PadicScalar:
    if isinstance(x, PadicScalar):
        return x
    if isinstance(x, CyclotomicElement):
        if x.is_rational():
            x = x.to_rational()
        elif emb is None:
            raise ValueError("an embedding Q(zeta) -> Q_p is needed")
        else:
            return embed(emb, x)
    return PadicScalar.make(p, x, prec)


def to_padic_matrix(M, p: int, prec: int, emb=None):
    return [[to_padic(x, p, prec, emb) for x in row] for row in M]


def matrix_precision(M) -> int:
    return min(x.prec for row in M for x in row)


def _exact(x):
    """Collapse rational cyclotomic elements to Fractions."""
    if isinstance(x, CyclotomicElement) and x.is_rational():
        return x.to_rational()
    return x


# ---------------------------------------------------------------------------
# the space


class OrdinarySpace:
    """A finite basis of exact q-expansions stable under U_p and the working T_l.

    Coordinates are solved on ``sturm`` pivot coefficients and then checked on
    every available coefficient.
    """

    def __init__(self, k: int, level: int, p: int, basis, char: Optional[DirichletCharacter] = None,
                 sturm: Optional[int] = None, labels=None, verified_prec: Optional[int] = None,
                 hecke_primes=(2, 3)):
        self.k, self.level, self.p = k, level, p
        self.char = char or DirichletCharacter.trivial(1)
        self.basis = [b.map(_exact) for b in basis]
        self.dim = len(self.basis)
        self.sturm = sturm if sturm is not None else sturm_bound(k, level, "gamma0")
        self.labels = list(labels) if labels else [f"b{i}" for i in range(self.dim)]
        self.hecke_primes = tuple(l for l in hecke_primes if level % l)
        self.prec = min(b.prec for b in self.basis)
        self.verified_prec = verified_prec if verified_prec is not None else self.prec
        if self.sturm < self.dim:
            raise ValueError("Sturm bound smaller than the dimension")
        A = [[b.coeffs[n] for b in self.basis] for n in range(self.sturm + 1)]
        _, piv = _linalg.row_reduce(_linalg.transpose(A))
        if len(piv) < self.dim:
            raise ValueError(f"rank-deficient basis: rank {len(piv)} < {self.dim} on the first "
                             f"{self.sturm + 1} coefficients")
        self.pivots = piv
        self._inv = _linalg.inverse([A[n] for n in piv])
        self._up = None
        self._hecke = {}
        self.residuals = {}

    def coords(self, F: QExpansion, check: bool = True) -> list:
        """Exact coordinates x with F = sum x_j b_j."""
        if F.prec <= self.pivots[-1]:
            raise PrecisionError(f"need {self.pivots[-1] + 1} coefficients, have {F.prec}")
        v = [_exact(F.coeffs[n]) for n in self.pivots]
        x = _linalg.mat_vec(self._inv, v)
        if check:
            top = min(F.prec, self.prec)
            for n in range(top):
                s = sum((x[j] * self.basis[j].coeffs[n] for j in range(1, self.dim)),
                        x[0] * self.basis[0].coeffs[n])
                if s != _exact(F.coeffs[n]):
                    raise ValueError(f"series is not in the span of the basis (coefficient {n})")
        return x

    def series(self, x) -> QExpansion:
        out = []
        for n in range(self.prec):
            out.append(sum((x[j] * self.basis[j].coeffs[n] for j in range(1, self.dim)),
                           x[0] * self.basis[0].coeffs[n]))
        return QExpansion(tuple(out), self.k, self.level, self.char)

    @property
    def up(self):
        if self._up is None:
            self._up = build_up_matrix(self)
        return self._up

    def hecke(self, l: int):
        if l not in self._hecke:
            self._hecke[l] = hecke_matrix(self, l)
        return self._hecke[l]

    def to_json(self):
        return {"k": self.k, "level": self.level, "p": self.p, "char": self.char.to_json(),
                "sturm": self.sturm, "verified_prec": self.verified_prec,
                "basis": [{"label": lab, "coeffs": [scalar_to_json(c) for c in b.coeffs]}
                          for lab, b in zip(self.labels, self.basis)]}

    @staticmethod
    def from_json(obj):
        for key in ("k", "level", "basis"):
            if key not in obj:
                raise ValueError(f"space record missing field {key!r}")
        char = DirichletCharacter.from_json(obj["char"]) if obj.get("char") else None
        basis, labels = [], []
        for i, rec in enumerate(obj["basis"]):
            coeffs = rec["coeffs"] if isinstance(rec, dict) else rec
            basis.append(QExpansion(tuple(scalar_from_json(c) for c in coeffs), obj["k"], obj["level"]))
            labels.append(rec.get("label", f"b{i}") if isinstance(rec, dict) else f"b{i}")
        level = int(obj["level"])
        p = obj.get("p")
        if p is None:
            p = max(q for q in range(2, level + 1) if level % q == 0 and all(q % r for r in range(2, q)))
        return OrdinarySpace(int(obj["k"]), level, int(p), basis, char, obj.get("sturm"), labels,
                             obj.get("verified_prec"))


def _operator_matrix(space: OrdinarySpace, op, name: str):
    cols = []
    checked = None
    for b in space.basis:
        img = op(b)
        if img.prec <= space.pivots[-1]:
            raise PrecisionError(f"{name}: basis precision {space.prec} too small")
        cols.append(space.coords(img))
        checked = img.prec if checked is None else min(checked, img.prec)
    space.residuals[name] = {"checked_coefficients": checked, "max_residual": 0}
    return _linalg.transpose(cols)


def build_up_matrix(space: OrdinarySpace):
    """M with U_p(b_j) = sum_i M_ij b_i; exact, verified on every coefficient U_p(b_j) has."""
    if space.prec < space.p * space.sturm:
        raise PrecisionError(f"basis precision {space.prec} below p * sturm = {space.p * space.sturm}")
    return _operator_matrix(space, lambda b: U_p(b, space.p), "U_p")


def hecke_matrix(space: OrdinarySpace, l: int):
    if space.level % l == 0:
        raise ValueError(f"T_{l} is not defined at level {space.level}")
    return _operator_matrix(space, lambda b: hecke_T(b, l, space.k, space.char), f"T_{l}")


# ---------------------------------------------------------------------------
# Newton polygons and the projector


def newton_polygon(vals: list) -> list:
    """Slopes of the lower convex hull of (i, v_i); ``None`` marks a zero coefficient.

    Returns [(root valuation, multiplicity)] read from the constant term, so
    the valuations decrease along the list.
    """
    pts = [(i, v) for i, v in enumerate(vals) if v is not None]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    # a zero constant term means roots equal to 0 (infinite valuation)
    if pts and pts[0][0] > 0:
        out.append((math.inf, pts[0][0]))
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((Fraction(y1 - y2, x2 - x1), x2 - x1))
    return out


def _val_or_none(c, p):
    if isinstance(c, PadicScalar):
        return None if c.is_zero() else c.val
    c = Fraction(_exact(c))
    return None if c == 0 else valuation(c, p)


def newton_unit_root_count(M, p: int) -> int:
    """Number of eigenvalues of M (with multiplicity) of valuation 0."""
    cp = _linalg.charpoly(M)
    vals = [_val_or_none(c, p) for c in cp]
    return sum(length for slope, length in newton_polygon(vals) if slope == 0)


def _is_padic(M) -> bool:
    return isinstance(M[0][0], PadicScalar)


def ordinary_projector(M, p: int, prec: int, max_j: Optional[int] = None, guard: Optional[int] = None):
    """e = lim M^{L p^j} modulo p^prec, with L = lcm(p^f - 1 : f <= dim M).

    L = p - 1 is enough only when every unit eigenvalue has residue in F_p;
    the lcm covers residue fields F_{p^f} of every possible degree.
    Exact input is rounded at a working precision with guard digits for the
    denominators; the guard grows until the output reaches ``prec``.
    Raises PrecisionError when the powers do not stabilise.
    """
    max_j = prec + 5 if max_j is None else max_j
    if _is_padic(M):
        return _project(M, p, prec, max_j)
    d = max(0, -min((_val_or_none(x, p) or 0) for row in M for x in row))
    guard = guard if guard is not None else 10 + 10 * d
    for _ in range(4):
        try:
            return _project(to_padic_matrix(M, p, prec + guard), p, prec, max_j)
        except PrecisionError:
            guard *= 2
    raise PrecisionError("projector did not reach the requested precision")


def _project(M, p, prec, max_j):
    n = len(M)
    one = PadicScalar.make(p, 1, matrix_precision(M))
    zero = PadicScalar.zero(p, matrix_precision(M) * 4)
    L = math.lcm(*(p ** f - 1 for f in range(1, n + 1)))
    X = _linalg.mat_pow(M, L, one, zero)
    for _ in range(max_j + 1):
        Y = _linalg.mat_pow(X, p, one, zero)
        diff = _linalg.mat_sub(Y, X)
        if matrix_precision(Y) < prec:
            raise PrecisionError(f"precision fell to {matrix_precision(Y)} before the powers stabilised")
        if all(x.val >= prec for row in diff for x in row):
            return [[x.with_prec(prec) for x in row] for row in Y]
        X = Y
    raise PrecisionError(f"no stabilisation after {max_j} steps (eigenvalue on the unit-circle boundary "
                         "or precision exhausted)")


def projector_checks(e, M, others=()) -> dict:
    """e^2 = e and commutation with M and each matrix in ``others``, at e's precision."""
    prec = matrix_precision(e)

    def close(A, B):
        return all((a - b).is_zero() for ra, rb in zip(A, B) for a, b in zip(ra, rb))

    def pad(A):
        return A if _is_padic(A) else to_padic_matrix(A, e[0][0].p, prec + 20)

    out = {"idempotent": close(_linalg.mat_mul(e, e), e), "precision": prec}
    for name, A in [("U_p", M)] + list(others):
        A = pad(A)
        out[f"commutes_{name}"] = close(_linalg.mat_mul(e, A), _linalg.mat_mul(A, e))
    tr = e[0][0] * 0
    for i in range(len(e)):
        tr = tr + e[i][i]
    out["trace"] = tr
    return out


# ---------------------------------------------------------------------------
# the eigen-functional


@dataclass
class EigenFunctional:
    eigensystem: dict
    alpha: PadicScalar
    row: list
    normalization: dict = field(default_factory=dict)

    @property
    def prec(self) -> int:
        return min(x.prec for x in self.row)

    def __call__(self, x):
        acc = self.row[0] * x[0]
        for r, xi in zip(self.row[1:], x[1:]):
            acc = acc + r * xi
        return acc


def dual_functional(space: OrdinarySpace, eigensystem: dict, alpha: PadicScalar, target_coords,
                    prec: int, label: str = "target") -> EigenFunctional:
    """The row vector lambda with lambda T_l = a_l lambda, lambda U_p = alpha lambda, lambda(target) = 1.

    The T_l conditions are solved exactly, U_p is restricted to that
    eigenspace and its unit-root line is cut out by the ordinary projector.
    """
    p, D = space.p, space.dim
    blocks = []
    for l, a in sorted(eigensystem.items()):
        T = space.hecke(l)
        blocks.extend(_linalg.transpose(_linalg.mat_sub(T, _linalg.mat_scale(a, _linalg.identity(D)))))
    if blocks:
        K = _linalg.kernel(blocks) if any(any(not _linalg._is_zero(x) for x in r) for r in blocks) \
            else _linalg.identity(D, Fraction(1), Fraction(0))
    else:
        K = _linalg.identity(D, Fraction(1), Fraction(0))
    if not K:
        raise ValueError(f"eigensystem {eigensystem} does not occur in the space")
    U = space.up
    KU = [_linalg.vec_mat(v, U) for v in K]
    A = [_linalg.solve(_linalg.transpose(K), w) for w in KU]
    units = newton_unit_root_count(A, p)
    if units == 0:
        raise ValueError(f"eigensystem {eigensystem} has no ordinary vector")
    if units > 1:
        support = sorted({space.labels[j] for v in K for j, x in enumerate(v) if not _linalg._is_zero(x)})
        raise MultiplicityError(f"eigensystem occurs {units} times in the ordinary part; "
                                f"colliding basis vectors: {', '.join(support)}")
    eA = ordinary_projector(A, p, prec)
    best = min(eA, key=lambda r: min(x.val if not x.is_zero() else math.inf for x in r))
    row = _linalg.vec_mat(best, to_padic_matrix(K, p, prec + 10))
    raw = EigenFunctional(eigensystem, alpha, row)(target_coords)
    if raw.is_zero():
        raise ValueError("functional vanishes on the target vector")
    row = [x / raw for x in row]
    lam = EigenFunctional(eigensystem, alpha, row,
                          {"normalized_on": label, "raw_pairing": raw.to_json(), "kernel_dim": len(K),
                           "petersson_constant": "recorded separately, not absorbed"})
    # the U_p eigen-property
    lhs = _linalg.vec_mat(row, to_padic_matrix(U, p, prec + 10))
    if not all((a - alpha * b).is_zero() for a, b in zip(lhs, row)):
        raise ValueError("alpha is not the U_p eigenvalue of the functional")
    return lam


def stabilised_coords(space: OrdinarySpace, f: NewformData, beta: PadicScalar) -> list:
    """Coordinates of f - beta V_p f."""
    F = f.q_expansion(min(f.prec, space.prec)).map(_exact)
    F = F.with_tags(level=space.level)
    x = space.coords(F, check=True)
    xv = space.coords(V_p(F, space.p, cap=F.prec), check=True)
    return [to_padic(a, space.p, beta.prec + 10) - beta * b for a, b in zip(x, xv)]


def newform_functional(space: OrdinarySpace, f: NewformData, prec: int, conjugated: bool = False) -> EigenFunctional:
    h = conjugate_star(f) if conjugated else f
    alpha, beta = hecke_roots(h, space.p, prec=prec + 10)
    eig = {l: _exact(h.a(l)) for l in space.hecke_primes}
    return dual_functional(space, eig, alpha, stabilised_coords(space, h, beta), prec,
                           label=f"{h.label}_alpha")


# ---------------------------------------------------------------------------
# evaluation


def functional_value(space: OrdinarySpace, lam: EigenFunctional, products=(), extra=None,
                     out_prec: Optional[int] = None, emb=None) -> PadicScalar:
    """lambda(e H) for H = sum A_i B_i + extra, computed as lambda(U_p H) / alpha."""
    p = space.p
    out_prec = out_prec or space.prec
    acc = None
    for A, B in products:
        top = min(out_prec, (min(A.prec, B.prec) - 1) // p + 1)
        term = mul_U(A, B, p, top)
        acc = term if acc is None else acc + term
    if extra is not None:
        u = U_p(extra, p)
        acc = u if acc is None else acc + u
    if acc is None:
        raise ValueError("nothing to evaluate")
    acc = acc.with_tags(level=space.level)
    x = space.coords(acc.map(_exact), check=True)
    xp = [to_padic(c, p, lam.prec + 10, emb) for c in x]
    return lam(xp) / lam.alpha


def depleted_twist(g: NewformData, p: int, N: int, chi: Optional[DirichletCharacter], prec: int) -> QExpansion:
    """g^{[pN]}_chi: a_n(g) chi(n) on gcd(n, pN) = 1, zero elsewhere."""
    M = p * N
    out = []
    for n in range(prec):
        if math.gcd(n, M) != 1:
            out.append(0)
            continue
        c = g.a(n)
        if chi is not None and chi.modulus > 1:
            c = c * chi(n)
        out.append(_exact(c))
    return QExpansion(tuple(out), g.weight, g.level * M * M)


@dataclass
class Budgets:
    qprec: int = 220
    pprec: int = 30

    def doubled(self):
        return Budgets(2 * self.qprec, 2 * self.pprec)


def _check_point(point: PointSpec, space: OrdinarySpace):
    if not point.in_sigma:
        raise UnsupportedPoint("point is outside the interpolation range (k - l - 2t < 1)")
    if point.t > 0:
        raise UnsupportedPoint("theta^t with t > 0 leaves the classical space; only t = 0 is evaluated")
    if space.k != point.k or space.p != point.p:
        raise ValueError("space weight or prime does not match the point")
    if space.level % (point.N * point.p):
        raise ValueError(f"space level {space.level} does not contain level {point.N * point.p}")


def _dag_hash(nodes) -> str:
    return hashlib.sha256(json.dumps(nodes, sort_keys=True, default=str).encode()).hexdigest()[:16]


def pipeline_inputs(point: PointSpec, budgets: Budgets, dual: bool = False):
    """The two q-expansion factors fed to the projector, and the operator DAG."""
    f, g, p, N, t, m = point.f, point.g, point.p, point.N, point.t, point.m
    q = budgets.qprec
    if dual:
        G = theta_pow(depleted_twist(g, p, N, None, q), t)
        E = eis_E(m, N, p, q)
        dag = [["deplete", g.label, p * N], ["theta", t], ["eis_E", m, N, p], ["mul"], ["U_p", p],
               ["lambda", f.label + "_alpha"], ["qprec", q]]
    else:
        eps = g.tame_char(p)
        psi_p = f.char_parts(p)[0]
        eps_p = g.char_parts(p)[0]
        chi = psi_p * eps_p.inverse()
        G = theta_pow(depleted_twist(g, p, N, eps.inverse(), q), t)
        E = eis_F(m, None if chi.is_trivial() else chi, N, p, q)
        dag = [["deplete_twist", g.label, p * N, "eps^-1"], ["theta", t], ["eis_F", m, N, p],
               ["mul"], ["U_p", p], ["lambda", f.label + "*_alpha"], ["qprec", q]]
    return G, E, dag


def _evaluate(point, space, budgets, dual, perturbation, lam):
    _check_point(point, space)
    G, E, dag = pipeline_inputs(point, budgets, dual)
    if lam is None:
        lam = newform_functional(space, point.f, budgets.pprec, conjugated=not dual)
    products = [(G, E)]
    if perturbation is not None:
        products.append((G, V_p(perturbation, point.p, cap=E.prec)))
        dag.append(["perturb", "V_p"])
    out_prec = min(space.prec, (budgets.qprec - 1) // point.p + 1)
    val = functional_value(space, lam, products, out_prec=out_prec)
    dag.append(["pprec", budgets.pprec])
    return val, _dag_hash(dag)


def padic_L_at(point: PointSpec, space: OrdinarySpace, budgets: Budgets = Budgets(), perturbation=None,
               lam: Optional[EigenFunctional] = None, with_provenance: bool = False):
    """lambda_{f_alpha^c}(theta^t(g^{[pN]}_{eps^{-1}}) F^{[p]}_{k-l-2t, psi_p eps_p^{-1}})."""
    val, h = _evaluate(point, space, budgets, False, perturbation, lam)
    return (val, h) if with_provenance else val


def dual_padic_L_at(point: PointSpec, space: OrdinarySpace, budgets: Budgets = Budgets(), perturbation=None,
                    lam: Optional[EigenFunctional] = None, with_provenance: bool = False):
    """lambda_{f_alpha}(theta^t(g^{[pN]}) E^{[p]}_{k-l-2t})."""
    val, h = _evaluate(point, space, budgets, True, perturbation, lam)
    return (val, h) if with_provenance else val


def result_record(point: PointSpec, value: PadicScalar, provenance: str, kind: str = "L") -> dict:
    return {"point": {**point.describe(), "function": kind},
            "value": {"unit": str(value.unit), "valuation": value.val, "precision": value.prec},
            "provenance": provenance}


# ---------------------------------------------------------------------------
# the interpolation formula


def euler_block(local: CrysLocalData, Pg=None, Pgs=None):
    """P(g, p^t/alpha) / P(g*, alpha p^{-l-t}) from the Hecke polynomials of g and g*."""
    p, l, t, al = local.p, local.l, local.t, local.alpha
    if Pg is None:
        Pg = lambda X: 1 - local.bp * X + local.eps_p * Fraction(p) ** (l - 1) * X * X
    if Pgs is None:
        e_inv = 1 / local.eps_p
        Pgs = lambda X: 1 - local.bp * e_inv * X + e_inv * Fraction(p) ** (l - 1) * X * X
    den = Pgs(al * Fraction(p) ** (-l - t))
    if den == 0:
        raise ZeroDivisionError("exceptional zero: P(g*, alpha p^{-l-t}) vanishes")
    return Pg(Fraction(p) ** t / al) / den


def local_data(point: PointSpec, alpha) -> CrysLocalData:
    f, g, p = point.f, point.g, point.p
    if not point.crystalline_g:
        raise ValueError("g is not crystalline at p")
    fr = lambda x: Fraction(_exact(x)) if not isinstance(_exact(x), CyclotomicElement) else x
    return CrysLocalData(p, point.k, point.l, point.t, alpha, fr(f.char(p)) if f.b(p) == 0 else Fraction(0),
                         fr(g.a(p)), fr(g.char(p)))


@dataclass
class InterpRHS:
    factors: dict
    euler_block: object
    adjoint: object
    algebraic: object
    slots: dict

    def numeric(self):
        """Complex value when both analytic slots are numeric and the algebraic part is exact."""
        lam, pet = self.slots.get("Lambda"), self.slots.get("petersson")
        if not isinstance(lam, (int, float, complex)) or not isinstance(pet, (int, float, complex)):
            return None
        return _to_complex(self.algebraic) * lam / pet


def _to_complex(x):
    import cmath
    if isinstance(x, CyclotomicElement):
        M = x.field.M
        return sum(complex(float(c)) * cmath.exp(2j * cmath.pi * i / M) for i, c in enumerate(x.coords))
    if isinstance(x, PadicScalar):
        raise TypeError("a p-adic algebraic factor has no complex value")
    return complex(float(x))


def interp_rhs_algebraic(point: Optional[PointSpec] = None, alpha=None, local: Optional[CrysLocalData] = None,
                         ingested: Optional[dict] = None) -> InterpRHS:
    """The algebraic part of the interpolation formula, analytic constants left in ``slots``."""
    ingested = dict(ingested or {})
    slots = {"Lambda": ingested.get("Lambda", "opaque"), "petersson": ingested.get("petersson", "opaque")}
    if point is None:
        if local is None:
            raise ValueError("need a point or local data")
        blk = euler_block(local)
        return InterpRHS({}, blk, None, None, slots)
    f, g, p, N = point.f, point.g, point.p, point.N
    k, l, t = point.k, point.l, point.t
    if alpha is None:
        alpha = hecke_roots(f, p)[0]
    b = g.b(p)
    Pg = p_poly(g, p)
    Pgs = p_poly(conjugate_star(g), p)
    if b == 0:
        local = local or local_data(point, alpha)
        blk = euler_block(local, Pg, Pgs)
    else:
        den = Pgs(alpha * Fraction(p) ** (-l - t))
        blk = Pg(Fraction(p) ** t / alpha) / den
    psi_p = f.char_parts(p)[0]
    eps_p = g.char_parts(p)[0]
    lam_g = al_pseudo_eigenvalue_p(g, p) if b else 1
    i_pow = CyclotomicField(4).zeta((k - l - 2 * t) % 4)
    factors = {
        "i_power": i_pow,
        "two_power": Fraction(2) ** (1 - k),
        "N_power": Fraction(N) ** (2 + 2 * t - k + l),
        "psi_p_inv(N)": _exact(psi_p.inverse()(N)) if psi_p.modulus > 1 else 1,
        "eps_p(-N)": _exact(eps_p(-N)) if eps_p.modulus > 1 else 1,
        "lambda_pb": lam_g,
        "alpha_power": (Fraction(p) ** (t + 1) / alpha) ** b if b else 1,
    }
    adj = adjoint_factor(f, p, alpha)
    alg = _exact(i_pow)
    for key in ("two_power", "N_power", "psi_p_inv(N)", "eps_p(-N)", "lambda_pb", "alpha_power"):
        alg = _mul(alg, factors[key])
    alg = _mul(alg, blk)
    alg = _mul(alg, 1 / adj)
    return InterpRHS(factors, blk, adj, alg, slots)


def _mul(a, b):
    # p-adic values absorb exact ones from either side
    if isinstance(b, PadicScalar) and not isinstance(a, PadicScalar):
        a, b = b, a
    if isinstance(a, PadicScalar) and isinstance(b, CyclotomicElement):
        b = _exact(b)
    return a * b


# ---------------------------------------------------------------------------
# the functional equation


def fe_exponent(point: PointSpec) -> int:
    return 2 * (point.k - point.l - 2 * point.t - 1)


def fe_residual(point: PointSpec, L_value: PadicScalar, dual_value: PadicScalar, gamma) -> PadicScalar:
    """L - N^{2(k-l-2t-1)} gamma L'."""
    if not point.in_sigma_dual:
        raise UnsupportedPoint("the functional equation is checked at crystalline points only")
    g = _exact(gamma)
    return L_value - dual_value * g * Fraction(point.N) ** fe_exponent(point)


def fe_report(point, L_value, dual_value, gamma, tamper=None) -> dict:
    res = fe_residual(point, L_value, dual_value, gamma)
    out = {"residual": res.to_json(), "precision": res.prec, "zero": res.is_zero(),
           "value_valuation": L_value.val}
    if tamper is not None:
        bad = fe_residual(point, L_value, dual_value, _exact(gamma) * tamper)
        out["tamper"] = {"factor": str(tamper), "residual": bad.to_json(), "detected": not bad.is_zero()}
    return out


# ---------------------------------------------------------------------------
# synthetic spaces


def synthetic_eigenseries(eigen: dict, up_eigenvalue, k: int, prec: int, p: int) -> QExpansion:
    """A formal multiplicative series with a_l from ``eigen`` (Hecke recursion) and a_{p^e} = u^e.

    Primes missing from ``eigen`` get a_l = 0.
    """
    from .coefficients import factorint, primes_up_to
    ppow = {}
    for l in primes_up_to(prec - 1):
        if l == p:
            vals = [Fraction(1)]
            while l ** len(vals) < prec:
                vals.append(vals[-1] * up_eigenvalue)
        else:
            a = Fraction(eigen.get(l, 0))
            vals = [Fraction(1), a]
            while l ** len(vals) < prec:
                vals.append(a * vals[-1] - Fraction(l) ** (k - 1) * vals[-2])
        ppow[l] = vals
    coeffs = [Fraction(0)] * prec
    for n in range(1, prec):
        v = Fraction(1)
        for l, e in factorint(n).items():
            v *= ppow[l][e]
        coeffs[n] = v
    return QExpansion(tuple(coeffs), k, p)


def synthetic_space(p: int, k: int, systems: list, prec: int, mix_seed: int = 0, sturm: Optional[int] = None):
    """Span of manufactured eigen-series, presented in a seeded mixed basis.

    ``systems`` is a list of (a_l dict, U_p eigenvalue).  Returns (space, change)
    where row i of ``change`` gives the coordinates of eigen-series i.
    """
    import random
    rng = random.Random(mix_seed)
    eig = [synthetic_eigenseries(a, u, k, prec, p) for a, u in systems]
    D = len(eig)
    while True:
        P = [[Fraction(rng.randint(-2, 2)) for _ in range(D)] for _ in range(D)]
        if _linalg.det(P) != 0:
            break
    Pinv = _linalg.inverse(P)
    # basis b_j = sum_i P_ji eig_i
    basis = []
    for j in range(D):
        coeffs = [sum(P[j][i] * eig[i].coeffs[n] for i in range(D)) for n in range(prec)]
        basis.append(QExpansion(tuple(coeffs), k, p))
    primes = sorted({l for a, _ in systems for l in a})
    space = OrdinarySpace(k, p, p, basis, sturm=sturm or max(D + 4, 12), hecke_primes=tuple(primes),
                          labels=[f"mix{j}" for j in range(D)])
    # eig_i = sum_j Pinv_ij b_j
    return space, Pinv, eig
