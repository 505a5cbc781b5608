"""Dense matrix helpers over any exact field-like scalar type.

Matrices are lists of rows.  Scalars only need ``+ - * /`` and a zero
test; p-adic scalars additionally expose ``valuation`` which is used to
pick pivots so that precision loss stays minimal.
"""
from __future__ import annotations

from fractions import Fraction


def _is_zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    if z is not None:
        return z()
    return x == 0


def _pivot_key(x):
    v = getattr(x, "val", None)
    return v if v is not None else 0


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, m = len(A), len(B[0])
    inner = len(B)
    out = []
    for i in range(n):
        row = A[i]
        out_row = []
        for j in range(m):
            acc = row[0] * B[0][j]
            for t in range(1, inner):
                acc = acc + row[t] * B[t][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(A, v):
    return [sum((a * x for a, x in zip(row[1:], v[1:])), row[0] * v[0]) for row in A]


def vec_mat(v, A):
    return [sum((v[i] * A[i][j] for i in range(1, len(v))), v[0] * A[0][j])
            for j in range(len(A[0]))]


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def mat_pow(A, e, one=1, zero=0):
    result = identity(len(A), one, zero)
    base = A
    while e:
        if e & 1:
            result = mat_mul(result, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return result


def row_reduce(A):
    """Reduced row echelon form; returns (R, pivot_columns).

    Pivots are chosen with minimal valuation when entries carry one,
    otherwise the first nonzero entry is used.
    """
    R = [list(r) for r in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        cand = [i for i in range(r, rows) if not _is_zero(R[i][c])]
        if not cand:
            continue
        piv = min(cand, key=lambda i: _pivot_key(R[i][c]))
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c] if not isinstance(R[r][c], int) else Fraction(1, R[r][c])
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and not _is_zero(R[i][c]):
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A) -> int:
    return len(row_reduce(A)[1])


def solve(A, b):
    """Solve A x = b for square or overdetermined consistent systems.

    Raises ValueError when the system is inconsistent or underdetermined.
    """
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = row_reduce(aug)
    if n in piv:
        raise ValueError("inconsistent linear system")
    if len(piv) < n:
        raise ValueError("underdetermined linear system")
    x = [None] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def solve_many(A, B_cols):
    """Solve A X = B where B is given as a list of right-hand columns."""
    n = len(A[0])
    k = len(B_cols)
    aug = [list(A[i]) + [B_cols[j][i] for j in range(k)] for i in range(len(A))]
    R, piv = row_reduce(aug)
    if any(c >= n for c in piv):
        raise ValueError("inconsistent linear system")
    if len(piv) < n:
        raise ValueError("underdetermined linear system")
    X = [[None] * k for _ in range(n)]
    for i, c in enumerate(piv):
        for j in range(k):
            X[c][j] = R[i][n + j]
    return X


def inverse(A):
    n = len(A)
    one = A[0][0] * 0 + 1
    zero = A[0][0] * 0
    cols = [[one if i == j else zero for i in range(n)] for j in range(n)]
    return solve_many(A, cols)


def kernel(A):
    """Basis of the right kernel {x : A x = 0}."""
    R, piv = row_reduce(A)
    n = len(A[0])
    free = [c for c in range(n) if c not in piv]
    zero = A[0][0] * 0
    basis = []
    for fcol in free:
        v = [zero] * n
        v[fcol] = zero + 1
        for i, c in enumerate(piv):
            v[c] = -R[i][fcol]
        basis.append(v)
    return basis


def det(A):
    R = [list(r) for r in A]
    n = len(R)
    d = R[0][0] * 0 + 1
    for c in range(n):
        cand = [i for i in range(c, n) if not _is_zero(R[i][c])]
        if not cand:
            return R[0][0] * 0
        piv = min(cand, key=lambda i: _pivot_key(R[i][c]))
        if piv != c:
            R[c], R[piv] = R[piv], R[c]
            d = -d
        d = d * R[c][c]
        for i in range(c + 1, n):
            if not _is_zero(R[i][c]):
                f = R[i][c] / R[c][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[c])]
    return d


def charpoly(A):
    """Coefficients [c_0, ..., c_n] of det(x I - A), division free (Berkowitz)."""
    n = len(A)
    zero = A[0][0] * 0
    one = zero + 1
    # Berkowitz: build the Toeplitz vectors for each leading principal block.
    poly = [one, -A[0][0]]  # highest degree first
    for r in range(1, n):
        R = A[r][:r]
        C = [A[i][r] for i in range(r)]
        M = [row[:r] for row in A[:r]]
        a = A[r][r]
        col = [one, -a]
        v = C
        for _ in range(r):
            col.append(-sum((x * y for x, y in zip(R[1:], v[1:])), R[0] * v[0]))
            v = mat_vec(M, v)
        # Toeplitz matrix (r+2) x (r+1) times poly
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(r + 1):
                if 0 <= i - j < len(col):
                    acc = acc + col[i - j] * poly[j]
            new.append(acc)
        poly = new
    return poly[::-1]
