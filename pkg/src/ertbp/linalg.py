"""Small dense linear algebra over extended-precision scalars.

Matrices are tuples of tuples of mpfr. Only what the monodromy and
refinement paths need: LU with full pivoting, determinant, solve, inverse
and a one-norm condition estimate. numpy is deliberately not used here:
the whole point is to stay at the working MPFR precision.
"""
from gmpy2 import mpfr

from .errors import SingularJacobian


def mat(rows):
    return tuple(tuple(mpfr(x) for x in row) for row in rows)


def identity(n):
    return tuple(tuple(mpfr(1 if i == j else 0) for j in range(n))
                 for i in range(n))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_vec(a, v):
    return tuple(sum((x * y for x, y in zip(row, v)), mpfr(0)) for row in a)


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(m)), mpfr(0))
                       for j in range(p)) for i in range(n))


def one_norm(a):
    n = len(a)
    return max(sum((abs(a[i][j]) for i in range(n)), mpfr(0))
               for j in range(len(a[0])))


def lu_full_pivot(a):
    """LU decomposition with full pivoting: P A Q = L U.

    Returns (lu, row_perm, col_perm, sign) with L and U packed in lu.
    """
    n = len(a)
    lu = [list(row) for row in a]
    rows = list(range(n))
    cols = list(range(n))
    sign = 1
    for k in range(n):
        piv, pi, pj = mpfr(0), k, k
        for i in range(k, n):
            for j in range(k, n):
                if abs(lu[i][j]) > piv:
                    piv, pi, pj = abs(lu[i][j]), i, j
        if pi != k:
            lu[k], lu[pi] = lu[pi], lu[k]
            rows[k], rows[pi] = rows[pi], rows[k]
            sign = -sign
        if pj != k:
            for row in lu:
                row[k], row[pj] = row[pj], row[k]
            cols[k], cols[pj] = cols[pj], cols[k]
            sign = -sign
        if lu[k][k] == 0:
            continue
        for i in range(k + 1, n):
            f = lu[i][k] / lu[k][k]
            lu[i][k] = f
            for j in range(k + 1, n):
                lu[i][j] -= f * lu[k][j]
    return lu, rows, cols, sign


def det(a):
    lu, _, _, sign = lu_full_pivot(a)
    d = mpfr(sign)
    for k in range(len(a)):
        d *= lu[k][k]
    return d


def solve(a, b, det_floor="1e-30"):
    """Solve A x = b; raises SingularJacobian below the pivot floor."""
    n = len(a)
    lu, rows, cols, _ = lu_full_pivot(a)
    floor = mpfr(det_floor)
    scale = max(one_norm(a), mpfr(1))
    for k in range(n):
        if abs(lu[k][k]) <= floor * scale:
            raise SingularJacobian(
                f"pivot {k} is {lu[k][k]} (floor {floor} x norm {scale})")
    y = [mpfr(b[i]) for i in rows]
    for i in range(n):
        for j in range(i):
            y[i] -= lu[i][j] * y[j]
    for i in reversed(range(n)):
        for j in range(i + 1, n):
            y[i] -= lu[i][j] * y[j]
        y[i] /= lu[i][i]
    x = [mpfr(0)] * n
    for k in range(n):
        x[cols[k]] = y[k]
    return tuple(x)


def inverse(a, det_floor="1e-30"):
    n = len(a)
    cols = []
    for j in range(n):
        e = tuple(mpfr(1 if i == j else 0) for i in range(n))
        cols.append(solve(a, e, det_floor))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def condition_estimate(a):
    """One-norm condition number kappa_1 = |A|_1 |A^-1|_1 (exact inverse).

    Returns +inf when the matrix is singular at the pivot floor.
    """
    try:
        return one_norm(a) * one_norm(inverse(a))
    except SingularJacobian:
        return mpfr("inf")
