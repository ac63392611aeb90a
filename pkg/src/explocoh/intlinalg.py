"""Exact integer and rational linear algebra on small dense matrices.

Matrices are numpy arrays with ``dtype=object`` holding Python ints or
``fractions.Fraction`` entries, so everything here is exact; no floating
point is used anywhere in this module.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np

from .errors import ShapeError


def mat(rows):
    """Build an object-dtype matrix from nested sequences of numbers."""
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, 0), dtype=object)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ShapeError("ragged rows in matrix literal")
    out = np.empty((len(rows), width), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = x
    return out


def identity(n):
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(r, c):
    return np.zeros((r, c), dtype=object)


def vec(entries):
    return np.array(list(entries), dtype=object)


def frac_rref(M):
    """Reduced row echelon form over Q.

    Returns (R, pivots) where pivots lists the pivot column of each leading
    row.  Pivot choice is the first nonzero entry top-down, so the result is
    deterministic.
    """
    rows, cols = M.shape
    data = [
        [x if type(x) is Fraction else Fraction(x) for x in (M[i, j] for j in range(cols))]
        for i in range(rows)
    ]
    pivots = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if data[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            data[r], data[pr] = data[pr], data[r]
        inv = 1 / data[r][c]
        row_r = data[r] = [x * inv for x in data[r]]
        for i in range(rows):
            if i != r:
                factor = data[i][c]
                if factor != 0:
                    row_i = data[i]
                    data[i] = [
                        a - factor * b if b else a for a, b in zip(row_i, row_r)
                    ]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    R = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            R[i, j] = data[i][j]
    return R, pivots


def rational_rank(M):
    """Rank of an integer or rational matrix over Q."""
    if M.size == 0:
        return 0
    return len(frac_rref(M)[1])


def solve(M, B):
    """Exact solution X of M @ X = B with free variables set to zero.

    B may be a vector or a matrix.  Returns None when the system is
    inconsistent.
    """
    single = B.ndim == 1
    Bm = B.reshape(-1, 1) if single else B
    rows, cols = M.shape
    if Bm.shape[0] != rows:
        raise ShapeError("solve: %d rows vs rhs %d" % (rows, Bm.shape[0]))
    aug = np.concatenate([M, Bm], axis=1) if M.size or Bm.size else M
    R, pivots = frac_rref(aug)
    k = Bm.shape[1]
    for i in range(rows):
        if all(R[i, j] == 0 for j in range(cols)) and any(
            R[i, cols + t] != 0 for t in range(k)
        ):
            return None
    X = zeros(cols, k)
    for r, c in enumerate(pivots):
        if c >= cols:
            return None
        for t in range(k):
            X[c, t] = R[r, cols + t]
    return X[:, 0] if single else X


def inverse(M):
    """Exact inverse of a square matrix over Q; None when singular."""
    n = M.shape[0]
    if M.shape[1] != n:
        raise ShapeError("inverse of a non-square matrix")
    X = solve(M, identity(n))
    if X is None or rational_rank(M) != n:
        return None
    return X


def kernel_basis(M, cols=None):
    """Primitive integer basis of the right kernel of M over Q.

    M may have zero rows; pass ``cols`` to fix the ambient dimension in
    that case.
    """
    if M.size == 0:
        cols = M.shape[1] if M.ndim == 2 and M.shape[1] else cols
        if cols is None:
            raise ShapeError("kernel of an empty matrix needs a column count")
        return [tuple(1 if j == i else 0 for j in range(cols)) for i in range(cols)]
    R, pivots = frac_rref(M)
    ncols = M.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -R[r, f]
        out.append(primitive_vector(v))
    return out


def primitive_vector(v):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def int_det(M):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = M.shape[0]
    if n == 0:
        return 1
    A = [[int(M[i, j]) for j in range(n)] for i in range(n)]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            pr = None
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    pr = i
                    break
            if pr is None:
                return 0
            A[k], A[pr] = A[pr], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def det(M):
    """Exact determinant over Q (clears denominators, then Bareiss)."""
    n = M.shape[0]
    if M.shape[1] != n:
        raise ShapeError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    entries = [[M[i, j] for j in range(n)] for i in range(n)]
    if all(type(x) is int for row in entries for x in row):
        return Fraction(int_det(M))
    den = 1
    for row in entries:
        for x in row:
            d = x.denominator if type(x) is Fraction else 1
            den = den * d // gcd(den, d)
    scaled = np.empty((n, n), dtype=object)
    for i, row in enumerate(entries):
        for j, x in enumerate(row):
            if type(x) is Fraction:
                scaled[i, j] = x.numerator * (den // x.denominator)
            else:
                scaled[i, j] = int(x) * den
    return Fraction(int_det(scaled), den**n)


def minor_kernel_vector(M):
    """Kernel generator of a (d-1) x d integer matrix via signed maximal minors.

    Returns the zero tuple when the rows do not have full rank d-1.
    """
    r, d = M.shape
    if r != d - 1:
        raise ShapeError("minor_kernel_vector expects a (d-1) x d matrix")
    out = []
    for j in range(d):
        sub = np.delete(M, j, axis=1)
        out.append((-1) ** j * int_det(sub))
    return tuple(out)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def snf(M):
    """Smith normal form with transforms: U @ M @ V == D.

    U and V are unimodular, D is diagonal with nonnegative entries in a
    divisibility chain.  Pivot selection takes the smallest nonzero entry
    in absolute value, ties broken lexicographically by position, so the
    output is deterministic.
    """
    n, m = M.shape
    A = np.empty((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            A[i, j] = int(M[i, j])
    U = identity(n)
    V = identity(m)
    t = 0
    while t < min(n, m):
        best = None
        bv = None
        for i in range(t, n):
            for j in range(t, m):
                a = abs(A[i, j])
                if a and (bv is None or a < bv):
                    best, bv = (i, j), a
        if best is None:
            break
        bi, bj = best
        if bi != t:
            A[[t, bi]] = A[[bi, t]]
            U[[t, bi]] = U[[bi, t]]
        if bj != t:
            A[:, [t, bj]] = A[:, [bj, t]]
            V[:, [t, bj]] = V[:, [bj, t]]
        if A[t, t] < 0:
            A[t] = -A[t]
            U[t] = -U[t]
        restart = False
        for i in range(t + 1, n):
            if A[i, t] != 0:
                q = A[i, t] // A[t, t]
                A[i] = A[i] - q * A[t]
                U[i] = U[i] - q * U[t]
                if A[i, t] != 0:
                    restart = True
        if restart:
            continue
        for j in range(t + 1, m):
            if A[t, j] != 0:
                q = A[t, j] // A[t, t]
                A[:, j] = A[:, j] - q * A[:, t]
                V[:, j] = V[:, j] - q * V[:, t]
                if A[t, j] != 0:
                    restart = True
        if restart:
            continue
        bad = None
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if A[i, j] % A[t, t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            A[t] = A[t] + A[bad]
            U[t] = U[t] + U[bad]
            continue
        t += 1
    return U, A, V


def snf_data(M):
    """(rank, U, D, V, Vinv) for an integer matrix, Vinv exactly integer."""
    U, D, V = snf(M)
    k = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    Vi = inverse(V)
    Vinv = np.empty(V.shape, dtype=object)
    for i in range(V.shape[0]):
        for j in range(V.shape[1]):
            f = Fraction(Vi[i, j])
            if f.denominator != 1:
                raise ShapeError("unimodular inverse came out non-integer")
            Vinv[i, j] = int(f)
    return k, U, D, V, Vinv


def saturation_basis(rows, width):
    """Basis of the saturated lattice (Q-span of rows) intersect Z^width."""
    if not rows:
        return []
    R = mat(rows)
    k, _, _, _, Vinv = snf_data(R)
    return [tuple(int(x) for x in Vinv[i]) for i in range(k)]


def annihilator_data(rows, width):
    """SNF-adapted data for the lattice spanned by ``rows`` in Z^width.

    Returns (k, ann_basis, sat_basis, v_cols) where ``ann_basis`` is a
    saturated integer basis of {c : c . row = 0 for all rows}, ``sat_basis``
    spans the saturation of the row lattice, and ``v_cols`` lists all width
    columns of the unimodular V so that the first k are dual to sat_basis.
    """
    if not rows:
        ident = [tuple(1 if j == i else 0 for j in range(width)) for i in range(width)]
        return 0, ident, [], ident
    R = mat(rows)
    if R.shape[1] != width:
        raise ShapeError("annihilator_data width mismatch")
    k, _, _, V, Vinv = snf_data(R)
    v_cols = [tuple(int(V[i, j]) for i in range(width)) for j in range(width)]
    ann = v_cols[k:]
    sat = [tuple(int(x) for x in Vinv[i]) for i in range(k)]
    return k, ann, sat, v_cols


def integer_solve(M, b):
    """Integer solution x of M @ x = b, or None when none exists."""
    n, m = M.shape
    _, U, D, V, _ = snf_data(M)
    c = U @ np.array([int(x) for x in b], dtype=object)
    y = [0] * m
    for i in range(min(n, m)):
        d = int(D[i, i])
        if d != 0:
            if int(c[i]) % d != 0:
                return None
            y[i] = int(c[i]) // d
    for i in range(m, n):
        pass
    for i in range(min(n, m), n):
        if int(c[i]) != 0:
            return None
    for i in range(min(n, m)):
        if int(D[i, i]) == 0 and int(c[i]) != 0:
            return None
    x = V @ np.array(y, dtype=object)
    return tuple(int(t) for t in x)


def lattice_contains(basis_rows, v, width):
    """Whether v lies in the lattice generated by basis_rows."""
    if not basis_rows:
        return all(x == 0 for x in v)
    M = mat(basis_rows).T
    return integer_solve(M, v) is not None


def lattices_equal(rows_a, rows_b, width):
    """Whether two generating sets span the same lattice in Z^width."""
    return all(lattice_contains(rows_b, v, width) for v in rows_a) and all(
        lattice_contains(rows_a, v, width) for v in rows_b
    )


def exterior_power(M, j):
    """j-th compound matrix (all j x j minors, row/column subsets sorted)."""
    rows, cols = M.shape
    rsets = list(combinations(range(rows), j))
    csets = list(combinations(range(cols), j))
    out = zeros(len(rsets), len(csets))
    for a, rs in enumerate(rsets):
        for b, cs in enumerate(csets):
            out[a, b] = det(M[np.ix_(rs, cs)]) if j else Fraction(1)
    return out
