"""Orientation conventions for fiber products, at the tangent-space level.

Everything is exact rational linear algebra: kernels and cokernels of
integer or rational matrices, with the cokernel realized as the orthogonal
complement of the image in the standard inner product.  The relative
orientation of a map A: X -> Y orients coker A + X = ker A + Y through the
explicit metric map (inclusion of the complement, orthogonal projection to
the kernel, and A itself); the fiber product of df: A -> C and dg: B -> C
is oriented so that

    coker df + T(A xc B) + coker dg  =  ker df + TC + ker dg

holds as an oriented isomorphism, with ker df relative to coker df via
coker df + TA = ker df + TC and ker dg via TB + coker dg = TC + ker dg.
Signs are exact integers; there is no tolerance anywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intlinalg as la
from .errors import NotTransverseError, ShapeError


@dataclass(frozen=True)
class OrientedSpace:
    """A subspace of Q^ambient with an ordered basis and a sign."""

    ambient: int
    basis: tuple  # tuple of integer/rational coordinate tuples
    sign: int = 1

    @classmethod
    def standard(cls, n, sign=1):
        return cls(ambient=n, basis=tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n)), sign=sign)

    @property
    def dim(self):
        return len(self.basis)

    def basis_matrix(self):
        out = la.zeros(self.ambient, self.dim)
        for j, v in enumerate(self.basis):
            for i, x in enumerate(v):
                out[i, j] = x
        return out


class OrientedMap:
    """A linear map between oriented standard spaces, with computed
    kernel, image and orthogonal-complement cokernel bases."""

    def __init__(self, matrix, source_sign=1, target_sign=1):
        self.matrix = la.mat(matrix) if not isinstance(matrix, np.ndarray) else matrix
        if self.matrix.ndim != 2:
            raise ShapeError("oriented map needs a 2-d matrix")
        self.target_dim, self.source_dim = self.matrix.shape
        self.source_sign = int(source_sign)
        self.target_sign = int(target_sign)
        self.kernel = la.kernel_basis(self.matrix, cols=self.source_dim)
        self.cokernel = la.kernel_basis(self.matrix.T, cols=self.target_dim)
        self._proj = None

    def kernel_projection(self):
        """Cached coordinate matrix of orthogonal projection onto the kernel."""
        if self._proj is None and self.kernel:
            self._proj = _projection_matrix(self.kernel, self.source_dim)
        return self._proj

    def apply(self, v):
        if self.matrix.size == 0:
            return tuple(0 for _ in range(self.target_dim))
        out = self.matrix @ la.vec(v)
        return tuple(out.tolist())


def _basis_matrix(basis, dim):
    K = la.zeros(dim, len(basis))
    for j, b in enumerate(basis):
        for i, x in enumerate(b):
            K[i, j] = x
    return K


def _projection_matrix(basis, dim):
    """Matrix of coordinates of the orthogonal projection onto span(basis),
    i.e. (K^T K)^(-1) K^T; None for the zero subspace."""
    if not basis:
        return None
    K = _basis_matrix(basis, dim)
    return la.solve(K.T @ K, K.T)


def _projection_coords(basis, v):
    """Coordinates of the orthogonal projection of v onto span(basis)."""
    if not basis:
        return ()
    P = _projection_matrix(basis, len(v))
    return tuple((P @ la.vec(v)).tolist())


def _sign_det(M):
    d = la.det(M)
    if d == 0:
        raise NotTransverseError("degenerate identification (zero determinant)")
    return 1 if d > 0 else -1


def relative_orientation(A: OrientedMap) -> int:
    """Sign of the metric identification coker A + X -> ker A + Y.

    The returned sign orients the computed kernel basis given the computed
    cokernel basis: flipping either chosen basis flips the sign, flipping
    the orientation of X or Y flips it as well.
    """
    dk = len(A.kernel)
    dc = len(A.cokernel)
    size = dc + A.source_dim
    if size != dk + A.target_dim:
        raise ShapeError("rank bookkeeping failed")
    M = la.zeros(size, size)
    P = A.kernel_projection()
    C = _basis_matrix(A.cokernel, A.target_dim)
    M[dk:, :dc] = C
    if P is not None:
        M[:dk, dc:] = P
    M[dk:, dc:] = A.matrix
    return _sign_det(M) * A.source_sign * A.target_sign


def _relative_orientation_right(A: OrientedMap) -> int:
    """Sign of the second convention X + coker A -> Y + ker A."""
    dk = len(A.kernel)
    dc = len(A.cokernel)
    size = A.source_dim + dc
    M = la.zeros(size, size)
    P = A.kernel_projection()
    C = _basis_matrix(A.cokernel, A.target_dim)
    M[: A.target_dim, : A.source_dim] = A.matrix
    if P is not None:
        M[A.target_dim :, : A.source_dim] = P
    M[: A.target_dim, A.source_dim :] = C
    return _sign_det(M) * A.source_sign * A.target_sign


def fiber_product_orientation(df: OrientedMap, dg: OrientedMap) -> OrientedSpace:
    """Oriented tangent space of the fiber product inside Q^(a+b)."""
    if df.target_dim != dg.target_dim:
        raise ShapeError("the two maps have different targets")
    a, b, c = df.source_dim, dg.source_dim, df.target_dim
    h = la.zeros(c, a + b)
    for i in range(c):
        for j in range(a):
            h[i, j] = df.matrix[i, j]
        for j in range(b):
            h[i, a + j] = -dg.matrix[i, j]
    fp_basis = la.kernel_basis(h, cols=a + b)
    if len(fp_basis) != a + b - c:
        raise NotTransverseError("df - dg is not surjective")
    s_f = relative_orientation(df)
    s_g = _relative_orientation_right(dg)
    dk_f = len(df.kernel)
    dk_g = len(dg.kernel)
    dc_f = len(df.cokernel)
    dc_g = len(dg.cokernel)
    size = dc_f + len(fp_basis) + dc_g
    M = la.zeros(size, size)
    M[dk_f : dk_f + c, :dc_f] = _basis_matrix(df.cokernel, c)
    if fp_basis:
        W = _basis_matrix(fp_basis, a + b)
        U = W[:a, :]
        V = W[a:, :]
        pf = df.kernel_projection()
        pg = dg.kernel_projection()
        if pf is not None:
            M[:dk_f, dc_f : dc_f + len(fp_basis)] = pf @ U
        if df.matrix.size:
            M[dk_f : dk_f + c, dc_f : dc_f + len(fp_basis)] = df.matrix @ U
        if pg is not None:
            M[dk_f + c :, dc_f : dc_f + len(fp_basis)] = pg @ V
    M[dk_f : dk_f + c, dc_f + len(fp_basis) :] = _basis_matrix(dg.cokernel, c)
    s_3 = _sign_det(M) * df.target_sign
    eps = s_f * s_g * s_3
    return OrientedSpace(ambient=a + b, basis=tuple(fp_basis), sign=eps)


def orientation_against(space: OrientedSpace, reference) -> int:
    """Sign comparing the space's orientation with a reference basis of the
    same subspace (or a full standard basis when the space is full)."""
    cols = len(reference)
    if cols != space.dim:
        raise ShapeError("reference basis has the wrong size")
    R = la.zeros(space.ambient, cols)
    for j, v in enumerate(reference):
        for i, x in enumerate(v):
            R[i, j] = x
    coords = la.solve(R, space.basis_matrix())
    if coords is None:
        raise ShapeError("reference does not span the space")
    return _sign_det(coords) * space.sign


def swap_space(space: OrientedSpace, a, b) -> OrientedSpace:
    """Push an oriented subspace of Q^(a+b) through the swap to Q^(b+a)."""
    basis = tuple(tuple(v[a:]) + tuple(v[:a]) for v in space.basis)
    return OrientedSpace(ambient=a + b, basis=basis, sign=space.sign)


def compare_oriented(space_a: OrientedSpace, space_b: OrientedSpace) -> int:
    """+1 or -1 comparing two orientations of the same subspace."""
    if space_a.ambient != space_b.ambient or space_a.dim != space_b.dim:
        raise ShapeError("spaces are not comparable")
    if space_a.dim == 0:
        return space_a.sign * space_b.sign
    A = space_a.basis_matrix()
    coords = la.solve(A, space_b.basis_matrix())
    if coords is None:
        raise ShapeError("the spaces differ")
    return _sign_det(coords) * space_a.sign * space_b.sign


def normal_bundle_sign(df: OrientedMap, dg: OrientedMap, fp=None) -> int:
    """Sign of T(A xc B) + TC = T(A x B) with the normal bundle identified
    with the pullback of TC through df - dg."""
    a, b, c = df.source_dim, dg.source_dim, df.target_dim
    if fp is None:
        fp = fiber_product_orientation(df, dg)
    h = la.zeros(c, a + b)
    for i in range(c):
        for j in range(a):
            h[i, j] = df.matrix[i, j]
        for j in range(b):
            h[i, a + j] = -dg.matrix[i, j]
    K = fp.basis_matrix()
    M = la.zeros(a + b, a + b)
    M[:, : fp.dim] = K
    sys = la.zeros(c + fp.dim, a + b)
    sys[:c, :] = h
    sys[c:, :] = K.T
    rhs = la.zeros(c + fp.dim, c)
    for i in range(c):
        rhs[i, i] = 1
    lifts = la.solve(sys, rhs)
    if lifts is None:
        raise NotTransverseError("no orthogonal lift of the target basis")
    M[:, fp.dim :] = lifts
    return fp.sign * _sign_det(M) * df.target_sign


def fiber_product_in(df, dg, embed):
    """Fiber product pushed into a larger space through the injection
    ``embed`` (a function on basis vectors)."""
    fp = fiber_product_orientation(df, dg)
    return OrientedSpace(
        ambient=len(embed(fp.basis[0])) if fp.basis else fp.ambient,
        basis=tuple(embed(v) for v in fp.basis),
        sign=fp.sign,
    )


def associativity_signs(df, dg, dh, dk):
    """Orientations of both parenthesizations of A xM1 B xM2 C.

    df: A -> M1, dg: B -> M1, dh: B -> M2, dk: C -> M2.  Returns the two
    oriented subspaces of Q^(a+b+c); they agree exactly when the fiber
    product is associative with this convention.
    """
    a, b, c = df.source_dim, dg.source_dim, dk.source_dim
    # right-first: W = B xM2 C, then A xM1 W along g composed with the
    # projection W -> B
    W = fiber_product_orientation(dh, dk)
    if W.dim:
        g_proj = la.zeros(dg.target_dim, W.dim)
        for t, w in enumerate(W.basis):
            img = dg.apply(w[:b])
            for i, x in enumerate(img):
                g_proj[i, t] = x
    else:
        g_proj = la.zeros(dg.target_dim, 0)
    left = fiber_product_orientation(df, OrientedMap(g_proj, source_sign=W.sign))

    def embed_left(vec):
        u = vec[:a]
        coords = vec[a:]
        tail = [Fraction(0)] * (b + c)
        for t, s in enumerate(coords):
            for i, x in enumerate(W.basis[t]):
                tail[i] += Fraction(s) * Fraction(x)
        return tuple(u) + tuple(tail)

    left_total = OrientedSpace(ambient=a + b + c, basis=tuple(embed_left(v) for v in left.basis), sign=left.sign)

    # left-first: V = A xM1 B, then V xM2 C along h composed with V -> B
    V = fiber_product_orientation(df, dg)
    if V.dim:
        h_proj = la.zeros(dh.target_dim, V.dim)
        for t, w in enumerate(V.basis):
            img = dh.apply(w[a:])
            for i, x in enumerate(img):
                h_proj[i, t] = x
    else:
        h_proj = la.zeros(dh.target_dim, 0)
    right = fiber_product_orientation(OrientedMap(h_proj, source_sign=V.sign), dk)

    def embed_right(vec):
        coords = vec[: V.dim]
        z = vec[V.dim :]
        head = [Fraction(0)] * (a + b)
        for t, s in enumerate(coords):
            for i, x in enumerate(V.basis[t]):
                head[i] += Fraction(s) * Fraction(x)
        return tuple(head) + tuple(z)

    right_total = OrientedSpace(ambient=a + b + c, basis=tuple(embed_right(v) for v in right.basis), sign=right.sign)
    return left_total, right_total


def associativity_check(df, dg, dh, dk) -> bool:
    left, right = associativity_signs(df, dg, dh, dk)
    return compare_oriented(left, right) == 1
