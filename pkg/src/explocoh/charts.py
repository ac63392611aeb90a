"""Finite-dimensional cohomology models of standard coordinate charts.

A chart R^n x T^m_P has cohomology the free exterior algebra on m - k
angular generators, where k is the rank of the lattice spanned by the
recession rays of P.  The generators are realized concretely as integer
coefficient vectors c with c . d = 0 for every recession direction d (the
constant one-forms sum c_i dtheta_i that survive the vanishing conditions),
chosen canonically through the Smith normal form of the ray matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import intlinalg as la
from .errors import (
    DualityUnavailableError,
    EmptyPolytopeError,
    GluingError,
    ShapeError,
)
from .lattice import Polytope


@dataclass(frozen=True)
class ChartSignature:
    """The data (n, m, P) of a standard chart R^n x T^m_P."""

    n: int
    m: int
    polytope: Polytope

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ShapeError("chart dimensions must be nonnegative")
        if self.polytope.ambient_dim != self.m:
            raise ShapeError(
                "polytope lives in R^%d but m = %d" % (self.polytope.ambient_dim, self.m)
            )
        if self.polytope.is_empty:
            raise EmptyPolytopeError("chart polytope is empty")

    @property
    def N(self):
        return self.n + 2 * self.m


@dataclass(frozen=True)
class ChartModel:
    """Graded model of H^*(R^n x T^m_P).

    ``generators`` are the coefficient vectors of the surviving constant
    angular one-forms; ``span_basis`` spans the saturated recession lattice;
    ``adapted_cobasis`` lists all m columns of the unimodular SNF matrix V,
    whose first k members complete the generators to a basis dual to an
    adapted coordinate system (used by the numeric duality pairing).
    """

    signature: ChartSignature
    k: int
    generators: tuple
    span_basis: tuple
    adapted_cobasis: tuple
    betti: tuple

    @property
    def h1_dim(self):
        return len(self.generators)

    def wedge_basis(self, q):
        return list(combinations(range(self.h1_dim), q))

    def generator_matrix(self):
        """m x (m-k) matrix whose columns are the generators."""
        g = la.zeros(self.signature.m, self.h1_dim)
        for j, c in enumerate(self.generators):
            for i, x in enumerate(c):
                g[i, j] = x
        return g


def chart_cohomology(sig: ChartSignature) -> ChartModel:
    """Betti data and canonical generators of a chart."""
    k, ann, sat, v_cols = la.annihilator_data(
        list(sig.polytope.recession_rays) + list(sig.polytope.lineality), sig.m
    )
    betti = tuple(comb(sig.m - k, j) for j in range(sig.m - k + 1))
    return ChartModel(
        signature=sig,
        k=k,
        generators=tuple(ann),
        span_basis=tuple(sat),
        adapted_cobasis=tuple(v_cols),
        betti=betti,
    )


@dataclass(frozen=True)
class CompactModel:
    """Graded dimensions of compactly supported cohomology of a chart."""

    signature: ChartSignature
    dims: tuple
    generator_description: str


def chart_compact_cohomology(sig: ChartSignature) -> CompactModel:
    """Compact-support dual model; needs P complete with no lines."""
    if not sig.polytope.is_complete():
        raise DualityUnavailableError("polytope declared incomplete (open faces removed)")
    if sig.polytope.contains_lines():
        raise DualityUnavailableError("polytope contains a line")
    model = chart_cohomology(sig)
    N = sig.N
    dims = tuple(model.betti[N - j] if 0 <= N - j < len(model.betti) else 0 for j in range(N + 1))
    desc = (
        "pullback bump volume wedge dtheta along the %d unbounded directions "
        "wedge products of the %d surviving angular generators" % (model.k, model.h1_dim)
    )
    return CompactModel(signature=sig, dims=dims, generator_description=desc)


@dataclass(frozen=True)
class RestrictionMap:
    """Map on chart models induced by a monomial gluing matrix.

    ``exponents`` has shape (m_source, m_target): row a expands the pullback
    of the source form dtheta_a in the target dtheta basis.  ``h1`` is the
    induced matrix from source generators to target generators.
    """

    source: ChartModel
    target: ChartModel
    exponents: tuple
    h1: tuple = field(repr=False)

    def h1_matrix(self):
        rows = len(self.target.generators)
        cols = len(self.source.generators)
        out = la.zeros(rows, cols)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = self.h1[i][j]
        return out

    def exterior(self, q):
        return la.exterior_power(self.h1_matrix(), q)

    def then(self, other: "RestrictionMap") -> "RestrictionMap":
        """Composite along source -> self.target == other.source -> other.target."""
        if other.source.signature != self.target.signature:
            raise ShapeError("restriction maps do not compose")
        a = np.array([list(r) for r in self.exponents], dtype=object) if self.exponents else la.zeros(0, 0)
        b = np.array([list(r) for r in other.exponents], dtype=object) if other.exponents else la.zeros(0, 0)
        if a.size and b.size:
            composite = a @ b
        else:
            composite = la.zeros(self.source.signature.m, other.target.signature.m)
        return restriction_map(self.source, other.target, composite)


def restriction_map(source: ChartModel, target: ChartModel, A) -> RestrictionMap:
    """Build the induced map on H^1 models for gluing matrix A.

    A must have shape m_source x m_target.  The map sends a surviving
    generator c to A^T c; the construction fails with GluingError when that
    vector escapes the target's surviving span, which happens exactly when
    A does not carry the target's unbounded span into the source's.
    """
    m_s, m_t = source.signature.m, target.signature.m
    A = np.array([[x for x in row] for row in A], dtype=object) if len(A) else la.zeros(0, m_t)
    if A.shape != (m_s, m_t):
        raise ShapeError("exponent matrix is %r, expected (%d, %d)" % (A.shape, m_s, m_t))
    tgt = target.generator_matrix()
    cols = []
    for c in source.generators:
        w = A.T @ la.vec(c) if A.size else la.vec([0] * m_t)
        x = la.solve(tgt, w) if tgt.size else (None if any(v != 0 for v in w) else la.vec([]))
        if x is None:
            raise GluingError(
                "pullback of generator %r leaves the surviving span of the target" % (c,)
            )
        cols.append(tuple(Fraction(v) for v in x))
    h1 = tuple(
        tuple(cols[j][i] for j in range(len(cols))) for i in range(len(target.generators))
    )
    exponents = tuple(tuple(int(x) for x in row) for row in A) if A.size else tuple(() for _ in range(m_s))
    return RestrictionMap(source=source, target=target, exponents=exponents, h1=h1)
