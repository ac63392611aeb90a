"""Integral affine polytopes, cones and fans with exact arithmetic.

A :class:`Polytope` is a closed rational polyhedron ``{y : a.y >= b}``; the
vertex/ray description, face lattice and recession data are derived exactly
from the inequalities by brute-force enumeration of tight subsets, which is
entirely adequate at the ambient dimensions (m <= 4 or so) this engine
targets.  "Open faces removed" is recorded as an opaque per-face marker and
only consulted by :meth:`Polytope.is_complete`.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import intlinalg as la
from .errors import EmptyPolytopeError, ShapeError, UnsupportedFanError


def _cone_generators(M, dim):
    """Extreme rays and lineality basis of the cone {x : M @ x >= 0}.

    M is an integer matrix with ``dim`` columns (possibly zero rows).
    Rays are primitive integer vectors, sorted lexicographically.
    """
    if M.shape[0] == 0:
        lin = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
        return [], lin
    lin = la.kernel_basis(M, cols=dim)
    comp = None
    if lin:
        pivots = la.frac_rref(la.mat(lin))[1]
        free = [c for c in range(dim) if c not in pivots]
        comp = la.zeros(dim, len(free))
        for t, c in enumerate(free):
            comp[c, t] = 1
        Mq = M @ comp
        d = len(free)
    else:
        Mq = M
        d = dim
    rays_q = _pointed_cone_rays(Mq, d)
    if comp is not None:
        rays = [la.primitive_vector(comp @ la.vec(v)) for v in rays_q]
    else:
        rays = list(rays_q)
    return sorted(set(rays)), sorted(lin)


def _pointed_cone_rays(M, d):
    """Extreme rays of a pointed cone {x in R^d : M @ x >= 0}."""
    if d == 0:
        return []
    n = M.shape[0]
    found = set()
    for S in combinations(range(n), d - 1):
        v = la.minor_kernel_vector(M[list(S), :]) if d > 1 else (1,)
        if all(x == 0 for x in v):
            continue
        v = la.primitive_vector(v)
        prods = [sum(int(M[i, j]) * v[j] for j in range(d)) for i in range(n)]
        if all(p >= 0 for p in prods):
            found.add(v)
        elif all(p <= 0 for p in prods):
            found.add(tuple(-x for x in v))
    return sorted(found)


class Face:
    """A nonempty face of a polytope, identified by its generator set."""

    def __init__(self, key, vertices, rays, lineality, tight):
        self.key = key  # frozenset of generator ids
        self.vertices = vertices
        self.rays = rays
        self.lineality = lineality
        self.tight = tight  # indices of inequalities tight on the face
        vecs = []
        if vertices:
            v0 = vertices[0]
            for v in vertices[1:]:
                vecs.append(tuple(a - b for a, b in zip(v, v0)))
        vecs.extend(rays)
        vecs.extend(lineality)
        vecs = [v for v in vecs if any(x != 0 for x in v)]
        self.dim = la.rational_rank(la.mat(vecs)) if vecs else 0

    @property
    def is_corner(self):
        return self.dim == 0

    def contains(self, other):
        return other.key <= self.key

    def lattice_directions(self):
        """Saturated integer basis of the face's direction space."""
        vecs = []
        if self.vertices:
            v0 = self.vertices[0]
            for v in self.vertices[1:]:
                vecs.append(la.primitive_vector(tuple(a - b for a, b in zip(v, v0))))
        vecs.extend(self.rays)
        vecs.extend(self.lineality)
        vecs = [v for v in vecs if any(x != 0 for x in v)]
        if not vecs:
            return []
        width = len(vecs[0])
        return la.saturation_basis(vecs, width)

    def recession_directions(self):
        """Saturated integer basis of the span of the face's recession cone."""
        vecs = [v for v in list(self.rays) + list(self.lineality) if any(x != 0 for x in v)]
        if not vecs:
            return []
        return la.saturation_basis(vecs, len(vecs[0]))

    def interior_direction(self):
        """A rational vector from the first vertex into the relative interior."""
        if not self.vertices:
            return tuple(Fraction(0) for _ in range(0))
        m = len(self.vertices[0])
        v0 = min(self.vertices)
        p = [Fraction(0)] * m
        for v in self.vertices:
            for i in range(m):
                p[i] += Fraction(v[i], len(self.vertices))
        for r in self.rays:
            for i in range(m):
                p[i] += Fraction(r[i])
        return tuple(p[i] - v0[i] for i in range(m))

    def __repr__(self):
        return "Face(dim=%d, verts=%d, rays=%d)" % (
            self.dim,
            len(self.vertices),
            len(self.rays),
        )


class Polytope:
    """Closed rational polyhedron in H-representation."""

    def __init__(self, ambient_dim, inequalities=(), open_faces=()):
        self.ambient_dim = int(ambient_dim)
        ineqs = []
        for a, b in inequalities:
            a = tuple(int(x) for x in a)
            if len(a) != self.ambient_dim:
                raise ShapeError("inequality length %d in R^%d" % (len(a), self.ambient_dim))
            ineqs.append((a, Fraction(b)))
        self.inequalities = tuple(ineqs)
        self.open_faces = tuple(open_faces)
        self._dd = None
        self._faces = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def interval(cls, lo, hi):
        return cls(1, [((1,), lo), ((-1,), -Fraction(hi))])

    @classmethod
    def halfline(cls, direction=1):
        return cls(1, [((int(direction),), 0)])

    @classmethod
    def line(cls):
        return cls(1, [])

    @classmethod
    def point(cls):
        return cls(0, [])

    @classmethod
    def origin(cls, m):
        ineqs = []
        for i in range(m):
            e = tuple(1 if j == i else 0 for j in range(m))
            ineqs.append((e, 0))
            ineqs.append((tuple(-x for x in e), 0))
        return cls(m, ineqs)

    @classmethod
    def quadrant(cls, m):
        return cls(m, [(tuple(1 if j == i else 0 for j in range(m)), 0) for i in range(m)])

    @classmethod
    def product(cls, p, q):
        m = p.ambient_dim + q.ambient_dim
        ineqs = [(a + (0,) * q.ambient_dim, b) for a, b in p.inequalities]
        ineqs += [((0,) * p.ambient_dim + a, b) for a, b in q.inequalities]
        return cls(m, ineqs, p.open_faces + q.open_faces)

    @classmethod
    def from_cone_rays(cls, rays, ambient_dim):
        rays = [la.primitive_vector(r) for r in rays]
        return cls.from_generators([(0,) * ambient_dim], rays, (), ambient_dim)

    @classmethod
    def from_generators(cls, vertices, rays=(), lineality=(), ambient_dim=None):
        """H-representation of the closed convex hull of the given generators."""
        vertices = [tuple(Fraction(x) for x in v) for v in vertices]
        if not vertices:
            raise EmptyPolytopeError("from_generators needs at least one vertex")
        m = ambient_dim if ambient_dim is not None else len(vertices[0])
        hom = []
        for v in vertices:
            hom.append(la.primitive_vector((Fraction(1),) + v))
        for r in rays:
            hom.append(la.primitive_vector((0,) + tuple(r)))
        for l in lineality:
            hom.append(la.primitive_vector((0,) + tuple(l)))
            hom.append(la.primitive_vector((0,) + tuple(-x for x in l)))
        G = la.mat(hom)
        normals, lin_normals = _cone_generators(G, m + 1)
        ineqs = []
        for w in normals:
            ineqs.append((tuple(w[1:]), -Fraction(w[0])))
        for w in lin_normals:
            ineqs.append((tuple(w[1:]), -Fraction(w[0])))
            ineqs.append((tuple(-x for x in w[1:]), Fraction(w[0])))
        # drop vacuous rows (0 >= b with b <= 0); an infeasible 0 >= b > 0 stays
        ineqs = [(a, b) for a, b in ineqs if any(x != 0 for x in a) or b > 0]
        return cls(m, ineqs)

    # -- double description ---------------------------------------------------

    def _double_description(self):
        if self._dd is not None:
            return self._dd
        m = self.ambient_dim
        rows = []
        for a, b in self.inequalities:
            den = b.denominator
            rows.append((int(-b * den),) + tuple(x * den for x in a))
        rows.append((1,) + (0,) * m)
        M = la.mat(rows)
        rays_h, lin_h = _cone_generators(M, m + 1)
        vertices = []
        rec_rays = []
        for r in rays_h:
            if r[0] > 0:
                vertices.append(tuple(Fraction(x, r[0]) for x in r[1:]))
            elif any(x != 0 for x in r[1:]):
                rec_rays.append(la.primitive_vector(r[1:]))
        lineality = []
        for l in lin_h:
            assert l[0] == 0
            if any(x != 0 for x in l[1:]):
                lineality.append(la.primitive_vector(l[1:]))
        self._dd = (sorted(set(vertices)), sorted(set(rec_rays)), sorted(set(lineality)))
        return self._dd

    @property
    def is_empty(self):
        return len(self._double_description()[0]) == 0

    @property
    def vertices(self):
        return self._double_description()[0]

    @property
    def recession_rays(self):
        return self._double_description()[1]

    @property
    def lineality(self):
        return self._double_description()[2]

    @property
    def dim(self):
        verts, rays, lin = self._double_description()
        if not verts:
            raise EmptyPolytopeError("dimension of the empty polytope")
        vecs = []
        v0 = verts[0]
        for v in verts[1:]:
            vecs.append(tuple(a - b for a, b in zip(v, v0)))
        vecs.extend(rays)
        vecs.extend(lin)
        vecs = [v for v in vecs if any(x != 0 for x in v)]
        return la.rational_rank(la.mat(vecs)) if vecs else 0

    def contains_lines(self):
        if self.is_empty:
            return False
        return bool(self.lineality)

    def is_complete(self):
        return len(self.open_faces) == 0

    def contains_point(self, p):
        return all(
            sum(Fraction(x) * Fraction(y) for x, y in zip(a, p)) >= b
            for a, b in self.inequalities
        )

    def interior_point(self):
        """A rational point in the relative interior."""
        verts, rays, lin = self._double_description()
        if not verts:
            raise EmptyPolytopeError("interior point of the empty polytope")
        m = self.ambient_dim
        p = [Fraction(0)] * m
        for v in verts:
            for i in range(m):
                p[i] += Fraction(v[i], len(verts))
        for r in rays:
            for i in range(m):
                p[i] += Fraction(r[i])
        return tuple(p)

    # -- faces and strata ------------------------------------------------------

    def face_lattice(self):
        """All nonempty faces (including the polytope itself), by inclusion.

        The list is sorted by (dim, generator ids); zero dimensional faces
        are the corner strata over which the chart is a smooth manifold.
        """
        if self._faces is not None:
            return self._faces
        if self.is_empty:
            raise EmptyPolytopeError("face lattice of the empty polytope")
        verts, rays, lin = self._double_description()
        gens = [("v", i) for i in range(len(verts))] + [("r", i) for i in range(len(rays))]
        gen_vec = {("v", i): verts[i] for i in range(len(verts))}
        gen_vec.update({("r", i): rays[i] for i in range(len(rays))})
        tight_sets = []
        for a, b in self.inequalities:
            T = set()
            for g in gens:
                vec = gen_vec[g]
                val = sum(Fraction(x) * Fraction(y) for x, y in zip(a, vec))
                target = b if g[0] == "v" else 0
                if val == target:
                    T.add(g)
            tight_sets.append(frozenset(T))
        full = frozenset(gens)
        keys = {full}
        frontier = {full}
        while frontier:
            new = set()
            for F in frontier:
                for T in tight_sets:
                    G = F & T
                    if G and G not in keys:
                        new.add(G)
            keys |= new
            frontier = new
        faces = []
        for key in keys:
            fverts = sorted(gen_vec[g] for g in key if g[0] == "v")
            frays = sorted(gen_vec[g] for g in key if g[0] == "r")
            if not fverts:
                continue  # recession-only sets are not faces of the polytope
            tight = frozenset(
                q for q, T in enumerate(tight_sets) if key <= T
            )
            faces.append(Face(key, fverts, frays, list(lin), tight))
        faces.sort(key=lambda f: (f.dim, sorted(f.key)))
        self._faces = faces
        return faces

    def corners(self):
        return [f for f in self.face_lattice() if f.is_corner]

    # -- recession data ----------------------------------------------------------

    def unbounded_span(self):
        """(k, basis) where basis spans the saturation of the ray lattice.

        Every recession ray and lineality direction contributes; k is the
        rank of the resulting saturated sublattice of Z^m.
        """
        if self.is_empty:
            raise EmptyPolytopeError("unbounded span of the empty polytope")
        rows = list(self.recession_rays) + list(self.lineality)
        basis = la.saturation_basis(rows, self.ambient_dim)
        return len(basis), basis

    # -- maps ---------------------------------------------------------------------

    def intersect(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("intersection of polytopes in different spaces")
        return Polytope(
            self.ambient_dim,
            self.inequalities + other.inequalities,
            self.open_faces + other.open_faces,
        )

    def image(self, L):
        """Image polytope under the integer linear map with matrix rows L."""
        rows = [tuple(int(x) for x in r) for r in L]
        m_out = len(rows)
        for r in rows:
            if len(r) != self.ambient_dim:
                raise ShapeError("image map has wrong width")
        verts, rays, lin = self._double_description()
        if not verts:
            raise EmptyPolytopeError("image of the empty polytope")

        def apply(v):
            return tuple(sum(Fraction(c) * Fraction(x) for c, x in zip(row, v)) for row in rows)

        iverts = [apply(v) for v in verts]
        irays = [apply(r) for r in rays if any(apply(r))]
        ilin = [apply(l) for l in lin if any(apply(l))]
        return Polytope.from_generators(iverts, irays, ilin, m_out)

    def slice(self, L, value):
        """The fiber {y : L @ y = value} as a polytope in the same ambient space."""
        ineqs = list(self.inequalities)
        for row, val in zip(L, value):
            row = tuple(int(x) for x in row)
            ineqs.append((row, Fraction(val)))
            ineqs.append((tuple(-x for x in row), -Fraction(val)))
        return Polytope(self.ambient_dim, ineqs)

    def same_set(self, other):
        """Geometric equality (identical vertex/ray/lineality data)."""
        if self.ambient_dim != other.ambient_dim:
            return False
        a = self._double_description()
        b = other._double_description()
        lin_a = la.saturation_basis(a[2], self.ambient_dim) if a[2] else []
        lin_b = la.saturation_basis(b[2], self.ambient_dim) if b[2] else []
        return a[0] == b[0] and a[1] == b[1] and lin_a == lin_b

    # -- value semantics -------------------------------------------------------

    def _canonical_key(self):
        rows = []
        for a, b in self.inequalities:
            den = b.denominator
            rows.append(tuple(x * den for x in a) + (int(b * den),))
        return (self.ambient_dim, tuple(sorted(rows)), tuple(sorted(self.open_faces)))

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self._canonical_key() == other._canonical_key()

    def __hash__(self):
        return hash(self._canonical_key())

    def __repr__(self):
        return "Polytope(R^%d, %d ineqs)" % (self.ambient_dim, len(self.inequalities))


# ---------------------------------------------------------------------------
# Fans
# ---------------------------------------------------------------------------


class FanCone:
    """A cone of a fan, stored by its primitive extreme rays."""

    def __init__(self, rays, ambient_dim):
        self.rays = tuple(sorted(la.primitive_vector(r) for r in rays))
        self.ambient_dim = ambient_dim
        self.polytope = Polytope.from_cone_rays(self.rays, ambient_dim) if self.rays else Polytope.origin(ambient_dim)

    @property
    def key(self):
        return self.rays

    @property
    def dim(self):
        if not self.rays:
            return 0
        return la.rational_rank(la.mat(self.rays))

    def faces(self):
        out = []
        for f in self.polytope.face_lattice():
            out.append(FanCone(f.rays, self.ambient_dim))
        return out


class Fan:
    """A fan given by its maximal cones; faces are closed over on demand."""

    def __init__(self, max_cones, ambient_dim):
        self.ambient_dim = int(ambient_dim)
        self.max_cones = []
        seen = set()
        for rays in max_cones:
            c = FanCone(rays, self.ambient_dim)
            if c.polytope.contains_lines():
                raise UnsupportedFanError("cone %r is not pointed" % (c.rays,))
            if c.key not in seen:
                seen.add(c.key)
                self.max_cones.append(c)
        if not self.max_cones:
            raise UnsupportedFanError("a fan needs at least one cone")
        self._all = None

    def all_cones(self):
        """Every face of every maximal cone, deduplicated by ray set."""
        if self._all is None:
            out = {}
            for c in self.max_cones:
                for f in c.faces():
                    out[f.key] = f
            self._all = out
        return self._all

    def validate_face_intersections(self):
        """Pairwise intersections of maximal cones must be common faces."""
        for i, a in enumerate(self.max_cones):
            akeys = {f.key for f in a.faces()}
            for b in self.max_cones[i + 1 :]:
                inter = a.polytope.intersect(b.polytope)
                key = tuple(sorted(inter.recession_rays))
                bkeys = {f.key for f in b.faces()}
                if key not in akeys or key not in bkeys:
                    raise UnsupportedFanError(
                        "cones %r and %r do not meet along a common face" % (a.rays, b.rays)
                    )

    def is_complete(self):
        """Full-dimensional with every facet shared by exactly two cones."""
        n = self.ambient_dim
        if any(c.dim != n for c in self.max_cones):
            return False
        facet_count = {}
        for c in self.max_cones:
            for f in c.faces():
                if f.dim == n - 1:
                    facet_count[f.key] = facet_count.get(f.key, 0) + 1
        return bool(facet_count) and all(v == 2 for v in facet_count.values())

    def is_smooth(self):
        """Simplicial with each maximal cone spanned by a lattice basis."""
        n = self.ambient_dim
        for c in self.max_cones:
            if len(c.rays) != n:
                return False
            if abs(la.int_det(la.mat(c.rays))) != 1:
                return False
        return True

    def d_vector(self):
        """Number of cones of each dimension 0..n, faces included."""
        d = [0] * (self.ambient_dim + 1)
        for c in self.all_cones().values():
            d[c.dim] += 1
        return tuple(d)


def danilov_betti(fan):
    """Even Betti numbers of the smooth complete toric variety of a fan.

    b_{2k} = sum_{i=k}^{n} (-1)^(i-k) C(i, k) d_{n-i} with d_j the number of
    j-dimensional cones; odd Betti numbers all vanish.
    """
    if not fan.is_complete():
        raise UnsupportedFanError("danilov_betti needs a complete fan")
    if not fan.is_smooth():
        raise UnsupportedFanError("danilov_betti needs a smooth simplicial fan")
    fan.validate_face_intersections()
    n = fan.ambient_dim
    d = fan.d_vector()
    out = []
    for k in range(n + 1):
        out.append(sum((-1) ** (i - k) * comb(i, k) * d[n - i] for i in range(k, n + 1)))
    return tuple(out)
