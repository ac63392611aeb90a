"""Global Betti numbers of an exploded manifold given by a finite good cover.

The cover manifest lists charts and, for every overlapping id-subset, the
overlap chart together with one integer exponent matrix per member chart
(the monomial gluing).  The engine builds the Cech double complex with
constant-form coefficients and zero column differential, takes total
cohomology over Q, and separately assembles the compact-support complex
whose extension maps are the graded adjoints of the restrictions.

Only two gluing classes are computed.  For pure-monomial gluing the
constant-form rows form an honest sub-double-complex and column-wise the
inclusion is a quasi-isomorphism, so total cohomology agrees; for
quadrant-class covers all higher chart cohomology vanishes and only the
nerve row survives.  Anything else is refused rather than silently
computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import intlinalg as la
from .charts import ChartModel, ChartSignature, chart_cohomology, chart_compact_cohomology, restriction_map
from .errors import (
    DimensionMismatchError,
    DualityUnavailableError,
    GluingError,
    InconsistentNerveError,
    ManifestError,
    NotAFamilyError,
    ShapeError,
    UnsupportedFanError,
    UnsupportedGluingError,
)
from .lattice import Fan, Polytope

GLUING_CLASSES = ("quadrant-class", "pure-monomial")


@dataclass
class OverlapData:
    """Chart data of one nonempty intersection plus its gluing matrices."""

    signature: ChartSignature
    maps: dict  # chart id -> exponent matrix rows (m_chart x m_overlap)


@dataclass
class CoverManifest:
    charts: dict  # id -> ChartSignature
    overlaps: dict  # sorted tuple of ids (len >= 2) -> OverlapData
    gluing_class: str = "pure-monomial"
    orientation: str = "standard"

    def simplices(self):
        """All cover simplices: singleton charts plus listed overlaps."""
        singles = [(cid,) for cid in sorted(self.charts)]
        multis = sorted(self.overlaps, key=lambda t: (len(t), t))
        return singles + multis


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidatedCover:
    manifest: CoverManifest
    models: dict  # simplex tuple -> ChartModel
    resmaps: dict  # (sub simplex, simplex) -> RestrictionMap
    N: int


def manifest_issues(manifest: CoverManifest):
    """Structural problems of a manifest, one message per violated rule."""
    issues = []
    if not manifest.charts:
        issues.append("manifest lists no charts")
        return issues
    if manifest.gluing_class not in GLUING_CLASSES:
        issues.append("unsupported gluing class %r" % (manifest.gluing_class,))
    dims = {cid: s.N for cid, s in manifest.charts.items()}
    N = next(iter(dims.values()))
    for cid, d in sorted(dims.items()):
        if d != N:
            issues.append("chart %s has total dimension %d, expected %d" % (cid, d, N))
    for key, ov in sorted(manifest.overlaps.items()):
        if len(key) < 2:
            issues.append("overlap %r has fewer than two members" % (key,))
        if tuple(sorted(key)) != key:
            issues.append("overlap key %r is not sorted" % (key,))
        for cid in key:
            if cid not in manifest.charts:
                issues.append("overlap %r references unknown chart %s" % (key, cid))
        if ov.signature.N != N:
            issues.append("overlap %r has total dimension %d, expected %d" % (key, ov.signature.N, N))
        for cid in key:
            if cid not in ov.maps:
                if cid in manifest.charts and (
                    manifest.charts[cid].m == 0 or ov.signature.m == 0
                ):
                    continue  # the empty matrix is implicit
                issues.append("overlap %r is missing the map for chart %s" % (key, cid))
        if len(key) > 2:
            for sub in combinations(key, len(key) - 1):
                if sub not in manifest.overlaps:
                    issues.append(
                        "overlap %r is listed but its sub-overlap %r is not" % (key, sub)
                    )
    if manifest.gluing_class == "quadrant-class":
        for simplex in manifest.simplices():
            sig = (
                manifest.charts[simplex[0]]
                if len(simplex) == 1
                else manifest.overlaps[simplex].signature
            )
            model = chart_cohomology(sig)
            if model.k != sig.m:
                issues.append(
                    "quadrant-class manifest has simplex %r with k = %d < m = %d"
                    % (simplex, model.k, sig.m)
                )
    return issues


def validate_manifest(manifest: CoverManifest) -> ValidatedCover:
    """Check a manifest and derive every restriction map the complex needs.

    Raises the most specific error available (DimensionMismatchError,
    InconsistentNerveError, UnsupportedGluingError, GluingError) and falls
    back to ManifestError for anything else.
    """
    issues = manifest_issues(manifest)
    if issues:
        msg = "; ".join(issues)
        if any("total dimension" in s for s in issues):
            raise DimensionMismatchError(msg)
        if any("sub-overlap" in s for s in issues):
            raise InconsistentNerveError(msg)
        if any("gluing class" in s for s in issues):
            raise UnsupportedGluingError(msg)
        raise ManifestError(msg)

    models = {}
    for simplex in manifest.simplices():
        sig = (
            manifest.charts[simplex[0]]
            if len(simplex) == 1
            else manifest.overlaps[simplex].signature
        )
        models[simplex] = chart_cohomology(sig)

    resmaps = {}
    for key, ov in sorted(manifest.overlaps.items()):
        for cid in key:
            A = _overlap_matrix(manifest, key, cid)
            resmaps[((cid,), key)] = restriction_map(models[(cid,)], models[key], A)
    for key in sorted(manifest.overlaps, key=lambda t: (len(t), t)):
        if len(key) == 2:
            continue
        for sub in combinations(key, len(key) - 1):
            A = _derive_sub_map(manifest, models, sub, key)
            resmaps[(sub, key)] = restriction_map(models[sub], models[key], A)
    N = next(iter(manifest.charts.values())).N
    return ValidatedCover(manifest=manifest, models=models, resmaps=resmaps, N=N)


def _overlap_matrix(manifest, key, cid):
    ov = manifest.overlaps[key]
    m_c = manifest.charts[cid].m
    m_o = ov.signature.m
    if cid in ov.maps:
        A = la.mat(ov.maps[cid]) if m_c and m_o else la.zeros(m_c, m_o)
    else:
        A = la.zeros(m_c, m_o)
    if A.shape != (m_c, m_o):
        raise ShapeError(
            "map for chart %s in overlap %r has shape %r, expected (%d, %d)"
            % (cid, key, A.shape, m_c, m_o)
        )
    return A


def _derive_sub_map(manifest, models, sub, key):
    """Exponent matrix of the inclusion U_key into U_sub.

    Solves A_{i,sub} @ X = A_{i,key} for all members i of sub; the manifest
    format only carries chart-to-overlap matrices, so deeper inclusions are
    derived.  Ambiguity that would change the induced cohomology map is
    rejected.
    """
    m_sub = manifest.overlaps[sub].signature.m
    m_key = manifest.overlaps[key].signature.m
    stacked = []
    rhs = []
    for cid in sub:
        stacked.append(_overlap_matrix(manifest, sub, cid))
        rhs.append(_overlap_matrix(manifest, key, cid))
    S = np.concatenate(stacked, axis=0) if m_sub else la.zeros(0, 0)
    T = np.concatenate(rhs, axis=0) if m_key else la.zeros(S.shape[0] if m_sub else 0, 0)
    if m_sub == 0:
        return la.zeros(0, m_key)
    if m_key == 0:
        return la.zeros(m_sub, 0)
    X = la.solve(S, T)
    if X is None:
        raise GluingError(
            "overlap %r: no monomial inclusion into %r is compatible with the chart maps"
            % (key, sub)
        )
    hom = la.kernel_basis(S, cols=m_sub)
    if hom:
        gens = models[sub].generators
        for z in hom:
            for g in gens:
                if sum(Fraction(a) * Fraction(b) for a, b in zip(z, g)) != 0:
                    raise GluingError(
                        "overlap %r: inclusion into %r is ambiguous on cohomology" % (key, sub)
                    )
    return X


# ---------------------------------------------------------------------------
# Total complexes
# ---------------------------------------------------------------------------


@dataclass
class TotalComplex:
    """Graded pieces and differentials of an assembled total complex."""

    dims: dict  # total degree -> dimension
    differentials: dict  # total degree r -> matrix C^r -> C^{r+1}
    pieces: dict = field(default_factory=dict)  # (simplex, q) -> (degree, offset, size)

    def betti(self):
        degrees = sorted(self.dims)
        out = {}
        for r in degrees:
            dim = self.dims[r]
            rk_out = la.rational_rank(self.differentials[r]) if r in self.differentials else 0
            rk_in = (
                la.rational_rank(self.differentials[r - 1])
                if (r - 1) in self.differentials
                else 0
            )
            out[r] = dim - rk_out - rk_in
        return out

    def euler(self):
        return sum((-1) ** r * d for r, d in self.dims.items())


@dataclass
class BettiTable:
    dim: int
    betti: tuple
    compact: tuple = None

    def text(self):
        lines = ["total dimension %d" % self.dim]
        header = "deg " + " ".join("%4d" % j for j in range(self.dim + 1))
        lines.append(header)
        lines.append("H   " + " ".join("%4d" % b for b in self.betti))
        if self.compact is not None:
            lines.append("Hc  " + " ".join("%4d" % c for c in self.compact))
        return "\n".join(lines)

    def machine_lines(self):
        out = ["betti %d %d" % (j, b) for j, b in enumerate(self.betti) if b]
        if self.compact is not None:
            out += ["compact %d %d" % (j, c) for j, c in enumerate(self.compact) if c]
        return out


def build_total_complex(vc: ValidatedCover) -> TotalComplex:
    """Cech total complex with constant-form coefficients.

    Sign convention: strictly increasing index tuples, the Cech sum carries
    (-1)^a on omission of the a-th index, and the total differential carries
    an extra (-1)^q on the horizontal map from a (p, q) piece.  The column
    differential is zero on constant forms.
    """
    simplices = vc.manifest.simplices()
    pieces = {}
    dims = {}
    for simplex in simplices:
        model = vc.models[simplex]
        p = len(simplex) - 1
        for q in range(model.h1_dim + 1):
            size = comb(model.h1_dim, q)
            r = p + q
            offset = dims.get(r, 0)
            pieces[(simplex, q)] = (r, offset, size)
            dims[r] = offset + size
    diffs = {}
    for r in sorted(dims):
        if r + 1 in dims:
            diffs[r] = la.zeros(dims[r + 1], dims[r])
    for simplex in simplices:
        if len(simplex) < 2:
            continue
        model = vc.models[simplex]
        for a in range(len(simplex)):
            sub = simplex[:a] + simplex[a + 1 :]
            rmap = vc.resmaps[(sub, simplex)]
            submodel = vc.models[sub]
            for q in range(min(model.h1_dim, submodel.h1_dim) + 1):
                if (sub, q) not in pieces or (simplex, q) not in pieces:
                    continue
                r_src, off_src, size_src = pieces[(sub, q)]
                r_tgt, off_tgt, size_tgt = pieces[(simplex, q)]
                if size_src == 0 or size_tgt == 0:
                    continue
                block = rmap.exterior(q)
                sign = (-1) ** a * (-1) ** q
                D = diffs[r_src]
                for i in range(size_tgt):
                    for j in range(size_src):
                        D[off_tgt + i, off_src + j] += sign * block[i, j]
    _assert_complex(diffs, dims)
    return TotalComplex(dims=dims, differentials=diffs, pieces=pieces)


def build_compact_complex(vc: ValidatedCover) -> TotalComplex:
    """Compact-support total complex: extension maps are graded adjoints.

    The piece of an overlap simplex I at form degree q has the dimensions of
    the chart compact model; the differential lowers the Cech index, and the
    block from I to J is the transpose of the Lambda^{N-q} restriction.
    Total degree is q - p.
    """
    simplices = vc.manifest.simplices()
    N = vc.N
    for simplex in simplices:
        sig = vc.models[simplex].signature
        chart_compact_cohomology(sig)  # raises DualityUnavailableError if not allowed
    pieces = {}
    dims = {}
    for simplex in simplices:
        model = vc.models[simplex]
        p = len(simplex) - 1
        for q in range(N + 1):
            size = model.betti[N - q] if 0 <= N - q < len(model.betti) else 0
            r = q - p
            offset = dims.get(r, 0)
            pieces[(simplex, q)] = (r, offset, size)
            dims[r] = offset + size
    diffs = {}
    for r in sorted(dims):
        if r + 1 in dims:
            diffs[r] = la.zeros(dims[r + 1], dims[r])
    for simplex in simplices:
        if len(simplex) < 2:
            continue
        model = vc.models[simplex]
        for a in range(len(simplex)):
            sub = simplex[:a] + simplex[a + 1 :]
            rmap = vc.resmaps[(sub, simplex)]
            submodel = vc.models[sub]
            for q in range(N + 1):
                jdeg = N - q
                if jdeg < 0:
                    continue
                src = pieces.get((simplex, q))
                tgt = pieces.get((sub, q))
                if src is None or tgt is None or src[2] == 0 or tgt[2] == 0:
                    continue
                block = rmap.exterior(jdeg).T
                sign = (-1) ** a * (-1) ** q
                r_src, off_src, size_src = src
                _, off_tgt, size_tgt = tgt
                D = diffs[r_src]
                for i in range(size_tgt):
                    for j in range(size_src):
                        D[off_tgt + i, off_src + j] += sign * block[i, j]
    _assert_complex(diffs, dims)
    return TotalComplex(dims=dims, differentials=diffs, pieces=pieces)


def _assert_complex(diffs, dims):
    for r in sorted(dims):
        if r in diffs and (r + 1) in diffs:
            prod = diffs[r + 1] @ diffs[r]
            if prod.size and any(x != 0 for x in prod.flat):
                raise AssertionError("differential does not square to zero at degree %d" % r)


def total_betti(manifest: CoverManifest) -> BettiTable:
    """Global Betti numbers b_r = dim ker D_r - rank D_{r-1}."""
    if manifest.gluing_class not in GLUING_CLASSES:
        raise UnsupportedGluingError(
            "gluing class %r is refused; supported: %s"
            % (manifest.gluing_class, ", ".join(GLUING_CLASSES))
        )
    vc = validate_manifest(manifest)
    complex_ = build_total_complex(vc)
    by_degree = complex_.betti()
    N = vc.N
    for r, b in by_degree.items():
        if r > N and b:
            raise ManifestError("nonzero cohomology in degree %d above the dimension %d" % (r, N))
    return BettiTable(dim=N, betti=tuple(by_degree.get(r, 0) for r in range(N + 1)))


def total_compact_betti(manifest: CoverManifest) -> BettiTable:
    """Compact-support Betti row, computed from the adjoint complex."""
    if manifest.gluing_class not in GLUING_CLASSES:
        raise UnsupportedGluingError("gluing class %r is refused" % (manifest.gluing_class,))
    vc = validate_manifest(manifest)
    complex_ = build_compact_complex(vc)
    by_degree = complex_.betti()
    N = vc.N
    for r, b in by_degree.items():
        if (r > N or r < 0) and b:
            raise ManifestError("nonzero compact cohomology in degree %d" % r)
    return BettiTable(
        dim=N,
        betti=tuple(by_degree.get(r, 0) for r in range(N + 1)),
    )


@dataclass
class PDReport:
    dim: int
    rows: list  # (degree j, c_j, b_{N-j}, ok)
    passed: bool

    def text(self):
        lines = []
        for j, c, b, ok in self.rows:
            lines.append(
                "deg %d: c_%d = %d vs b_%d = %d  [%s]"
                % (j, j, c, self.dim - j, b, "ok" if ok else "MISMATCH")
            )
        lines.append("poincare symmetry: %s" % ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)

    def machine_lines(self):
        out = ["pd %d %d %d %d" % (j, c, b, 1 if ok else 0) for j, c, b, ok in self.rows]
        out.append("pdcheck %s" % ("pass" if self.passed else "fail"))
        return out


def pd_symmetry_check(manifest: CoverManifest) -> PDReport:
    """Assert c_j = b_{N-j}; both rows come from different code paths."""
    b = total_betti(manifest)
    c = total_compact_betti(manifest)
    rows = []
    ok_all = True
    for j in range(b.dim + 1):
        ok = c.betti[j] == b.betti[b.dim - j]
        ok_all = ok_all and ok
        rows.append((j, c.betti[j], b.betti[b.dim - j], ok))
    return PDReport(dim=b.dim, rows=rows, passed=ok_all)


# ---------------------------------------------------------------------------
# Toric refinement manifests
# ---------------------------------------------------------------------------


def refinement_manifest(fan: Fan, base_m: int) -> CoverManifest:
    """Cover of the refinement of T^base_m along a complete fan.

    One chart per maximal cone; one overlap per id-subset of size >= 2 with
    polytope the common face (which always exists, every cone contains the
    origin) and identity exponent matrices.
    """
    if fan.ambient_dim != base_m:
        raise ShapeError("fan lives in R^%d, not R^%d" % (fan.ambient_dim, base_m))
    if not fan.is_complete():
        raise UnsupportedFanError("refinement_manifest needs a complete fan")
    fan.validate_face_intersections()
    cones = sorted(fan.max_cones, key=lambda c: c.key)
    ids = ["C%d" % i for i in range(len(cones))]
    charts = {
        cid: ChartSignature(0, base_m, cone.polytope) for cid, cone in zip(ids, cones)
    }
    ident = [[1 if i == j else 0 for j in range(base_m)] for i in range(base_m)]
    overlaps = {}
    for size in range(2, len(cones) + 1):
        for subset in combinations(range(len(cones)), size):
            poly = cones[subset[0]].polytope
            for t in subset[1:]:
                poly = poly.intersect(cones[t].polytope)
            key = tuple(ids[t] for t in subset)
            overlaps[key] = OverlapData(
                signature=ChartSignature(0, base_m, poly),
                maps={ids[t]: ident for t in subset},
            )
    return CoverManifest(charts=charts, overlaps=overlaps, gluing_class="pure-monomial")


# ---------------------------------------------------------------------------
# Independent oracles and family checks
# ---------------------------------------------------------------------------


def nerve_betti(manifest: CoverManifest) -> tuple:
    """Simplicial cochain Betti numbers of the nerve, fully independent of
    the chart models (plain coboundary ranks over Q)."""
    verts = sorted(manifest.charts)
    index = {v: i for i, v in enumerate(verts)}
    simplices = {0: [frozenset([index[v]]) for v in verts]}
    for key in manifest.overlaps:
        simplices.setdefault(len(key) - 1, []).append(frozenset(index[c] for c in key))
    for p in simplices:
        simplices[p] = sorted(simplices[p], key=sorted)
    top = max(simplices)
    ranks = {}
    for p in range(top + 1):
        cur = simplices.get(p, [])
        nxt = simplices.get(p + 1, [])
        D = la.zeros(len(nxt), len(cur))
        pos = {s: i for i, s in enumerate(cur)}
        for i, s in enumerate(nxt):
            elems = sorted(s)
            for a, v in enumerate(elems):
                face = frozenset(e for e in elems if e != v)
                if face in pos:
                    D[i, pos[face]] += (-1) ** a
        ranks[p] = la.rational_rank(D)
    out = []
    for p in range(top + 1):
        dim = len(simplices.get(p, []))
        out.append(dim - ranks.get(p, 0) - ranks.get(p - 1, 0))
    return tuple(out)


@dataclass
class FamilyReport:
    base_h1: int
    total_h1: int
    fiber_h1: int
    counts: tuple  # (m, m + m' - l, m' - l) evaluated
    passed: bool

    def text(self):
        verdict = "pass" if self.passed else "FAIL"
        return (
            "H1(total) = %d, H1(base) = %d, H1(fiber) = %d  [%s]\n"
            "count formulas (m, m+m'-l, m'-l) = %r"
            % (self.total_h1, self.base_h1, self.fiber_h1, verdict, self.counts)
        )

    def machine_lines(self):
        return [
            "family %d %d %d %s"
            % (self.total_h1, self.base_h1, self.fiber_h1, "pass" if self.passed else "fail")
        ]


def family_h1_check(base: ChartSignature, total: ChartSignature, alpha) -> FamilyReport:
    """Additivity of H^1 along a monomial family projection.

    ``alpha`` is the m_base x m_total exponent matrix of the projection on
    torus coordinates (base tropical coordinates as integer combinations of
    total ones).  The tropical projection must map the total polytope onto
    the base polytope; l is the rank of the unbounded span of a fiber.
    """
    A = la.mat(alpha) if base.m else la.zeros(0, total.m)
    if A.shape != (base.m, total.m):
        raise ShapeError("alpha has shape %r, expected (%d, %d)" % (A.shape, base.m, total.m))
    if total.n < base.n:
        raise NotAFamilyError("total chart has fewer real coordinates than the base")
    rows = [tuple(int(x) for x in A[i]) for i in range(base.m)]
    if base.m:
        if la.rational_rank(A) != base.m:
            raise NotAFamilyError("tropical projection is not surjective")
        image = total.polytope.image(rows)
        if not image.same_set(base.polytope):
            raise NotAFamilyError("tropical projection does not map onto the base polytope")
    m_prime = total.m - base.m
    if m_prime < 0:
        raise NotAFamilyError("total torus rank is smaller than the base torus rank")
    p = base.polytope.interior_point() if base.m else ()
    fiber = total.polytope.slice(rows, p) if base.m else total.polytope
    if fiber.is_empty:
        raise NotAFamilyError("fiber over an interior point is empty")
    l = fiber.unbounded_span()[0]
    base_h1 = _h1_dim(base)
    total_h1 = _h1_dim(total)
    fiber_h1 = m_prime - l
    counts = (base.m, base.m + m_prime - l, m_prime - l)
    passed = total_h1 == base_h1 + fiber_h1
    return FamilyReport(
        base_h1=base_h1, total_h1=total_h1, fiber_h1=fiber_h1, counts=counts, passed=passed
    )


def _h1_dim(sig: ChartSignature) -> int:
    model = chart_cohomology(sig)
    return sig.m - model.k
