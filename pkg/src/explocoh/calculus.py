"""Desk-scale analytic verification on a single chart.

Integration follows the stratum-sum definition: a top form only sees the
smooth strata, which sit over the zero dimensional corners of the chart
polytope.  A FormExpr is read in the log-polar coordinates of one corner
stratum (the canonical first corner) and extended by zero to the others,
so a global form concentrated near several corners is handled as several
FormExpr values; everything the fixtures need lives near one corner.

The positive orientation is dx_1..dx_n ^ dr_1 ^ dth_1 ^ .. ^ dr_m ^ dth_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import expr as ex
from .charts import ChartSignature, chart_cohomology, chart_compact_cohomology
from .errors import (
    IntegralVectorSurjectivityError,
    ShapeError,
    UnsupportedFormError,
)
from . import intlinalg as la
from .expr import Expr
from .forms import FormExpr, covector_order, var_name
from .quadrature import Axis, QuadratureSpec, integrate_1d, integrate_product, integrate_tensor


@dataclass
class IntegralResult:
    value: float
    bound: float

    def machine_lines(self):
        return ["value %.12g bound %.3g" % (self.value, self.bound)]


def _axes_for(sig, boundary_x=None):
    axes = {}
    for j in range(1, sig.n + 1):
        axes[var_name(("x", j))] = Axis("negline" if boundary_x == j else "line")
    for i in range(1, sig.m + 1):
        axes[var_name(("r", i))] = Axis("uline")
        axes[var_name(("th", i))] = Axis("circle")
    return axes


def _integrate_coefficient(entries, axes, spec):
    """Sum of integrals of (scalar, Expr) pairs over the product of axes.

    Each expression term is split into univariate factors per axis where
    possible; genuinely multivariate factors fall back to a tensor grid.
    """
    total = 0.0
    bound = 0.0
    names = sorted(axes)
    for scalar, coef in entries:
        if scalar == 0.0 or coef.is_zero:
            continue
        for term_coef, factors in coef.terms:
            buckets = {name: [] for name in names}
            const = []
            separable = True
            for base, e in factors:
                vs = sorted(ex._base_vars(base) & set(names))
                if len(vs) == 0:
                    const.append((base, e))
                elif len(vs) == 1:
                    buckets[vs[0]].append((base, e))
                else:
                    separable = False
                    break
            if separable:
                cval = Expr([(Fraction(1), tuple(const))]).evaluate({}) if const else 1.0
                fns_axes = []
                for name in names:
                    fns_axes.append((_bucket_fn(buckets[name], name), axes[name]))
                v, b = integrate_product(fns_axes, spec)
                total += scalar * float(term_coef) * cval * v
                bound += abs(scalar * float(term_coef) * cval) * b
            else:
                term_expr = Expr([(term_coef, factors)])

                def fn(*arrays, _e=term_expr):
                    env = dict(zip(names, arrays))
                    return _e.evaluate(env)

                v, b = integrate_tensor(fn, [axes[name] for name in names], spec)
                total += scalar * v
                bound += abs(scalar) * b
    return IntegralResult(total, bound)


def _bucket_fn(factors, name):
    e = Expr([(Fraction(1), tuple(factors))])

    def fn(pts):
        return e.evaluate({name: pts})

    return fn


def integrate(omega, sig, spec=None, boundary_x=None):
    """Integral of a top degree form over the chart.

    The form is read on the canonical corner stratum; charts whose polytope
    has no corner have no smooth strata and integrate to zero exactly.
    """
    spec = spec or QuadratureSpec()
    N = sig.N
    if omega.is_zero:
        return IntegralResult(0.0, 0.0)
    if omega.degree != N:
        raise ShapeError("integrand has degree %r on a dimension %d chart" % (omega.degree, N))
    if not sig.polytope.corners():
        return IntegralResult(0.0, 0.0)
    top = tuple(covector_order(sig.n, sig.m))
    coef = omega.components.get(top)
    if coef is None:
        return IntegralResult(0.0, 0.0)
    axes = _axes_for(sig, boundary_x=boundary_x)
    return _integrate_coefficient([(1.0, coef)], axes, spec)


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------


@dataclass
class StratumCheck:
    face_dim: int
    direction: tuple
    status: str  # "symbolic", "sampled", "violated"
    worst: float

    def describe(self):
        return "stratum dim %d, direction %r: %s (max |value| %.2e)" % (
            self.face_dim,
            self.direction,
            self.status,
            self.worst,
        )


@dataclass
class AdmissibilityReport:
    checks: list
    passed: bool

    def text(self):
        lines = [c.describe() for c in self.checks]
        lines.append("admissible: %s" % ("yes" if self.passed else "NO"))
        return "\n".join(lines)


def check_admissible(omega, sig, samples=100, tol=1e-9, seed=7):
    """Vanishing conditions of the admissible complex, stratum by stratum.

    On every positive dimensional stratum the form must annihilate the
    radial lattice directions of the stratum (the integral vectors there)
    and, for each direction in the recession cone of the stratum's face,
    the matching angular direction (swept out by maps of the open-ray
    torus).  Each contraction is accepted symbolically when identically
    zero, otherwise sampled deep in the stratum.
    """
    rng = np.random.default_rng(seed)
    checks = []
    passed = True
    for face in sig.polytope.face_lattice():
        if face.dim == 0:
            continue
        interior = np.array([float(x) for x in face.interior_direction()], dtype=float)
        scale = np.max(np.abs(interior)) if interior.size else 0.0
        if scale > 0:
            interior = interior / scale  # unit depth per sampled offset
        tasks = [(v, "r") for v in face.lattice_directions()]
        tasks += [(v, "th") for v in face.recession_directions()]
        for v, kind in tasks:
            eta = omega.contract(v, kind)
            if eta.is_zero:
                checks.append(StratumCheck(face.dim, v, "symbolic", 0.0))
                continue
            worst = 0.0
            for _ in range(samples):
                env = {}
                for j in range(1, sig.n + 1):
                    env["x%d" % j] = float(rng.uniform(-2, 2))
                depth = float(rng.uniform(30, 60))
                base = rng.uniform(-2, 2, size=sig.m)
                for i in range(1, sig.m + 1):
                    env["r%d" % i] = float(base[i - 1] - depth * interior[i - 1])
                    env["th%d" % i] = float(rng.uniform(0, 2 * math.pi))
                for coef in eta.components.values():
                    worst = max(worst, abs(float(coef.evaluate(env))))
            status = "sampled" if worst <= tol else "violated"
            passed = passed and status != "violated"
            checks.append(StratumCheck(face.dim, v, status, worst))
    return AdmissibilityReport(checks=checks, passed=passed)


# ---------------------------------------------------------------------------
# Stokes
# ---------------------------------------------------------------------------


@dataclass
class StokesReport:
    interior: IntegralResult
    boundary: IntegralResult
    discrepancy: float
    admissible: bool
    annotation: str

    def text(self):
        lines = [
            "integral of d(form) over the chart: %.9g (bound %.2g)"
            % (self.interior.value, self.interior.bound),
            "integral of the form over the boundary: %.9g (bound %.2g)"
            % (self.boundary.value, self.boundary.bound),
            "discrepancy: %.9g" % self.discrepancy,
        ]
        if self.annotation:
            lines.append(self.annotation)
        return "\n".join(lines)

    def machine_lines(self):
        return [
            "value %.12g bound %.3g" % (self.discrepancy, self.interior.bound + self.boundary.bound),
            "violated %d" % (0 if self.admissible else 1),
        ]


def stokes_check(omega, sig, spec=None, boundary=False):
    """Compare the chart integral of d(omega) with the boundary integral.

    ``boundary`` turns the x_1 factor into (-inf, 0]; the boundary term is
    then the restriction to x_1 = 0, oriented outward-normal-first.  When
    the form fails the admissibility conditions the report says so: a
    discrepancy is then expected rather than a bug.
    """
    spec = spec or QuadratureSpec()
    if omega.degree != sig.N - 1:
        raise ShapeError("stokes_check needs a degree N-1 form")
    adm = check_admissible(omega, sig)
    interior = integrate(omega.d(), sig, spec, boundary_x=1 if boundary else None)
    if boundary:
        if sig.n < 1:
            raise ShapeError("boundary spec needs at least one x coordinate")
        boundary_val = _boundary_integral(omega, sig, spec)
    else:
        boundary_val = IntegralResult(0.0, 0.0)
    disc = abs(interior.value - boundary_val.value)
    annotation = "" if adm.passed else "hypothesis violated - discrepancy expected"
    return StokesReport(
        interior=interior,
        boundary=boundary_val,
        discrepancy=disc,
        admissible=adm.passed,
        annotation=annotation,
    )


def _boundary_integral(omega, sig, spec):
    """Integral over {x_1 = 0} of the part of omega without dx_1."""
    rest = tuple(c for c in covector_order(sig.n, sig.m) if c != ("x", 1))
    coef = omega.components.get(rest)
    if coef is None:
        return IntegralResult(0.0, 0.0)
    coef0 = coef.substitute({"x1": Expr.number(0)})
    axes = _axes_for(sig)
    del axes["x1"]
    return _integrate_coefficient([(1.0, coef0)], axes, spec)


# ---------------------------------------------------------------------------
# Fiber integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Projection:
    """Coordinate-drop projection: the kept indices define the base chart."""

    keep_x: tuple
    keep_tori: tuple

    def base_signature(self, total: ChartSignature) -> ChartSignature:
        rows = []
        for i in self.keep_tori:
            rows.append(tuple(1 if j == i - 1 else 0 for j in range(total.m)))
        if self.keep_tori:
            base_p = total.polytope.image(rows)
        else:
            from .lattice import Polytope

            base_p = Polytope.point()
        return ChartSignature(len(self.keep_x), len(self.keep_tori), base_p)

    def dropped_x(self, total):
        return tuple(j for j in range(1, total.n + 1) if j not in self.keep_x)

    def dropped_tori(self, total):
        return tuple(i for i in range(1, total.m + 1) if i not in self.keep_tori)


@dataclass
class PushedForm:
    """Result of fiber integration: scalars times base forms.

    The coefficients are exact expressions; the scalars absorb the numeric
    fiber integrals, so the object is quadrature-backed rather than purely
    symbolic.
    """

    n: int
    m: int
    terms: list  # (float scalar, Expr coefficient, base monomial)
    bound: float

    @property
    def is_zero(self):
        return not self.terms

    def wedge_with(self, alpha: FormExpr):
        """alpha ^ (this form), for the adjunction integrand."""
        if (alpha.n, alpha.m) != (self.n, self.m):
            raise ShapeError("forms live on different charts")
        from .forms import _merge_monomials

        order = {c: i for i, c in enumerate(covector_order(self.n, self.m))}
        out = []
        for am, ac in alpha.components.items():
            for scalar, coef, mono in self.terms:
                merged, sign = _merge_monomials(am, mono, order)
                if sign == 0:
                    continue
                out.append((scalar * sign, ac * coef, merged))
        return PushedForm(n=self.n, m=self.m, terms=out, bound=self.bound)

    def text(self):
        if not self.terms:
            return "0"
        bits = []
        for scalar, coef, mono in self.terms:
            covs = " ^ ".join("d%s" % var_name(c) for c in mono) or "1"
            bits.append("%.9g * (%s) * %s" % (scalar, ex.format_expr(coef), covs))
        return " + ".join(bits)


def check_integral_vector_surjectivity(total: ChartSignature, proj: Projection):
    """The tropical projection must carry the recession lattice of the total
    polytope onto the recession lattice of the base polytope."""
    base = proj.base_signature(total)
    rows = [
        tuple(1 if j == i - 1 else 0 for j in range(total.m)) for i in proj.keep_tori
    ]
    src = list(total.polytope.recession_rays) + list(total.polytope.lineality)
    src_lattice = la.saturation_basis(src, total.m) if src else []
    image = []
    for b in src_lattice:
        image.append(tuple(sum(r[j] * b[j] for j in range(total.m)) for r in rows))
    tgt = list(base.polytope.recession_rays) + list(base.polytope.lineality)
    tgt_lattice = la.saturation_basis(tgt, base.m) if tgt else []
    image = [v for v in image if any(v)]
    if not la.lattices_equal(image, tgt_lattice, base.m):
        raise IntegralVectorSurjectivityError(
            "projection image lattice %r differs from the base recession lattice %r"
            % (image, tgt_lattice)
        )
    return base


def fiber_integrate(omega, total: ChartSignature, proj: Projection, spec=None):
    """Pushforward along a coordinate-drop projection.

    Fibers are oriented so that pullback(base volume) ^ fiber volume is the
    total volume.  Each term must factor into base and fiber parts; the
    fiber part has to be the full fiber volume for the term to survive.
    """
    spec = spec or QuadratureSpec()
    base = check_integral_vector_surjectivity(total, proj)
    dropped_x = proj.dropped_x(total)
    dropped_tori = proj.dropped_tori(total)
    fiber_covs = [("x", j) for j in dropped_x]
    for i in dropped_tori:
        fiber_covs += [("r", i), ("th", i)]
    fiber_covs = set(fiber_covs)
    fiber_vars = {var_name(c) for c in fiber_covs}
    x_map = {j_old: pos + 1 for pos, j_old in enumerate(proj.keep_x)}
    torus_map = {i_old: pos + 1 for pos, i_old in enumerate(proj.keep_tori)}
    order = {c: i for i, c in enumerate(covector_order(total.n, total.m))}
    fiber_axes = {}
    for j in dropped_x:
        fiber_axes[var_name(("x", j))] = Axis("line")
    for i in dropped_tori:
        fiber_axes[var_name(("r", i))] = Axis("uline")
        fiber_axes[var_name(("th", i))] = Axis("circle")
    fiber_vol = tuple(sorted(fiber_covs, key=order.get))
    out = []
    bound = 0.0
    for mono, coef in omega.components.items():
        fpart = tuple(c for c in mono if c in fiber_covs)
        bpart = tuple(c for c in mono if c not in fiber_covs)
        if fpart != fiber_vol:
            continue
        sign = _split_sign(mono, bpart, fpart, order)
        entries = _split_coefficient(coef, fiber_vars)
        for base_expr, fiber_expr in entries:
            val, b = _integrate_expr_over(fiber_expr, fiber_axes, spec)
            new_mono = tuple(
                (c[0], x_map[c[1]] if c[0] == "x" else torus_map[c[1]]) for c in bpart
            )
            renamed = base_expr.substitute(_rename_mapping(x_map, torus_map))
            out.append((sign * val, renamed, new_mono))
            bound += abs(b)
    merged = {}
    for scalar, coefficient, mono in out:
        key = (mono, coefficient)
        merged[key] = merged.get(key, 0.0) + scalar
    terms = [(s, c, m) for (m, c), s in merged.items() if s != 0.0]
    return PushedForm(n=base.n, m=base.m, terms=terms, bound=bound)


def _rename_mapping(x_map, torus_map):
    mapping = {}
    for old, new in x_map.items():
        mapping["x%d" % old] = Expr.var("x%d" % new)
    for old, new in torus_map.items():
        mapping["r%d" % old] = Expr.var("r%d" % new)
        mapping["th%d" % old] = Expr.var("th%d" % new)
    return mapping


def _split_sign(mono, bpart, fpart, order):
    """Sign of reordering mono (sorted) as bpart followed by fpart."""
    seq = list(bpart) + list(fpart)
    idx = [order[c] for c in seq]
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign


def _split_coefficient(coef, fiber_vars):
    """Split each term into (base factor, fiber factor) expressions."""
    out = []
    for term_coef, factors in coef.terms:
        base_factors = []
        fiber_factors = []
        for basef, e in factors:
            vs = ex._base_vars(basef)
            if vs & fiber_vars:
                if vs - fiber_vars:
                    raise UnsupportedFormError(
                        "coefficient mixes base and fiber variables in one factor"
                    )
                fiber_factors.append((basef, e))
            else:
                base_factors.append((basef, e))
        out.append(
            (
                Expr([(term_coef, tuple(base_factors))]),
                Expr([(Fraction(1), tuple(fiber_factors))]),
            )
        )
    return out


def _integrate_expr_over(expression, axes, spec):
    res = _integrate_coefficient([(1.0, expression)], axes, spec)
    return res.value, res.bound


def integrate_pushed(pushed: PushedForm, base: ChartSignature, spec=None):
    spec = spec or QuadratureSpec()
    if not base.polytope.corners():
        return IntegralResult(0.0, 0.0)
    top = tuple(covector_order(base.n, base.m))
    entries = [(s, c) for s, c, mono in pushed.terms if mono == top]
    axes = _axes_for(base)
    res = _integrate_coefficient(entries, axes, spec)
    return IntegralResult(res.value, res.bound + pushed.bound)


def pullback_through_projection(alpha, total: ChartSignature, proj: Projection):
    """Pullback of a base form along the coordinate-drop projection."""
    x_map = {pos + 1: j_old for pos, j_old in enumerate(proj.keep_x)}
    torus_map = {pos + 1: i_old for pos, i_old in enumerate(proj.keep_tori)}
    return alpha.rename(total.n, total.m, x_map, torus_map)


@dataclass
class AdjunctionReport:
    lhs: IntegralResult  # integral over the base of alpha ^ pushforward
    rhs: IntegralResult  # integral over the total chart of pullback ^ form
    difference: float
    tolerance: float
    passed: bool

    def text(self):
        return (
            "base side: %.9g (bound %.2g)\n"
            "total side: %.9g (bound %.2g)\n"
            "difference %.3g against tolerance %.3g: %s"
            % (
                self.lhs.value,
                self.lhs.bound,
                self.rhs.value,
                self.rhs.bound,
                self.difference,
                self.tolerance,
                "pass" if self.passed else "FAIL",
            )
        )

    def machine_lines(self):
        return [
            "value %.12g bound %.3g" % (self.difference, self.lhs.bound + self.rhs.bound),
            "adjunction %s" % ("pass" if self.passed else "fail"),
        ]


def adjunction_check(alpha, omega, total: ChartSignature, proj: Projection, spec=None):
    """Both sides of the pushforward adjunction, compared numerically."""
    spec = spec or QuadratureSpec()
    base = proj.base_signature(total)
    pushed = fiber_integrate(omega, total, proj, spec)
    lhs = integrate_pushed(pushed.wedge_with(alpha), base, spec)
    pulled = pullback_through_projection(alpha, total, proj)
    rhs = integrate(pulled.wedge(omega), total, spec)
    diff = abs(lhs.value - rhs.value)
    return AdjunctionReport(
        lhs=lhs,
        rhs=rhs,
        difference=diff,
        tolerance=spec.tolerance,
        passed=diff <= max(spec.tolerance, lhs.bound + rhs.bound),
    )


# ---------------------------------------------------------------------------
# Numeric duality pairing
# ---------------------------------------------------------------------------


@dataclass
class PairingResult:
    degree: int
    matrix: np.ndarray  # normalized entries
    rank: int
    expected_rank: int
    max_entry_error: float
    passed: bool

    def text(self):
        lines = ["pairing matrix in degree %d (normalized):" % self.degree]
        for row in self.matrix:
            lines.append("  " + "  ".join("%+.6f" % v for v in row))
        lines.append(
            "rank %d (expected %d), worst entry deviation %.2e: %s"
            % (self.rank, self.expected_rank, self.max_entry_error, "pass" if self.passed else "FAIL")
        )
        return "\n".join(lines)

    def machine_lines(self):
        out = []
        for i, row in enumerate(self.matrix):
            for j, v in enumerate(row):
                out.append("entry %d %d %.12g" % (i, j, v))
        out.append("rank %d" % self.rank)
        out.append("pairing %s" % ("pass" if self.passed else "fail"))
        return out


def _angular_form(sig, coeffs):
    return FormExpr.angular(sig.n, sig.m, coeffs)


def _bump_profile_x(j):
    return Expr.bump(-2, 2, Expr.var("x%d" % j))


def _bump_profile_r(i):
    v = Expr.var("r%d" % i)
    return Expr.bump(Fraction(1, 4), 4, Expr.exp(v)) * Expr.exp(v)


def compact_generator(sig, model, subset):
    """Closed compactly supported representative for a compact class.

    The x and r factors are bump volumes supported inside the canonical
    corner stratum; the angular part wedges the adapted covectors dual to
    the unbounded directions (columns 1..k of the SNF matrix V) and then
    the chosen subset of surviving generator covectors.
    """
    form = FormExpr.scalar(sig.n, sig.m, Expr.number(1))
    for j in range(1, sig.n + 1):
        form = form.wedge(FormExpr(sig.n, sig.m, {(("x", j),): _bump_profile_x(j)}))
    for i in range(1, sig.m + 1):
        form = form.wedge(FormExpr(sig.n, sig.m, {(("r", i),): _bump_profile_r(i)}))
    for a in range(model.k):
        form = form.wedge(_angular_form(sig, model.adapted_cobasis[a]))
    for t in subset:
        form = form.wedge(_angular_form(sig, model.adapted_cobasis[t]))
    return form


def pairing_matrix(sig: ChartSignature, degree: int, spec=None) -> PairingResult:
    """Numeric integration pairing of H^degree against the compact dual.

    Rows are wedge monomials of surviving generators; columns are compact
    generators indexed by complementary-size subsets.  Entries are divided
    by (2 pi)^m and the bump masses, after which the theory predicts a
    signed permutation matrix.
    """
    spec = spec or QuadratureSpec()
    chart_compact_cohomology(sig)  # enforces the duality hypothesis
    model = chart_cohomology(sig)
    gen_indices = list(range(model.k, sig.m))
    if not 0 <= degree <= len(gen_indices):
        raise ShapeError("degree %d outside 0..%d" % (degree, len(gen_indices)))
    rows = list(combinations(range(len(gen_indices)), degree))
    cols = list(combinations(gen_indices, len(gen_indices) - degree))
    x_mass, xb = (
        integrate_1d(lambda t: Expr.bump(-2, 2, Expr.var("x1")).evaluate({"x1": t}), Axis("line"), spec)
        if sig.n
        else (1.0, 0.0)
    )
    r_mass, rb = (
        integrate_1d(lambda t: _bump_profile_r(1).evaluate({"r1": t}), Axis("uline"), spec)
        if sig.m
        else (1.0, 0.0)
    )
    norm = (2 * math.pi) ** sig.m * x_mass**sig.n * r_mass**sig.m
    matrix = np.zeros((len(rows), len(cols)))
    worst = 0.0
    for a, S in enumerate(rows):
        row_form = FormExpr.scalar(sig.n, sig.m, Expr.number(1))
        for s in S:
            row_form = row_form.wedge(_angular_form(sig, model.generators[s]))
        for b, T in enumerate(cols):
            col_form = compact_generator(sig, model, T)
            integrand = row_form.wedge(col_form)
            res = integrate(integrand, sig, spec)
            matrix[a, b] = res.value / norm
    rounded = la.zeros(len(rows), len(cols))
    for a in range(len(rows)):
        for b in range(len(cols)):
            v = matrix[a, b]
            r = int(np.sign(v)) if abs(v) > 0.5 else 0
            rounded[a, b] = r
            worst = max(worst, abs(v - r))
    rank = la.rational_rank(rounded)
    expected = len(rows)
    passed = rank == expected and worst <= max(spec.tolerance * 10, 1e-6)
    return PairingResult(
        degree=degree,
        matrix=matrix,
        rank=rank,
        expected_rank=expected,
        max_entry_error=worst,
        passed=passed,
    )
