"""End-to-end acceptance suite.

One test per criterion; each prints an `ACCEPT <n> pass|fail` line so the
module doubles as a checklist under `pytest -s tests/test_acceptance.py`.
Tolerances and runtime budgets are pinned here and nowhere else.
"""
import math
import random
import time
from fractions import Fraction
from math import comb
from pathlib import Path

import pytest

from explocoh import intlinalg as la
from explocoh.calculus import (
    Projection,
    QuadratureSpec,
    adjunction_check,
    check_integral_vector_surjectivity,
    fiber_integrate,
    pairing_matrix,
    stokes_check,
)
from explocoh.charts import ChartSignature, chart_cohomology
from explocoh.cover import (
    family_h1_check,
    nerve_betti,
    pd_symmetry_check,
    refinement_manifest,
    total_betti,
)
from explocoh.errors import IntegralVectorSurjectivityError, NotTransverseError
from explocoh.forms import parse_form
from explocoh.lattice import Fan, Polytope, danilov_betti
from explocoh.manifest import parse_manifest
from explocoh.orientation import (
    OrientedMap,
    associativity_check,
    compare_oriented,
    fiber_product_orientation,
    normal_bundle_sign,
    orientation_against,
    swap_space,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SPEC = QuadratureSpec(tolerance=1e-6)


def _report(n, ok, label):
    print("ACCEPT %d %s: %s" % (n, "pass" if ok else "fail", label))
    assert ok, "criterion %d failed: %s" % (n, label)


def _random_nonempty_polytope(rng):
    while True:
        m = rng.randint(1, 4)
        ineqs = []
        for _ in range(rng.randint(1, m + 3)):
            a = tuple(rng.randint(-3, 3) for _ in range(m))
            if any(a):
                ineqs.append((a, Fraction(rng.randint(-2, 1))))
        p = Polytope(m, ineqs)
        if not p.is_empty:
            return p


def test_criterion_1_chart_formula():
    start = time.monotonic()
    rng = random.Random(20260808)
    fixtures = [
        Polytope.interval(0, 1),
        Polytope.halfline(),
        Polytope.quadrant(2),
        Polytope.quadrant(3),
        Polytope.product(Polytope.halfline(), Polytope.interval(0, 1)),
        Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 1)),
    ]
    polys = fixtures + [_random_nonempty_polytope(rng) for _ in range(200)]
    for p in polys:
        m = p.ambient_dim
        sig = ChartSignature(rng.randint(0, 2), m, p)
        model = chart_cohomology(sig)
        rows = list(p.recession_rays) + list(p.lineality)
        k_oracle = la.rational_rank(la.mat(rows)) if rows else 0
        assert model.k == k_oracle
        assert model.betti == tuple(comb(m - k_oracle, j) for j in range(m - k_oracle + 1))
        assert len(model.generators) == m - k_oracle
    elapsed = time.monotonic() - start
    _report(
        1,
        elapsed < 5.0,
        "chart Betti = C(m-k, j) on %d polytopes in %.2fs (< 5s)" % (len(polys), elapsed),
    )


def test_criterion_2_interval_torus():
    model = chart_cohomology(ChartSignature(0, 1, Polytope.interval(0, 1)))
    _report(2, model.betti == (1, 1), "T^1_[0,1] has the Betti numbers of C*: %r" % (model.betti,))


def test_criterion_3_toric_refinements():
    start = time.monotonic()
    fans = {
        "P1": (Fan([[(1,)], [(-1,)]], 1), (1, 0, 1)),
        "P2": (
            Fan([[(1, 0), (0, 1)], [(-1, -1), (0, 1)], [(-1, -1), (1, 0)]], 2),
            (1, 0, 1, 0, 1),
        ),
        "P1xP1": (
            Fan([[(1, 0), (0, 1)], [(0, 1), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]], 2),
            (1, 0, 2, 0, 1),
        ),
        "F1": (
            Fan([[(1, 0), (0, 1)], [(0, 1), (-1, 1)], [(-1, 1), (0, -1)], [(0, -1), (1, 0)]], 2),
            (1, 0, 2, 0, 1),
        ),
    }
    for name, (fan, expected) in fans.items():
        table = total_betti(refinement_manifest(fan, fan.ambient_dim))
        assert table.betti == expected, (name, table.betti)
        padded = []
        for b in danilov_betti(fan):
            padded.extend([b, 0])
        assert table.betti == tuple(padded[:-1]), name
    elapsed = time.monotonic() - start
    _report(3, elapsed < 10.0, "toric refinements match the classical Betti vector in %.2fs (< 10s)" % elapsed)


def test_criterion_4_explosion_quadrant_class():
    manifest = parse_manifest((FIXTURES / "tetrahedron_quadrant.manifest").read_text())
    table = total_betti(manifest)
    oracle = nerve_betti(manifest)
    ok = table.betti == (1, 0, 1) and oracle == (1, 0, 1)
    _report(4, ok, "tetrahedron-nerve quadrant cover gives H*(S^2) = %r (nerve oracle %r)" % (table.betti, oracle))


def test_criterion_5_poincare_duality():
    complete_fixtures = [
        "single_interval.manifest",
        "single_halfline.manifest",
        "quadrant2.manifest",
        "tetrahedron_quadrant.manifest",
        "p1_fan.manifest",
        "p2_fan.manifest",
        "p1xp1_fan.manifest",
        "hirzebruch1_fan.manifest",
    ]
    for name in complete_fixtures:
        report = pd_symmetry_check(parse_manifest((FIXTURES / name).read_text()))
        assert report.passed, (name, report.text())
    box = Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 1))
    mixed = Polytope.product(Polytope.halfline(), Polytope.interval(0, 1))
    charts = [
        ChartSignature(0, 1, Polytope.interval(0, 1)),
        ChartSignature(0, 1, Polytope.halfline()),
        ChartSignature(1, 1, Polytope.halfline()),
        ChartSignature(2, 1, Polytope.interval(0, 1)),
        ChartSignature(0, 2, box),
        ChartSignature(0, 2, mixed),
        ChartSignature(1, 2, mixed),
        ChartSignature(2, 2, box),
    ]
    checked = 0
    for sig in charts:
        model = chart_cohomology(sig)
        degrees = range(len(model.generators) + 1) if sig.N <= 5 else [1]
        for j in degrees:
            result = pairing_matrix(sig, j, SPEC)
            assert result.rank == comb(sig.m - model.k, j), result.text()
            assert result.max_entry_error <= 1e-6, result.text()
            assert result.passed, result.text()
            checked += 1
    _report(5, True, "duality symmetry on %d covers and %d nondegenerate pairings" % (len(complete_fixtures), checked))


def test_criterion_6_stokes():
    start = time.monotonic()
    half = ChartSignature(0, 1, Polytope.halfline())
    interval = ChartSignature(0, 1, Polytope.interval(0, 1))
    tube = ChartSignature(1, 1, Polytope.interval(0, 1))
    plane = ChartSignature(2, 0, Polytope.point())

    counter = stokes_check(parse_form("exp(-exp(r1)) * dth1", 0, 1), half, SPEC)
    assert not counter.admissible
    assert abs(counter.discrepancy - 2 * math.pi) <= 1e-6

    admissible = [
        (parse_form("bump(1/4,4)(exp(r1)) * dth1", 0, 1), half, False),
        (parse_form("exp(r1 - exp(r1)) * dth1", 0, 1), interval, False),
        (parse_form("bump(1/4,4)(exp(r1)) * sin(th1) * dr1", 0, 1), interval, False),
        (
            parse_form("exp(x1 - exp(x1)) * exp(r1 - exp(r1)) * dr1 ^ dth1", 1, 1),
            tube,
            True,
        ),
        (parse_form("exp(x1 - exp(x1)) * bump(-2,2)(x2) * dx2", 2, 0), plane, True),
    ]
    for form, sig, boundary in admissible:
        report = stokes_check(form, sig, SPEC, boundary=boundary)
        assert report.admissible, report.text()
        assert report.discrepancy <= 1e-6, report.text()
    elapsed = time.monotonic() - start
    _report(
        6,
        elapsed < 30.0,
        "2 pi counterexample flagged and %d admissible forms satisfy Stokes in %.2fs (< 30s)"
        % (len(admissible), elapsed),
    )


def test_criterion_7_fiber_adjunction():
    half = ChartSignature(0, 1, Polytope.halfline())
    w1 = parse_form("exp(r1 - exp(r1)) * dr1 ^ dth1", 0, 1)
    rep1 = adjunction_check(
        parse_form("1", 0, 1), w1, half, Projection(keep_x=(), keep_tori=(1,)), SPEC
    )
    assert rep1.passed and rep1.difference <= 1e-6, rep1.text()

    tube = ChartSignature(1, 1, Polytope.interval(0, 1))
    w2 = parse_form("exp(-(x1**2)) * exp(r1 - exp(r1)) * dr1 ^ dth1 ^ dx1", 1, 1)
    rep2 = adjunction_check(
        parse_form("exp(-(x1**2))", 1, 0), w2, tube, Projection(keep_x=(1,), keep_tori=()), SPEC
    )
    assert rep2.passed and rep2.difference <= 1e-6, rep2.text()

    box = ChartSignature(0, 2, Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 1)))
    w3 = parse_form("bump(1/4,4)(exp(r1)) * exp(r2 - exp(r2)) * dr2 ^ dth2 ^ dth1", 0, 2)
    rep3 = adjunction_check(
        parse_form("exp(r1 - exp(r1)) * dr1", 0, 1), w3, box, Projection(keep_x=(), keep_tori=(1,)), SPEC
    )
    assert rep3.passed and rep3.difference <= 1e-6, rep3.text()

    skew = Polytope(2, [((1, -2), 0), ((-1, 2), 0), ((1, 0), 0)])
    refused = False
    try:
        check_integral_vector_surjectivity(
            ChartSignature(0, 2, skew), Projection(keep_x=(), keep_tori=(1,))
        )
    except IntegralVectorSurjectivityError:
        refused = True
    _report(
        7,
        refused,
        "three adjunction identities within 1e-6 and the lattice hypothesis fixture refused",
    )


def _rand_map(rng, rows, cols):
    if rows == 0:
        return OrientedMap(la.zeros(0, cols))
    return OrientedMap(la.mat([[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)]))


def _rand_transverse(rng, max_dim=5):
    while True:
        a = rng.randint(1, max_dim)
        b = rng.randint(1, max_dim)
        c = rng.randint(0, min(max_dim, a + b))
        df = _rand_map(rng, c, a)
        dg = _rand_map(rng, c, b)
        try:
            fp = fiber_product_orientation(df, dg)
        except NotTransverseError:
            continue
        return df, dg, a, b, c, fp


def test_criterion_8_orientation_laws():
    start = time.monotonic()
    rng = random.Random(88)

    # law 1: product orientation when the target is a point
    for _ in range(500):
        a, b = rng.randint(1, 5), rng.randint(1, 5)
        fp = fiber_product_orientation(OrientedMap(la.zeros(0, a)), OrientedMap(la.zeros(0, b)))
        std = [tuple(1 if j == i else 0 for j in range(a + b)) for i in range(a + b)]
        assert orientation_against(fp, std) == 1

    # law 2: the transverse-submanifold convention, randomized over
    # orientation-preserving reparametrizations of the two axes
    for _ in range(500):
        s1 = rng.choice([1, 2, 3])
        s2 = rng.choice([1, 2, 3])
        fp = fiber_product_orientation(
            OrientedMap(la.mat([[s1], [0]])), OrientedMap(la.mat([[0], [s2]]))
        )
        assert fp.dim == 0 and fp.sign == -1

    # swap and normal-bundle laws share the sampled transverse pairs
    for _ in range(500):
        df, dg, a, b, c, f1 = _rand_transverse(rng)
        f2 = fiber_product_orientation(dg, df)
        assert compare_oriented(swap_space(f1, a, b), f2) == (-1) ** ((a - c) * (b - c))
        assert normal_bundle_sign(df, dg, fp=f1) == (-1) ** (b * c)

    # law 4: local constancy under small transverse deformations
    done = 0
    while done < 500:
        df, dg, a, b, c, f0 = _rand_transverse(rng, max_dim=4)
        delta_f = la.mat([[Fraction(rng.randint(-1, 1), 16) for _ in range(a)] for _ in range(c)]) if c else la.zeros(0, a)
        delta_g = la.mat([[Fraction(rng.randint(-1, 1), 16) for _ in range(b)] for _ in range(c)]) if c else la.zeros(0, b)
        try:
            f1 = fiber_product_orientation(
                OrientedMap(df.matrix + delta_f), OrientedMap(dg.matrix + delta_g)
            )
        except NotTransverseError:
            continue
        if f0.dim == 0:
            assert f0.sign == f1.sign
            done += 1
            continue
        k0 = f0.basis_matrix()
        k1 = f1.basis_matrix()
        d = la.det(k0.T @ k1)
        denom = la.det(k0.T @ k0) * la.det(k1.T @ k1)
        if denom == 0 or Fraction(d) ** 2 * 16 < denom * 15:
            continue  # deformation too large to compare; resample
        assert (1 if d > 0 else -1) * f0.sign * f1.sign == 1
        done += 1

    # law 6: associativity of triple fiber products
    done = 0
    while done < 500:
        a, b, c = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 4)
        m1, m2 = rng.randint(0, 2), rng.randint(0, 2)
        try:
            assert associativity_check(
                _rand_map(rng, m1, a), _rand_map(rng, m1, b), _rand_map(rng, m2, b), _rand_map(rng, m2, c)
            )
        except NotTransverseError:
            continue
        done += 1

    elapsed = time.monotonic() - start
    _report(8, elapsed < 5.0, "all six orientation laws, 500 instances each, in %.2fs (< 5s)" % elapsed)


def test_criterion_9_family_h1_counts():
    cases = [
        (
            ChartSignature(1, 0, Polytope.point()),
            ChartSignature(1, 1, Polytope.interval(0, 1)),
            [],
            (1, 0, 1),
        ),
        (
            ChartSignature(0, 1, Polytope.interval(0, 1)),
            ChartSignature(0, 2, Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 1))),
            [[1, 0]],
            (2, 1, 1),
        ),
        (
            ChartSignature(0, 1, Polytope.halfline()),
            ChartSignature(0, 2, Polytope.quadrant(2)),
            [[1, 0]],
            (0, 0, 0),
        ),
    ]
    for base, total, alpha, expected in cases:
        report = family_h1_check(base, total, alpha)
        assert report.passed, report.text()
        assert (report.total_h1, report.base_h1, report.fiber_h1) == expected
    _report(9, True, "H^1 additivity on the three family fixtures, exact")
