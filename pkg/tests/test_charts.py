import random
from fractions import Fraction

import pytest

from explocoh import intlinalg as la
from explocoh.charts import (
    ChartSignature,
    chart_cohomology,
    chart_compact_cohomology,
    restriction_map,
)
from explocoh.errors import DualityUnavailableError, GluingError, ShapeError
from explocoh.lattice import Polytope


def sig(n, m, p):
    return ChartSignature(n, m, p)


def test_interval_torus_is_cstar():
    model = chart_cohomology(sig(0, 1, Polytope.interval(0, 1)))
    assert model.betti == (1, 1)
    assert model.k == 0


def test_halfline_chart_contractible():
    model = chart_cohomology(sig(2, 1, Polytope.halfline()))
    assert model.betti == (1,)
    assert model.k == 1


def test_mixed_product_chart():
    p = Polytope.product(Polytope.halfline(), Polytope.interval(0, 1))
    model = chart_cohomology(sig(0, 2, p))
    assert model.k == 1
    assert model.betti == (1, 1)
    assert len(model.generators) == 1
    ray = (1, 0)
    assert sum(a * b for a, b in zip(model.generators[0], ray)) == 0


def test_compact_models():
    c = chart_compact_cohomology(sig(0, 1, Polytope.halfline()))
    assert c.dims == (0, 0, 1)
    c = chart_compact_cohomology(sig(0, 1, Polytope.interval(0, 1)))
    assert c.dims == (0, 1, 1)
    c = chart_compact_cohomology(sig(1, 1, Polytope.halfline()))
    assert c.dims == (0, 0, 0, 1)


def test_compact_rejections():
    with pytest.raises(DualityUnavailableError):
        chart_compact_cohomology(sig(0, 1, Polytope.line()))
    opened = Polytope(1, [((1,), 0)], open_faces=("x",))
    with pytest.raises(DualityUnavailableError):
        chart_compact_cohomology(sig(0, 1, opened))


def test_compact_grading_window():
    # c_j = 0 unless n+m+k <= j <= N
    cases = [
        sig(0, 1, Polytope.halfline()),
        sig(1, 1, Polytope.interval(0, 1)),
        sig(0, 2, Polytope.quadrant(2)),
    ]
    for s in cases:
        model = chart_cohomology(s)
        c = chart_compact_cohomology(s)
        lo = s.n + s.m + model.k
        for j, d in enumerate(c.dims):
            if d:
                assert lo <= j <= s.N
            assert d == (model.betti[s.N - j] if 0 <= s.N - j < len(model.betti) else 0)


def test_restriction_identity():
    model = chart_cohomology(sig(0, 2, Polytope.origin(2)))
    r = restriction_map(model, model, la.identity(2))
    assert r.h1_matrix().tolist() == la.identity(2).tolist()
    assert r.exterior(2)[0, 0] == 1


def test_restriction_halfline_to_point():
    src = chart_cohomology(sig(0, 1, Polytope.halfline()))
    tgt = chart_cohomology(sig(0, 1, Polytope.origin(1)))
    r = restriction_map(src, tgt, [[1]])
    assert r.h1_matrix().shape == (1, 0)


def test_restriction_unimodular():
    model = chart_cohomology(sig(0, 2, Polytope.origin(2)))
    r = restriction_map(model, model, [[1, 1], [0, 1]])
    assert abs(la.det(r.h1_matrix())) == 1


def test_restriction_shape_and_gluing_errors():
    a = chart_cohomology(sig(0, 2, Polytope.origin(2)))
    b = chart_cohomology(sig(0, 1, Polytope.origin(1)))
    with pytest.raises(ShapeError):
        restriction_map(a, b, [[1]])
    # point -> halfline with identity: the generator dtheta maps to dtheta,
    # which does not survive on the halfline chart
    src = chart_cohomology(sig(0, 1, Polytope.origin(1)))
    tgt = chart_cohomology(sig(0, 1, Polytope.halfline()))
    with pytest.raises(GluingError):
        restriction_map(src, tgt, [[1]])


def test_functoriality_random():
    rng = random.Random(11)
    model = chart_cohomology(sig(0, 3, Polytope.origin(3)))
    for _ in range(30):
        A = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        B = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        ra = restriction_map(model, model, A)
        rb = restriction_map(model, model, B)
        rc = ra.then(rb)
        lhs = rc.h1_matrix()
        rhs = rb.h1_matrix() @ ra.h1_matrix()
        assert (lhs == rhs).all()
        for q in range(4):
            assert (rc.exterior(q) == rb.exterior(q) @ ra.exterior(q)).all()


def test_betti_formula_random_polytopes():
    rng = random.Random(404)
    count = 0
    while count < 200:
        m = rng.randint(1, 4)
        ineqs = []
        for _ in range(rng.randint(1, m + 3)):
            a = tuple(rng.randint(-3, 3) for _ in range(m))
            if any(a):
                ineqs.append((a, Fraction(rng.randint(-2, 1))))
        p = Polytope(m, ineqs)
        if p.is_empty:
            continue
        count += 1
        model = chart_cohomology(sig(rng.randint(0, 2), m, p))
        rows = list(p.recession_rays) + list(p.lineality)
        k_oracle = la.rational_rank(la.mat(rows)) if rows else 0
        assert model.k == k_oracle
        from math import comb

        assert model.betti == tuple(comb(m - k_oracle, j) for j in range(m - k_oracle + 1))
        assert sum(model.betti) == 2 ** (m - model.k)


def test_unimodular_relabeling_keeps_dims():
    rng = random.Random(5)
    base = Polytope.product(Polytope.halfline(), Polytope.interval(0, 1))
    model = chart_cohomology(sig(0, 2, base))
    for _ in range(20):
        # random unimodular change of coordinates
        U = la.identity(2)
        for _ in range(4):
            i, j = rng.sample([0, 1], 2)
            U[i] = U[i] + rng.randint(-2, 2) * U[j]
        ineqs = [(tuple((la.vec(a) @ U).tolist()), b) for a, b in base.inequalities]
        model2 = chart_cohomology(sig(0, 2, Polytope(2, ineqs)))
        assert model2.betti == model.betti
        assert model2.k == model.k
