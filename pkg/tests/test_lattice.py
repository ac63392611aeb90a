import random
from fractions import Fraction

import pytest

from explocoh import intlinalg as la
from explocoh.errors import EmptyPolytopeError, UnsupportedFanError
from explocoh.lattice import Fan, Polytope, danilov_betti


def test_interval_face_lattice():
    p = Polytope.interval(0, 1)
    faces = p.face_lattice()
    assert [f.dim for f in faces] == [0, 0, 1]
    assert len(p.corners()) == 2
    assert p.vertices == [(Fraction(0),), (Fraction(1),)]


def test_halfline_faces_and_span():
    p = Polytope.halfline()
    faces = p.face_lattice()
    assert [f.dim for f in faces] == [0, 1]
    assert len(p.corners()) == 1
    k, basis = p.unbounded_span()
    assert k == 1 and basis == [(1,)]


def test_quadrant2_face_counts():
    p = Polytope.quadrant(2)
    faces = p.face_lattice()
    dims = sorted(f.dim for f in faces)
    assert dims == [0, 1, 1, 2]
    assert len(p.corners()) == 1


def test_bounded_interval_span_zero():
    k, basis = Polytope.interval(0, 1).unbounded_span()
    assert k == 0 and basis == []


def test_skew_recession_span():
    # b >= 0 and a + b >= 0: rays (1,0) and (-1,1)
    p = Polytope(2, [((0, 1), 0), ((1, 1), 0)])
    assert sorted(p.recession_rays) == [(-1, 1), (1, 0)]
    k, _ = p.unbounded_span()
    assert k == 2


def test_lines_and_completeness():
    assert Polytope.halfline().contains_lines() is False
    assert Polytope.line().contains_lines() is True
    assert Polytope.line().is_complete() is True
    opened = Polytope(1, [((1,), 0)], open_faces=("corner-0",))
    assert opened.is_complete() is False


def test_empty_polytope():
    p = Polytope(1, [((1,), 1), ((-1,), 0)])
    assert p.is_empty
    with pytest.raises(EmptyPolytopeError):
        p.face_lattice()


def test_face_lattice_closed_under_intersection_and_euler():
    # boundary complex of a bounded polygon is a circle: V - E = 0
    box = Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 2))
    faces = box.face_lattice()
    proper = [f for f in faces if f.dim < box.dim]
    n_v = sum(1 for f in proper if f.dim == 0)
    n_e = sum(1 for f in proper if f.dim == 1)
    assert n_v - n_e == 0
    keys = {f.key for f in faces}
    for a in faces:
        for b in faces:
            meet = a.key & b.key
            if meet:
                assert meet in keys


def test_from_generators_roundtrip():
    p = Polytope.from_generators([(0, 0), (1, 0), (0, 1)])
    assert sorted(p.vertices) == [
        (Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(0)),
    ]
    q = Polytope.from_generators([(0,)], rays=[(1,)], ambient_dim=1)
    assert q.same_set(Polytope.halfline())


def test_image_and_slice():
    box = Polytope.product(Polytope.interval(0, 1), Polytope.interval(0, 1))
    img = box.image([(1, 0)])
    assert img.same_set(Polytope.interval(0, 1))
    fib = box.slice([(1, 0)], (Fraction(1, 2),))
    assert fib.dim == 1
    k, _ = fib.unbounded_span()
    assert k == 0


def _p2_fan():
    return Fan([[(1, 0), (0, 1)], [(-1, -1), (0, 1)], [(-1, -1), (1, 0)]], 2)


def _p1xp1_fan():
    return Fan(
        [
            [(1, 0), (0, 1)],
            [(0, 1), (-1, 0)],
            [(-1, 0), (0, -1)],
            [(0, -1), (1, 0)],
        ],
        2,
    )


def _hirzebruch1_fan():
    return Fan(
        [
            [(1, 0), (0, 1)],
            [(0, 1), (-1, 1)],
            [(-1, 1), (0, -1)],
            [(0, -1), (1, 0)],
        ],
        2,
    )


def test_danilov_examples():
    p1 = Fan([[(1,)], [(-1,)]], 1)
    assert danilov_betti(p1) == (1, 1)
    assert danilov_betti(_p2_fan()) == (1, 1, 1)
    assert danilov_betti(_p1xp1_fan()) == (1, 2, 1)
    assert danilov_betti(_hirzebruch1_fan()) == (1, 2, 1)


def test_danilov_palindromic_for_shipped_fans():
    for fan in [Fan([[(1,)], [(-1,)]], 1), _p2_fan(), _p1xp1_fan(), _hirzebruch1_fan()]:
        b = danilov_betti(fan)
        assert b == tuple(reversed(b))


def test_danilov_rejects_bad_fans():
    incomplete = Fan([[(1, 0), (0, 1)]], 2)
    with pytest.raises(UnsupportedFanError):
        danilov_betti(incomplete)
    with pytest.raises(UnsupportedFanError):
        Fan([[(1,), (-1,)]], 1)  # a line is not a pointed cone
    nonsmooth = Fan(
        [[(1, 0), (1, 2)], [(1, 2), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]], 2
    )
    with pytest.raises(UnsupportedFanError):
        danilov_betti(nonsmooth)


def test_unbounded_span_bound():
    rng = random.Random(7)
    for _ in range(50):
        m = rng.randint(1, 3)
        ineqs = []
        for _ in range(rng.randint(m, m + 3)):
            a = tuple(rng.randint(-2, 2) for _ in range(m))
            if any(a):
                ineqs.append((a, rng.randint(-2, 1)))
        p = Polytope(m, ineqs)
        if p.is_empty:
            continue
        k, basis = p.unbounded_span()
        assert 0 <= k <= m
        assert len(basis) == k
