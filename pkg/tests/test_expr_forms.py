import random
from fractions import Fraction

import numpy as np
import pytest

from explocoh.errors import FormParseError
from explocoh.expr import Expr
from explocoh.forms import FormExpr, parse_form


def test_expr_canonical_merge():
    x = Expr.var("x1")
    assert x + x == Expr.number(2) * x
    assert (x - x).is_zero
    assert (x * x) == x**2
    assert Expr.number(Fraction(1, 2)) * 2 == Expr.number(1)


def test_expr_mixed_partials_commute():
    x, y = Expr.var("x1"), Expr.var("x2")
    f = Expr.exp(x * y) * Expr.sin(x + y) + x**3 * y
    assert f.diff("x1").diff("x2") == f.diff("x2").diff("x1")


def test_expr_eval_matches_numpy():
    x = Expr.var("x1")
    f = Expr.exp(x - Expr.exp(x))
    ts = np.linspace(-3.0, 2.0, 17)
    vals = f.evaluate({"x1": ts})
    assert np.allclose(vals, np.exp(ts - np.exp(ts)))


def test_bump_eval_and_derivative():
    f = Expr.bump(0, 1, Expr.var("x1"))
    assert f.evaluate({"x1": -0.5}) == 0.0
    assert f.evaluate({"x1": 1.5}) == 0.0
    mid = f.evaluate({"x1": 0.5})
    assert 0 < mid < 1
    df = f.diff("x1")
    ts = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    numeric = (f.evaluate({"x1": ts + h}) - f.evaluate({"x1": ts - h})) / (2 * h)
    assert np.allclose(df.evaluate({"x1": ts}), numeric, atol=1e-4)


def test_wedge_antisymmetry():
    w = FormExpr.one_form(0, 1, ("th", 1))
    r = FormExpr.one_form(0, 1, ("r", 1))
    a = w.wedge(r)
    b = r.wedge(w)
    assert a == -b
    assert w.wedge(w).is_zero


def test_d_product_rule_example():
    # d(r dth) = dr ^ dth
    form = FormExpr(0, 1, {(("th", 1),): Expr.var("r1")})
    expected = FormExpr(0, 1, {(("r", 1), ("th", 1)): Expr.number(1)})
    assert form.d() == expected


def _random_expr(rng, vars_, depth=0):
    choice = rng.random()
    if depth > 2 or choice < 0.35:
        base = rng.choice(
            [Expr.number(rng.randint(-3, 3)), Expr.var(rng.choice(vars_))]
        )
        return base
    if choice < 0.55:
        return _random_expr(rng, vars_, depth + 1) + _random_expr(rng, vars_, depth + 1)
    if choice < 0.75:
        return _random_expr(rng, vars_, depth + 1) * _random_expr(rng, vars_, depth + 1)
    if choice < 0.85:
        return Expr.exp(_random_expr(rng, vars_, depth + 1))
    if choice < 0.95:
        return Expr.sin(_random_expr(rng, vars_, depth + 1))
    return Expr.bump(0, 2, _random_expr(rng, vars_, depth + 1))


def _random_form(rng, n, m, degree):
    from itertools import combinations

    from explocoh.forms import covector_order

    covs = covector_order(n, m)
    vars_ = ["x%d" % j for j in range(1, n + 1)]
    vars_ += ["r%d" % i for i in range(1, m + 1)]
    vars_ += ["th%d" % i for i in range(1, m + 1)]
    monos = list(combinations(covs, degree))
    comps = {}
    for mono in rng.sample(monos, k=min(2, len(monos))):
        comps[mono] = _random_expr(rng, vars_)
    return FormExpr(n, m, comps, degree=degree)


def test_dd_zero_500_random_forms():
    rng = random.Random(123)
    for _ in range(500):
        n, m = rng.choice([(1, 1), (0, 2), (2, 1)])
        deg = rng.randint(0, 2)
        w = _random_form(rng, n, m, deg)
        assert w.d().d().is_zero


def test_leibniz_random():
    rng = random.Random(321)
    for _ in range(100):
        n, m = (1, 1)
        a = _random_form(rng, n, m, rng.randint(0, 1))
        b = _random_form(rng, n, m, rng.randint(0, 1))
        lhs = a.wedge(b).d()
        sign = Fraction((-1) ** (a.degree or 0))
        rhs = a.d().wedge(b) + a.wedge(b.d()).scale(sign)
        assert lhs == rhs


def test_pullback_examples():
    # z -> z^2 doubles the angular form
    w = FormExpr.one_form(0, 1, ("th", 1))
    pb = w.pullback_monomial([[2]], 1)
    assert pb == FormExpr(0, 1, {(("th", 1),): Expr.number(2)})


def test_pullback_commutes_with_d_and_wedge():
    rng = random.Random(77)
    A = [[1, 1], [0, 1]]
    for _ in range(50):
        a = _random_form(rng, 0, 2, rng.randint(0, 1))
        b = _random_form(rng, 0, 2, rng.randint(0, 1))
        assert a.d().pullback_monomial(A, 2) == a.pullback_monomial(A, 2).d()
        assert a.wedge(b).pullback_monomial(A, 2) == a.pullback_monomial(A, 2).wedge(
            b.pullback_monomial(A, 2)
        )


def test_contract_radial():
    form = FormExpr(0, 1, {(("r", 1), ("th", 1)): Expr.number(1)})
    c = form.contract_radial([1])
    assert c == FormExpr(0, 1, {(("th", 1),): Expr.number(1)})
    c2 = FormExpr.one_form(0, 1, ("th", 1)).contract_radial([1])
    assert c2.is_zero


def test_parse_form_roundtrip_values():
    f = parse_form("exp(r1 - exp(r1)) * dr1 ^ dth1", 0, 1)
    assert f.degree == 2
    coef = f.components[(("r", 1), ("th", 1))]
    assert coef == Expr.exp(Expr.var("r1") - Expr.exp(Expr.var("r1")))
    g = parse_form("3/2 * sin(th1) * dx1 ^ dr1", 1, 1)
    assert g.degree == 2
    h = parse_form("bump(1/4,4)(exp(r1)) * dth1", 0, 1)
    assert h.degree == 1
    k = parse_form("dth1 ^ dr1", 0, 1)
    assert k == -parse_form("dr1 ^ dth1", 0, 1)


def test_parse_errors_carry_position():
    with pytest.raises(FormParseError) as e:
        parse_form("dr1 ^ dth2", 0, 1)
    assert "position" in str(e.value)
    with pytest.raises(FormParseError):
        parse_form("exp(dr1)", 0, 1)
    with pytest.raises(FormParseError):
        parse_form("1 + + 2", 0, 1)
