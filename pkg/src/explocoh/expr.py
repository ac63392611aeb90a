"""Closed-form scalar expressions on a chart, in canonical form.

The grammar is deliberately small: rationals, coordinate symbols, sums,
products, integer powers, exp, sin, cos, and a smooth bump primitive
bump(a,b) supported on [a, b].  Every expression is held as a canonical
sum of products (Fraction coefficient times a sorted tuple of powered
factors), so structural equality decides symbolic identities: mixed
partial derivatives collide term-by-term, which is what makes d(d(w)) = 0
an exact statement downstream.

Differentiating a bump raises its internal derivative order; evaluation
recovers the k-th derivative numerically from the exact partial-fraction
form of the exponent, so the grammar stays closed under d.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from .errors import ShapeError

# Base factors are tagged tuples:
#   ("var", name)
#   ("exp", Expr) / ("sin", Expr) / ("cos", Expr)
#   ("bump", lo, hi, order, Expr)


def _base_key(base):
    tag = base[0]
    if tag == "var":
        return (0, base[1])
    if tag == "exp":
        return (1, base[1]._key)
    if tag == "sin":
        return (2, base[1]._key)
    if tag == "cos":
        return (3, base[1]._key)
    if tag == "bump":
        _, lo, hi, order, inner = base
        return (4, (lo.numerator, lo.denominator), (hi.numerator, hi.denominator), order, inner._key)
    raise ShapeError("unknown factor tag %r" % (tag,))


class Expr:
    """Immutable canonical sum-of-products expression."""

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms):
        merged = {}
        for coef, factors in terms:
            if coef == 0:
                continue
            merged[factors] = merged.get(factors, Fraction(0)) + coef
        clean = tuple(
            sorted(
                ((c, f) for f, c in merged.items() if c != 0),
                key=lambda t: tuple(( _base_key(b), e) for b, e in t[1]),
            )
        )
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_key", tuple(
            (tuple((_base_key(b), e) for b, e in f), (c.numerator, c.denominator))
            for c, f in clean
        ))
        object.__setattr__(self, "_hash", hash(self._key))

    # -- constructors -----------------------------------------------------

    @classmethod
    def number(cls, x):
        x = Fraction(x)
        return cls([(x, ())]) if x else cls([])

    @classmethod
    def var(cls, name):
        return cls([(Fraction(1), ((("var", name), 1),))])

    @classmethod
    def exp(cls, inner):
        inner = _as_expr(inner)
        return cls([(Fraction(1), ((("exp", inner), 1),))])

    @classmethod
    def sin(cls, inner):
        return cls([(Fraction(1), ((("sin", _as_expr(inner)), 1),))])

    @classmethod
    def cos(cls, inner):
        return cls([(Fraction(1), ((("cos", _as_expr(inner)), 1),))])

    @classmethod
    def bump(cls, lo, hi, inner, order=0):
        lo, hi = Fraction(lo), Fraction(hi)
        if not lo < hi:
            raise ShapeError("bump needs lo < hi")
        return cls([(Fraction(1), ((("bump", lo, hi, order, _as_expr(inner)), 1),))])

    # -- algebra ------------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def constant_value(self):
        """The Fraction value when the expression has no symbols, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0][1]:
            return self.terms[0][0]
        return None

    def __add__(self, other):
        other = _as_expr(other)
        return Expr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return Expr([(-c, f) for c, f in self.terms])

    def __sub__(self, other):
        return self + (-_as_expr(other))

    def __rsub__(self, other):
        return _as_expr(other) + (-self)

    def __mul__(self, other):
        other = _as_expr(other)
        out = []
        for c1, f1 in self.terms:
            for c2, f2 in other.terms:
                out.append((c1 * c2, _merge_factors(f1, f2)))
        return Expr(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        e = int(e)
        if e == 0:
            return Expr.number(1)
        if e < 0:
            if len(self.terms) != 1:
                raise ShapeError("negative powers only apply to monomial factors")
            c, f = self.terms[0]
            if c != 1 and abs(e) > 0:
                coef = Fraction(1) / c ** (-e)
            else:
                coef = c**e if c == 1 else Fraction(1) / c ** (-e)
            return Expr([(coef, tuple((b, k * e) for b, k in f))])
        out = Expr.number(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Expr) and self._key == other._key

    def __hash__(self):
        return self._hash

    # -- calculus -------------------------------------------------------------

    def diff(self, name):
        out = []
        for coef, factors in self.terms:
            for idx, (base, e) in enumerate(factors):
                dbase = _diff_base(base, name)
                if dbase.is_zero:
                    continue
                rest = factors[:idx] + factors[idx + 1 :]
                lowered = ((base, e - 1),) if e != 1 else ()
                piece = Expr([(coef * e, _merge_factors(rest, lowered))]) * dbase
                out.extend(piece.terms)
        return Expr(out)

    def variables(self):
        out = set()
        for _, factors in self.terms:
            for base, _ in factors:
                out |= _base_vars(base)
        return out

    def substitute(self, mapping):
        """Replace variables by expressions (mapping: name -> Expr)."""
        out = Expr([])
        for coef, factors in self.terms:
            piece = Expr.number(coef)
            for base, e in factors:
                piece = piece * (_subst_base(base, mapping) ** e)
            out = out + piece
        return out

    # -- evaluation -------------------------------------------------------------

    def evaluate(self, env):
        """Numeric evaluation; env maps variable names to floats or arrays."""
        shape = None
        for v in env.values():
            a = np.asarray(v, dtype=float)
            if a.ndim:
                shape = a.shape
                break
        total = np.zeros(shape) if shape else 0.0
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            for coef, factors in self.terms:
                acc = float(coef) * (np.ones(shape) if shape else 1.0)
                for base, e in factors:
                    val = _eval_base(base, env)
                    acc = acc * (val**e if e != 1 else val)
                total = total + acc
        return np.nan_to_num(total, nan=0.0) if shape else (0.0 if np.isnan(total) else total)

    def __repr__(self):
        return "Expr(%s)" % (format_expr(self),)


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    return Expr.number(x)


def _merge_factors(f1, f2):
    d = {}
    for b, e in f1:
        d[b] = d.get(b, 0) + e
    for b, e in f2:
        d[b] = d.get(b, 0) + e
    return tuple(sorted(((b, e) for b, e in d.items() if e != 0), key=lambda t: _base_key(t[0])))


def _diff_base(base, name):
    tag = base[0]
    if tag == "var":
        return Expr.number(1) if base[1] == name else Expr.number(0)
    if tag == "exp":
        return Expr.exp(base[1]) * base[1].diff(name)
    if tag == "sin":
        return Expr.cos(base[1]) * base[1].diff(name)
    if tag == "cos":
        return -Expr.sin(base[1]) * base[1].diff(name)
    if tag == "bump":
        _, lo, hi, order, inner = base
        return Expr.bump(lo, hi, inner, order + 1) * inner.diff(name)
    raise ShapeError("unknown factor tag %r" % (tag,))


def _base_vars(base):
    if base[0] == "var":
        return {base[1]}
    if base[0] == "bump":
        return base[4].variables()
    return base[1].variables()


def _subst_base(base, mapping):
    tag = base[0]
    if tag == "var":
        return mapping.get(base[1], Expr.var(base[1]))
    if tag == "exp":
        return Expr.exp(base[1].substitute(mapping))
    if tag == "sin":
        return Expr.sin(base[1].substitute(mapping))
    if tag == "cos":
        return Expr.cos(base[1].substitute(mapping))
    if tag == "bump":
        _, lo, hi, order, inner = base
        return Expr.bump(lo, hi, inner.substitute(mapping), order)
    raise ShapeError("unknown factor tag %r" % (tag,))


def _eval_base(base, env):
    tag = base[0]
    if tag == "var":
        if base[1] not in env:
            raise ShapeError("no value for variable %s" % base[1])
        return np.asarray(env[base[1]], dtype=float)
    if tag == "exp":
        return np.exp(base[1].evaluate(env))
    if tag == "sin":
        return np.sin(base[1].evaluate(env))
    if tag == "cos":
        return np.cos(base[1].evaluate(env))
    if tag == "bump":
        _, lo, hi, order, inner = base
        return _bump_eval(float(lo), float(hi), order, inner.evaluate(env))
    raise ShapeError("unknown factor tag %r" % (tag,))


def _bump_eval(lo, hi, order, t):
    """Value of the order-th derivative of exp(-1/((t-lo)(hi-t))).

    The exponent phi has the exact partial fraction form
    -1/(hi-lo) * (1/(t-lo) + 1/(hi-t)), whose j-th derivatives are closed
    forms; derivatives of exp(phi) follow from the Leibniz recurrence
    F^(n) = sum C(n-1, j) phi^(n-j) F^(j).
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    inside = (t > lo) & (t < hi)
    if inside.any():
        ts = t[inside]
        width = hi - lo
        a = ts - lo
        b = hi - ts
        phi_derivs = []
        fact = 1.0
        for j in range(1, order + 1):
            fact *= j
            phi_derivs.append(-(1.0 / width) * (((-1.0) ** j) * fact / a ** (j + 1) + fact / b ** (j + 1)))
        with np.errstate(over="ignore", under="ignore"):
            f = [np.exp(-(1.0 / width) * (1.0 / a + 1.0 / b))]
            for n in range(1, order + 1):
                acc = np.zeros_like(ts)
                for j in range(n):
                    acc = acc + comb(n - 1, j) * phi_derivs[n - 1 - j] * f[j]
                f.append(acc)
        out[inside] = np.nan_to_num(f[order], nan=0.0)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def format_expr(expr):
    if expr.is_zero:
        return "0"
    parts = []
    for coef, factors in expr.terms:
        bits = []
        if coef != 1 or not factors:
            bits.append(str(coef))
        for base, e in factors:
            s = _format_base(base)
            bits.append(s if e == 1 else "%s**%d" % (s, e))
        parts.append(" * ".join(bits))
    return " + ".join(parts).replace("+ -", "- ")


def _format_base(base):
    tag = base[0]
    if tag == "var":
        return base[1]
    if tag == "exp":
        return "exp(%s)" % format_expr(base[1])
    if tag == "sin":
        return "sin(%s)" % format_expr(base[1])
    if tag == "cos":
        return "cos(%s)" % format_expr(base[1])
    if tag == "bump":
        _, lo, hi, order, inner = base
        name = "bump(%s,%s)" % (lo, hi) if order == 0 else "bump^(%d)(%s,%s)" % (order, lo, hi)
        return "%s(%s)" % (name, format_expr(inner))
    raise ShapeError("unknown factor tag %r" % (tag,))
