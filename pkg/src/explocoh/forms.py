"""Symbolic differential forms on a single chart R^n x T^m_P.

Coordinates are x_1..x_n on the real factor and, per torus index i, the
log-radius r_i and angle th_i of the smooth part on a corner stratum.  A
form is a dictionary from sorted covector tuples to coefficient
expressions; the covector order dx_1..dx_n, dr_1, dth_1, .., dr_m, dth_m
also fixes the orientation used by integration.

Coefficients live in the coordinates of one designated corner stratum;
forms supported near different corners are handled as separate FormExpr
values by the calculus layer.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import FormParseError, ShapeError, UnsupportedFormError
from .expr import Expr, format_expr


def covector_order(n, m):
    out = [("x", j) for j in range(1, n + 1)]
    for i in range(1, m + 1):
        out.append(("r", i))
        out.append(("th", i))
    return out


def var_name(cov):
    return "%s%d" % (cov[0], cov[1])


class FormExpr:
    """Degree-homogeneous symbolic form on a chart with dims (n, m)."""

    def __init__(self, n, m, components=None, degree=None):
        self.n = int(n)
        self.m = int(m)
        self._order = {c: i for i, c in enumerate(covector_order(self.n, self.m))}
        comps = {}
        degrees = set()
        for mono, coef in (components or {}).items():
            mono = tuple(mono)
            for cov in mono:
                if cov not in self._order:
                    raise ShapeError("covector %r does not live on this chart" % (cov,))
            if list(mono) != sorted(mono, key=self._order.get) or len(set(mono)) != len(mono):
                raise ShapeError("wedge monomial %r is not normalized" % (mono,))
            if not isinstance(coef, Expr):
                coef = Expr.number(coef)
            if coef.is_zero:
                continue
            comps[mono] = comps.get(mono, Expr.number(0)) + coef
            degrees.add(len(mono))
        self.components = {k: v for k, v in comps.items() if not v.is_zero}
        degrees = {len(k) for k in self.components}
        if len(degrees) > 1:
            raise ShapeError("form is not degree homogeneous: %r" % (sorted(degrees),))
        self.degree = degrees.pop() if degrees else degree

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n, m, degree=None):
        return cls(n, m, {}, degree=degree)

    @classmethod
    def scalar(cls, n, m, coef):
        return cls(n, m, {(): coef})

    @classmethod
    def one_form(cls, n, m, cov, coef=1):
        return cls(n, m, {(cov,): coef})

    @classmethod
    def angular(cls, n, m, coefficients):
        """The constant one-form sum_i c_i dth_i."""
        comps = {}
        for i, c in enumerate(coefficients, start=1):
            if c:
                comps[(("th", i),)] = Expr.number(c)
        return cls(n, m, comps, degree=1)

    # -- algebra ---------------------------------------------------------------

    @property
    def is_zero(self):
        return not self.components

    def _same_chart(self, other):
        if (self.n, self.m) != (other.n, other.m):
            raise ShapeError("forms live on different charts")

    def __add__(self, other):
        self._same_chart(other)
        comps = dict(self.components)
        for mono, coef in other.components.items():
            comps[mono] = comps.get(mono, Expr.number(0)) + coef
        return FormExpr(self.n, self.m, comps, degree=self.degree or other.degree)

    def __neg__(self):
        return FormExpr(
            self.n, self.m, {k: -v for k, v in self.components.items()}, degree=self.degree
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        if not isinstance(factor, Expr):
            factor = Expr.number(factor)
        return FormExpr(
            self.n,
            self.m,
            {k: factor * v for k, v in self.components.items()},
            degree=self.degree,
        )

    def wedge(self, other):
        self._same_chart(other)
        comps = {}
        for m1, c1 in self.components.items():
            for m2, c2 in other.components.items():
                merged, sign = _merge_monomials(m1, m2, self._order)
                if sign == 0:
                    continue
                add = c1 * c2 * Fraction(sign)
                comps[merged] = comps.get(merged, Expr.number(0)) + add
        deg = None
        if self.degree is not None and other.degree is not None:
            deg = self.degree + other.degree
            if deg > self.n + 2 * self.m:
                deg = None if comps else deg  # nonzero overflow is impossible
        return FormExpr(self.n, self.m, comps, degree=deg)

    def d(self):
        """Exterior differential, term-wise product rule on coefficients."""
        comps = {}
        for mono, coef in self.components.items():
            for cov in covector_order(self.n, self.m):
                dcoef = coef.diff(var_name(cov))
                if dcoef.is_zero:
                    continue
                merged, sign = _merge_monomials((cov,), mono, self._order)
                if sign == 0:
                    continue
                add = dcoef * Fraction(sign)
                comps[merged] = comps.get(merged, Expr.number(0)) + add
        deg = None if self.degree is None else self.degree + 1
        return FormExpr(self.n, self.m, comps, degree=deg)

    def contract(self, vector, kind):
        """Insert the vector sum_i v_i d/d(kind)_i into the first slot."""
        if kind not in ("r", "th"):
            raise ShapeError("contraction kind must be 'r' or 'th'")
        if len(vector) != self.m:
            raise ShapeError("vector has length %d, chart has m = %d" % (len(vector), self.m))
        comps = {}
        for mono, coef in self.components.items():
            for pos, cov in enumerate(mono):
                if cov[0] != kind:
                    continue
                v = vector[cov[1] - 1]
                if v == 0:
                    continue
                rest = mono[:pos] + mono[pos + 1 :]
                add = coef * Fraction((-1) ** pos) * Fraction(v)
                comps[rest] = comps.get(rest, Expr.number(0)) + add
        deg = None if self.degree is None else max(self.degree - 1, 0)
        return FormExpr(self.n, self.m, comps, degree=deg)

    def contract_radial(self, vector):
        return self.contract(vector, "r")

    def pullback_monomial(self, A, target_m):
        """Pullback along the monomial map with exponent matrix A.

        A has shape (m, target_m): coordinates transform by r_i -> sum_t
        A[i][t] r'_t (same for angles), covectors dr_i and dth_i expand
        accordingly, and x coordinates are untouched.
        """
        A = [tuple(int(x) for x in row) for row in A]
        if len(A) != self.m or any(len(r) != target_m for r in A):
            raise ShapeError("exponent matrix must be %d x %d" % (self.m, target_m))
        mapping = {}
        for i in range(1, self.m + 1):
            for kind in ("r", "th"):
                image = Expr.number(0)
                for t in range(1, target_m + 1):
                    c = A[i - 1][t - 1]
                    if c:
                        image = image + Expr.number(c) * Expr.var("%s%d" % (kind, t))
                mapping[var_name((kind, i))] = image
        out = FormExpr.zero(self.n, target_m, degree=self.degree)
        for mono, coef in self.components.items():
            piece = FormExpr.scalar(self.n, target_m, coef.substitute(mapping))
            for cov in mono:
                if cov[0] == "x":
                    img = FormExpr.one_form(self.n, target_m, cov)
                else:
                    comps = {}
                    for t in range(1, target_m + 1):
                        c = A[cov[1] - 1][t - 1]
                        if c:
                            comps[((cov[0], t),)] = Expr.number(c)
                    img = FormExpr(self.n, target_m, comps, degree=1)
                piece = piece.wedge(img)
            out = out + piece
        return out

    def rename(self, n_new, m_new, x_map, torus_map):
        """Re-index coordinates (for embedding a base chart in a total chart)."""
        mapping = {}
        for j_old, j_new in x_map.items():
            mapping[var_name(("x", j_old))] = Expr.var(var_name(("x", j_new)))
        for i_old, i_new in torus_map.items():
            mapping[var_name(("r", i_old))] = Expr.var(var_name(("r", i_new)))
            mapping[var_name(("th", i_old))] = Expr.var(var_name(("th", i_new)))
        out = FormExpr.zero(n_new, m_new, degree=self.degree)
        for mono, coef in self.components.items():
            piece = FormExpr.scalar(n_new, m_new, coef.substitute(mapping))
            for cov in mono:
                kind, idx = cov
                new_idx = x_map[idx] if kind == "x" else torus_map[idx]
                piece = piece.wedge(FormExpr.one_form(n_new, m_new, (kind, new_idx)))
            out = out + piece
        return out

    def substitute_coeff(self, mapping):
        return FormExpr(
            self.n,
            self.m,
            {k: v.substitute(mapping) for k, v in self.components.items()},
            degree=self.degree,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FormExpr)
            and (self.n, self.m) == (other.n, other.m)
            and self.components == other.components
        )

    def __repr__(self):
        return "FormExpr(%s)" % (format_form(self),)


def _merge_monomials(m1, m2, order):
    """Sorted merge of two wedge monomials with the permutation sign."""
    merged = list(m1) + list(m2)
    idx = [order[c] for c in merged]
    if len(set(idx)) != len(idx):
        return (), 0
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            merged[j - 1], merged[j] = merged[j], merged[j - 1]
            sign = -sign
            j -= 1
    return tuple(merged), sign


def format_form(form):
    if form.is_zero:
        return "0"
    parts = []
    for mono in sorted(form.components, key=lambda mm: [form._order[c] for c in mm]):
        coef = form.components[mono]
        covs = " ^ ".join("d%s" % var_name(c) for c in mono)
        cs = format_expr(coef)
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(covs)
        else:
            parts.append("(%s) * %s" % (cs, covs))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_FUNCTIONS = ("exp", "sin", "cos")


class _Parser:
    """Recursive descent parser for the form grammar.

    form   := term (('+'|'-') term)*
    term   := factor (('*'|'^') factor)*      (both symbols mean wedge)
    factor := '-' factor | atom ('**' INT)?
    atom   := RATIONAL | NAME | exp/sin/cos '(' form ')'
            | bump '(' RAT ',' RAT ')' '(' form ')' | 'd' COV | '(' form ')'
    """

    def __init__(self, text, n, m):
        self.text = text
        self.pos = 0
        self.n = n
        self.m = m

    def parse(self):
        form = self._form()
        self._ws()
        if self.pos != len(self.text):
            raise FormParseError("unexpected trailing input", self.pos)
        return form

    def _ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def _peek(self):
        self._ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch):
        if self._peek() != ch:
            raise FormParseError("expected %r" % ch, self.pos)
        self.pos += 1

    def _form(self):
        out = self._term()
        while True:
            c = self._peek()
            if c == "+":
                self.pos += 1
                out = out + self._term()
            elif c == "-" and not self.text[self.pos : self.pos + 2] == "->":
                self.pos += 1
                out = out - self._term()
            else:
                return out

    def _term(self):
        out = self._factor()
        while True:
            c = self._peek()
            if c == "*" and self.text[self.pos : self.pos + 2] != "**":
                self.pos += 1
                out = out.wedge(self._factor())
            elif c == "^":
                self.pos += 1
                out = out.wedge(self._factor())
            else:
                return out

    def _factor(self):
        if self._peek() == "-":
            self.pos += 1
            return -self._factor()
        atom = self._atom()
        self._ws()
        if self.text[self.pos : self.pos + 2] == "**":
            self.pos += 2
            start = self.pos
            e = self._integer()
            if atom.degree not in (0, None):
                raise FormParseError("powers only apply to scalars", start)
            coef = atom.components.get((), Expr.number(0))
            return FormExpr.scalar(self.n, self.m, coef**e)
        return atom

    def _integer(self):
        self._ws()
        start = self.pos
        if self._peek() == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise FormParseError("expected an integer", start)
        return int(self.text[start : self.pos])

    def _rational(self):
        num = self._integer()
        self._ws()
        if self._peek() == "/":
            save = self.pos
            self.pos += 1
            try:
                den = self._integer()
            except FormParseError:
                self.pos = save
                return Fraction(num)
            return Fraction(num, den)
        return Fraction(num)

    def _name(self):
        self._ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise FormParseError("expected a name", start)
        return self.text[start : self.pos], start

    def _atom(self):
        c = self._peek()
        if c == "(":
            self.pos += 1
            out = self._form()
            self._expect(")")
            return out
        if c.isdigit():
            return FormExpr.scalar(self.n, self.m, Expr.number(self._rational()))
        name, start = self._name()
        if name in _FUNCTIONS:
            self._expect("(")
            arg = self._form()
            self._expect(")")
            inner = self._scalar_of(arg, start)
            fn = {"exp": Expr.exp, "sin": Expr.sin, "cos": Expr.cos}[name]
            return FormExpr.scalar(self.n, self.m, fn(inner))
        if name == "bump":
            self._expect("(")
            lo = self._signed_rational()
            self._expect(",")
            hi = self._signed_rational()
            self._expect(")")
            self._expect("(")
            arg = self._form()
            self._expect(")")
            inner = self._scalar_of(arg, start)
            return FormExpr.scalar(self.n, self.m, Expr.bump(lo, hi, inner))
        cov = self._covector(name, start)
        if cov is not None:
            return FormExpr.one_form(self.n, self.m, cov)
        var = self._variable(name, start)
        return FormExpr.scalar(self.n, self.m, Expr.var(var))

    def _signed_rational(self):
        self._ws()
        if self._peek() == "-":
            self.pos += 1
            return -self._rational()
        return self._rational()

    def _scalar_of(self, form, pos):
        if form.degree not in (0, None):
            raise FormParseError("function argument must be a scalar", pos)
        return form.components.get((), Expr.number(0))

    def _covector(self, name, start):
        for prefix, kind in (("dx", "x"), ("dr", "r"), ("dth", "th")):
            if name.startswith(prefix) and name[len(prefix) :].isdigit():
                idx = int(name[len(prefix) :])
                bound = self.n if kind == "x" else self.m
                if not 1 <= idx <= bound:
                    raise FormParseError("covector %s out of range" % name, start)
                return (kind, idx)
        return None

    def _variable(self, name, start):
        for prefix, bound in (("x", self.n), ("r", self.m), ("th", self.m)):
            if name.startswith(prefix) and name[len(prefix) :].isdigit():
                idx = int(name[len(prefix) :])
                if not 1 <= idx <= bound:
                    raise FormParseError("variable %s out of range" % name, start)
                return name
        raise FormParseError("unknown name %r" % name, start)


def parse_form(text, n, m):
    """Parse a form expression; raises FormParseError with a position."""
    return _Parser(text, n, m).parse()
