"""Sparse homogeneous polynomials in x, y, z (or the subring in x, y).

Terms are stored as a map from exponent triples ``(ex, ey, ez)`` to nonzero
field scalars; bivariate polynomials keep ``ez = 0`` and are tagged with
``nvars = 2``.  Polynomials are immutable after construction: every operation
allocates a fresh result, so values can be shared freely across threads.

The canonical text form prints terms in descending graded-lexicographic order
(x > y > z) with explicit ``*`` between coefficient and variables and no
``^1``; ``parse`` inverts it exactly.
"""

from __future__ import annotations

from .field import Field, FieldMismatch, QQ

VAR_NAMES = ("x", "y", "z")
VAR_INDEX = {"x": 0, "y": 1, "z": 2}


class PolyError(Exception):
    pass


class PolySyntaxError(PolyError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownVariable(PolyError):
    pass


class ZeroPolynomial(PolyError):
    pass


class EulerViolation(PolyError):
    """The Euler identity failed; an arithmetic bug or char | deg."""


def grlex_key(m):
    # sort key so that reverse=True gives descending graded-lex, x > y > z
    return (m[0] + m[1] + m[2], m)


class Poly:
    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict):
        assert nvars in (2, 3)
        self.field = field
        self.nvars = nvars
        self.terms = {m: c for m, c in terms.items() if not field.is_zero(c)}

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, field: Field, nvars: int = 3) -> "Poly":
        return cls(field, nvars, {})

    @classmethod
    def constant(cls, field: Field, c, nvars: int = 3) -> "Poly":
        return cls(field, nvars, {(0, 0, 0): c})

    @classmethod
    def monomial(cls, field: Field, exps, c=None, nvars: int = 3) -> "Poly":
        ex, ey, ez = exps
        if ez and nvars == 2:
            raise UnknownVariable("z exponent in a bivariate polynomial")
        return cls(field, nvars, {(ex, ey, ez): field.one if c is None else c})

    @classmethod
    def variable(cls, field: Field, name: str, nvars: int = 3) -> "Poly":
        i = VAR_INDEX[name]
        if i >= nvars:
            raise UnknownVariable(f"variable {name!r} not available with nvars={nvars}")
        e = [0, 0, 0]
        e[i] = 1
        return cls(field, nvars, {tuple(e): field.one})

    # ----- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def coeff_of(self, exps):
        """Stored coefficient of the monomial, or the field zero."""
        ex, ey, ez = exps
        return self.terms.get((ex, ey, ez), self.field.zero)

    def as_trivariate(self) -> "Poly":
        if self.nvars == 3:
            return self
        return Poly(self.field, 3, dict(self.terms))

    def sorted_terms(self):
        return [(m, self.terms[m]) for m in sorted(self.terms, key=grlex_key, reverse=True)]

    def leading_term(self):
        if not self.terms:
            return None
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    # ----- arithmetic ----------------------------------------------------

    def _check_compat(self, other: "Poly"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if self.nvars != other.nvars:
            raise FieldMismatch(f"mixed nvars {self.nvars} vs {other.nvars}; lift with as_trivariate()")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_compat(other)
        f = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = f.add(out.get(m, f.zero), c)
            if f.is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return Poly(f, self.nvars, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        f = self.field
        return Poly(f, self.nvars, {m: f.neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.from_int(other))
        self._check_compat(other)
        f = self.field
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                s = f.add(out.get(m, f.zero), f.mul(c1, c2))
                if f.is_zero(s):
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly(f, self.nvars, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.from_int(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        out = Poly.constant(self.field, self.field.one, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c) -> "Poly":
        f = self.field
        if f.is_zero(c):
            return Poly.zero(f, self.nvars)
        return Poly(f, self.nvars, {m: f.mul(v, c) for m, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    # ----- calculus -------------------------------------------------------

    def partial(self, var: str) -> "Poly":
        """Formal partial derivative, integer multipliers mapped into the field."""
        i = VAR_INDEX[var]
        if i >= self.nvars:
            raise UnknownVariable(f"variable {var!r} not available with nvars={self.nvars}")
        f = self.field
        out: dict = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            mult = f.mul(c, f.from_int(e))
            if f.is_zero(mult):
                continue
            mm = list(m)
            mm[i] = e - 1
            out[tuple(mm)] = mult
        return Poly(f, self.nvars, out)

    def euler_check(self):
        """Verify x*P_x + y*P_y + z*P_z = deg(P)*P exactly; return deg(P) in the field.

        Raises EulerViolation on failure (an arithmetic bug, since the identity
        is forced for homogeneous input).
        """
        if not self.terms:
            raise ZeroPolynomial("euler_check of the zero polynomial")
        if not self.is_homogeneous():
            raise EulerViolation("input is not homogeneous")
        m = self.degree()
        f = self.field
        lhs = Poly.zero(f, self.nvars)
        for var in VAR_NAMES[: self.nvars]:
            lhs = lhs + Poly.variable(f, var, self.nvars) * self.partial(var)
        if lhs != self.scale(f.from_int(m)):
            raise EulerViolation(f"Euler identity failed at degree {m}")
        return f.from_int(m)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Poly({render(self)})"


def divides(d: "Poly", p: "Poly"):
    """Exact multivariate division test: (True, q) with p = d*q, else (False, None).

    Iterated leading-term elimination under the graded-lex order; for
    homogeneous d and p the first non-eliminable leading term certifies
    non-divisibility.
    """
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if d.field != p.field:
        raise FieldMismatch(f"{d.field} vs {p.field}")
    f = p.field
    nv = max(d.nvars, p.nvars)
    dm, dc = d.leading_term()
    dc_inv = f.inv(dc)
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        m = max(rem, key=grlex_key)
        c = rem[m]
        q = (m[0] - dm[0], m[1] - dm[1], m[2] - dm[2])
        if min(q) < 0:
            return False, None
        qc = f.mul(c, dc_inv)
        quot[q] = qc
        for tm, tc in d.terms.items():
            mm = (q[0] + tm[0], q[1] + tm[1], q[2] + tm[2])
            s = f.sub(rem.get(mm, f.zero), f.mul(qc, tc))
            if f.is_zero(s):
                rem.pop(mm, None)
            else:
                rem[mm] = s
    return True, Poly(f, nv, quot)


def split_pure_power(p: "Poly", axis: str):
    """Decompose a bivariate homogeneous p of degree m as p = x*q + c*y^m
    (axis 'x') or p = y*q + c*x^m (axis 'y'); returns (q, c)."""
    assert axis in ("x", "y")
    f = p.field
    if p.is_zero():
        return Poly.zero(f, 2), f.zero
    assert p.is_homogeneous() and p.nvars == 2
    m = p.degree()
    if axis == "x":
        c = p.coeff_of((0, m, 0))
        rest = p - Poly.monomial(f, (0, m, 0), c, nvars=2)
        ok, q = (True, Poly.zero(f, 2)) if rest.is_zero() else divides(Poly.variable(f, "x", 2), rest)
    else:
        c = p.coeff_of((m, 0, 0))
        rest = p - Poly.monomial(f, (m, 0, 0), c, nvars=2)
        ok, q = (True, Poly.zero(f, 2)) if rest.is_zero() else divides(Poly.variable(f, "y", 2), rest)
    assert ok
    return q, c


def _dehomogenize_y(p: "Poly"):
    """Coefficient list of p(t, 1) for bivariate homogeneous p, index = t-degree."""
    m = p.degree()
    f = p.field
    return [p.coeff_of((i, m - i, 0)) for i in range(m + 1)]


def _univ_trim(u, f):
    while u and f.is_zero(u[-1]):
        u.pop()
    return u


def _univ_mod(a, b, f):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv = f.inv(lb)
    while len(a) - 1 >= db and a:
        da, la = len(a) - 1, a[-1]
        q = f.mul(la, inv)
        for i in range(db + 1):
            a[da - db + i] = f.sub(a[da - db + i], f.mul(q, b[i]))
        _univ_trim(a, f)
    return a


def is_squarefree_bivariate(p: "Poly") -> bool:
    """Square-freeness of a bivariate homogeneous polynomial.

    Strips any x and y factors first (each must appear with exponent <= 1),
    then dehomogenizes at y = 1 and runs the Euclidean gcd of p with dp/dt.
    Valid in characteristic 0 or > deg(p).
    """
    if p.is_zero():
        raise ZeroPolynomial("square-freeness of the zero polynomial")
    assert p.nvars == 2 and p.is_homogeneous()
    f = p.field
    ex = min(m[0] for m in p.terms)
    ey = min(m[1] for m in p.terms)
    if ex > 1 or ey > 1:
        return False
    stripped = {(m[0] - ex, m[1] - ey, 0): c for m, c in p.terms.items()}
    q = Poly(f, 2, stripped)
    if q.degree() == 0:
        return True
    u = _univ_trim(_dehomogenize_y(q), f)
    du = _univ_trim([f.mul(c, f.from_int(i)) for i, c in enumerate(u)][1:], f)
    a, b = u, du
    while b:
        a, b = b, _univ_mod(a, b, f)
    return len(a) == 1


# ----- text form ----------------------------------------------------------


def render(p: "Poly") -> str:
    if not p.terms:
        return "0"
    f = p.field
    one = f.one
    parts = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        negative = f.char == 0 and c < 0
        mag = f.neg(c) if negative else c
        factors = []
        for v, e in zip(VAR_NAMES, m):
            if e == 1:
                factors.append(v)
            elif e > 1:
                factors.append(f"{v}^{e}")
        if not factors:
            body = f.render(mag)
        elif mag == one:
            body = "*".join(factors)
        else:
            body = "*".join([f.render(mag)] + factors)
        if i == 0:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    return "".join(parts)


class _Parser:
    """Recursive-descent parser for the canonical polynomial grammar:

        expr   := ['+'|'-'] term (('+'|'-') term)*
        term   := coeff ('*' factor)* | factor ('*' factor)*
        factor := var ('^' uint)?
        coeff  := int | int '/' uint
    """

    def __init__(self, text: str, field: Field, nvars: int):
        self.text = text
        self.field = field
        self.nvars = nvars
        self.pos = 0

    def error(self, msg: str):
        raise PolySyntaxError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def uint(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.text[start : self.pos])

    def coeff(self):
        n = self.uint()
        if self.peek() == "/":
            self.take("/")
            d = self.uint()
            if d == 0:
                self.error("zero denominator")
            return self.field.div(self.field.from_int(n), self.field.from_int(d))
        return self.field.from_int(n)

    def factor(self):
        ch = self.peek()
        if ch in VAR_INDEX:
            if VAR_INDEX[ch] >= self.nvars:
                raise UnknownVariable(f"variable {ch!r} not allowed here (nvars={self.nvars})")
            self.pos += 1
            e = 1
            if self.peek() == "^":
                self.take("^")
                e = self.uint()
            m = [0, 0, 0]
            m[VAR_INDEX[ch]] = e
            return tuple(m)
        if ch.isalpha():
            raise UnknownVariable(f"unknown variable {ch!r} at position {self.pos}")
        self.error("expected a variable")

    def term(self):
        f = self.field
        ch = self.peek()
        if ch.isdigit():
            c = self.coeff()
            m = (0, 0, 0)
        elif ch in VAR_INDEX or ch.isalpha():
            c = f.one
            e = self.factor()
            m = e
        else:
            self.error("expected a term")
        while self.peek() == "*":
            self.take("*")
            e = self.factor()
            m = (m[0] + e[0], m[1] + e[1], m[2] + e[2])
        return m, c

    def expr(self):
        f = self.field
        terms: dict = {}
        sign = 1
        ch = self.peek()
        if ch in "+-":
            sign = -1 if ch == "-" else 1
            self.pos += 1
        while True:
            m, c = self.term()
            if sign < 0:
                c = f.neg(c)
            s = f.add(terms.get(m, f.zero), c)
            if f.is_zero(s):
                terms.pop(m, None)
            else:
                terms[m] = s
            ch = self.peek()
            if ch == "":
                break
            if ch not in "+-":
                self.error(f"unexpected {ch!r}")
            sign = -1 if ch == "-" else 1
            self.pos += 1
        return terms


def parse(text: str, field: Field = QQ, nvars: int = 3) -> Poly:
    """Parse the canonical text form into a polynomial over the given field."""
    parser = _Parser(text, field, nvars)
    if parser.peek() == "":
        parser.error("empty input")
    terms = parser.expr()
    return Poly(field, nvars, terms)


def monomials(degree: int, nvars: int = 3):
    """All exponent triples of the given total degree, descending graded-lex."""
    out = []
    if nvars == 2:
        out = [(i, degree - i, 0) for i in range(degree, -1, -1)]
    else:
        for i in range(degree, -1, -1):
            for j in range(degree - i, -1, -1):
                out.append((i, j, degree - i - j))
    return out
