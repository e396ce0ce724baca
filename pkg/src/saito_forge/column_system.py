"""Graded bivariate linear system behind the last Saito column.

The z-free stratum of the degree-v syzygy that becomes the third matrix
column is a triple (h1, h3, h5) of bivariate forms of degree v solving a
2x3 system with polynomial entries built from F1 and F2.  The solver works
on coefficient vectors indexed by monomials of fixed degree, so everything
reduces to one exact elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

from .family import FamilyParams
from .linalg import rank, solve_affine
from .poly import Poly, monomials


class NoSolution(Exception):
    """The graded system is inconsistent; with validated parameters this
    signals an implementation bug."""


@dataclass(frozen=True)
class ColumnSystem:
    """rows[i][j] * (h1, h3, h5)_j summed over j equals rhs[i], all bivariate."""

    params: FamilyParams
    rows: tuple
    rhs: tuple
    mu: object

    @property
    def unknown_degree(self) -> int:
        return self.params.v

    @property
    def target_degrees(self) -> tuple[int, int]:
        p = self.params
        return (p.v + p.alpha, 2 * p.v - p.alpha)


@dataclass(frozen=True)
class ColumnSolution:
    h1: Poly
    h3: Poly
    h5: Poly
    kernel: tuple  # basis of solution-line directions, as (k1, k3, k5) triples

    @property
    def dimension(self) -> int:
        return len(self.kernel)


def build_column_system(params: FamilyParams, mu) -> ColumnSystem:
    """Assemble the 2x3 coefficient matrix and right-hand side exactly.

    The system's own premise is deg F2 = v - alpha (automatic for odd-degree
    family members, where d - v - alpha - 1 = v - alpha); anything else breaks
    the row grading, so it is rejected up front.
    """
    d, a, b = params.d, params.alpha, params.beta
    v = params.v
    fld = params.field
    f1, f2 = params.f1, params.f2
    if f2.degree() != v - a:
        raise ValueError(f"graded system needs deg F2 = v - alpha = {v - a}, got {f2.degree()}")
    g1 = f1.partial("y")
    g2 = -(Poly.variable(fld, "x", 2) * f1.partial("x") + (d - a) * f1)
    x = Poly.variable(fld, "x", 2)
    y = Poly.variable(fld, "y", 2)
    bracket = y * f2.partial("y") + (d - v + a) * f2
    rows = (
        (-g2, x * g1, Poly.zero(fld, 2)),
        (y * f2.partial("x"), bracket, Poly.monomial(fld, (b, v - a - b, 0), nvars=2)),
    )
    rhs = (
        Poly.monomial(fld, (0, v + a, 0), mu, nvars=2),
        Poly.monomial(fld, (2 * v - a, 0, 0), fld.neg(mu), nvars=2),
    )
    return ColumnSystem(params, rows, rhs, mu)


def _system_matrix(sys: ColumnSystem):
    v = sys.params.v
    fld = sys.params.field
    unknowns = monomials(v, 2)
    mat = []
    rhs_vec = []
    for row, rhs_poly, deg in zip(sys.rows, sys.rhs, sys.target_degrees):
        for target in monomials(deg, 2):
            line = []
            for entry in row:
                for u in unknowns:
                    m = (target[0] - u[0], target[1] - u[1], 0)
                    line.append(entry.coeff_of(m) if min(m[:2]) >= 0 else fld.zero)
            mat.append(line)
            rhs_vec.append(rhs_poly.coeff_of(target))
    return mat, rhs_vec, unknowns


def _vec_to_triple(vec, unknowns, fld):
    n = len(unknowns)
    polys = []
    for blk in range(3):
        terms = {}
        for u, c in zip(unknowns, vec[blk * n : (blk + 1) * n]):
            if not fld.is_zero(c):
                terms[u] = c
        polys.append(Poly(fld, 2, terms))
    return tuple(polys)


def solve_column_system(sys: ColumnSystem) -> ColumnSolution:
    """One exact solution plus the kernel of the solution space.

    The canonical representative pins every elimination-free coefficient to
    zero under the fixed monomial order, so repeated runs agree.
    """
    fld = sys.params.field
    mat, rhs_vec, unknowns = _system_matrix(sys)
    particular, kernel = solve_affine(mat, rhs_vec, fld)
    if particular is None:
        raise NoSolution("graded column system is inconsistent")
    h1, h3, h5 = _vec_to_triple(particular, unknowns, fld)
    kern = tuple(_vec_to_triple(k, unknowns, fld) for k in kernel)
    return ColumnSolution(h1, h3, h5, kern)


def column_syzygy_generator(params: FamilyParams):
    """The closed-form generator of the system's solution-line direction."""
    d, a, b = params.d, params.alpha, params.beta
    v = params.v
    fld = params.field
    f1, f2 = params.f1, params.f2
    g1 = f1.partial("y")
    g2 = -(Poly.variable(fld, "x", 2) * f1.partial("x") + (d - a) * f1)
    x = Poly.variable(fld, "x", 2)
    y = Poly.variable(fld, "y", 2)
    bracket = (d - v + a) * f2 + y * f2.partial("y")
    return (
        Poly.monomial(fld, (b + 1, v - a - b, 0), nvars=2) * g1,
        Poly.monomial(fld, (b, v - a - b, 0), nvars=2) * g2,
        -(x * y * f2.partial("x") * g1) - g2 * bracket,
    )


def column_cokernel_hilbert(params: FamilyParams, i: int) -> int:
    """Dimension of the degree-i piece of the cokernel of the system's
    generator module, by exact rank of the evaluation matrix."""
    if i < 0:
        return 0
    d, a = params.d, params.alpha
    v = params.v
    fld = params.field
    sys = build_column_system(params, fld.one)
    ambient = max(0, i - (v - a) + 1) + max(0, i - a + 1)
    if i < v:
        return ambient
    shifts = monomials(i - v, 2)
    rows_first = monomials(i - (v - a), 2) if i >= v - a else []
    rows_second = monomials(i - a, 2) if i >= a else []
    cols = []
    for j in range(3):
        top = sys.rows[0][j]
        bot = sys.rows[1][j]
        for m in shifts:
            col = [top.coeff_of((t[0] - m[0], t[1] - m[1], 0))
                   if t[0] >= m[0] and t[1] >= m[1] else fld.zero
                   for t in rows_first]
            col += [bot.coeff_of((t[0] - m[0], t[1] - m[1], 0))
                    if t[0] >= m[0] and t[1] >= m[1] else fld.zero
                    for t in rows_second]
            cols.append(col)
    mat = [[col[r] for col in cols] for r in range(len(rows_first) + len(rows_second))]
    return ambient - rank(mat, fld)


def cokernel_series_coefficient(params: FamilyParams, i: int) -> int:
    """Coefficient of z^i in (z^a + z^(v-a) - 3 z^v + z^(2v)) / (1-z)^2."""
    v, a = params.v, params.alpha

    def g(n: int) -> int:
        return n + 1 if n >= 0 else 0

    return g(i - a) + g(i - (v - a)) - 3 * g(i - v) + g(i - 2 * v)
