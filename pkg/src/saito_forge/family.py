"""The parametric family of divisors and its parameter validation.

A family member is F = x^(d-a)*F1 + y^(v+a+1)*F2 + x^b*y^(d-b-1)*z with
v = floor(d/2), built from bivariate forms F1 (degree a, square-free) and F2
(degree d-v-a-1), neither divisible by x or y, under the parameter bound
a + b <= floor((d+1)/2) - 3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .field import Field, QQ, check_char_policy, field_from_spec
from .poly import Poly, divides, is_squarefree_bivariate, parse, render


class InvalidParams(Exception):
    pass


class ExhaustedRetries(Exception):
    pass


def pair_bound(d: int) -> int:
    return (d + 1) // 2 - 3


def legal_pairs(d: int) -> list[tuple[int, int]]:
    """All (alpha, beta) with alpha, beta >= 0 and alpha + beta within bound."""
    bound = pair_bound(d)
    return [(a, b) for a in range(bound + 1) for b in range(bound + 1 - a)]


@dataclass(frozen=True)
class FamilyParams:
    d: int
    alpha: int
    beta: int
    f1: Poly
    f2: Poly
    seed: int | None = None

    @property
    def v(self) -> int:
        return self.d // 2

    @property
    def gamma(self) -> int:
        return self.d - self.v - 3 - self.alpha - self.beta

    @property
    def field(self) -> Field:
        return self.f2.field


@dataclass
class ValidationReport:
    checks: list = dc_field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
        }


def validate(params: FamilyParams, drop_squarefree: bool = False) -> ValidationReport:
    """Check every family condition; the report carries each pass/fail."""
    d, a, b = params.d, params.alpha, params.beta
    v = params.v
    f1, f2 = params.f1, params.f2
    rep = ValidationReport()
    rep.add("degree_min", d >= 5, f"d={d} must be >= 5")
    rep.add("exponents_nonnegative", a >= 0 and b >= 0, f"alpha={a}, beta={b}")
    bound = pair_bound(d)
    rep.add("exponent_sum_bound", 0 <= a + b <= bound, f"alpha+beta={a + b} must be <= {bound}")
    rep.add("char_policy", check_char_policy(params.field, d), f"need char 0 or p > {3 * d}")
    rep.add("f1_field", f1.field == f2.field, "F1 and F2 over the same field")
    rep.add("f1_bivariate", f1.nvars == 2 and f2.nvars == 2, "F1, F2 in x, y only")
    x = Poly.variable(f1.field, "x", 2)
    y = Poly.variable(f1.field, "y", 2)
    rep.add("f1_degree", (not f1.is_zero()) and f1.is_homogeneous() and f1.degree() == a,
            f"deg F1 = {f1.degree()}, expected {a}")
    deg2 = d - v - a - 1
    rep.add("f2_degree", (not f2.is_zero()) and f2.is_homogeneous() and f2.degree() == deg2,
            f"deg F2 = {f2.degree()}, expected {deg2}")
    if rep.ok:
        rep.add("x_ndiv_f1", not divides(x, f1)[0], "x must not divide F1")
        rep.add("y_ndiv_f1", not divides(y, f1)[0], "y must not divide F1")
        rep.add("x_ndiv_f2", not divides(x, f2)[0], "x must not divide F2")
        rep.add("y_ndiv_f2", not divides(y, f2)[0], "y must not divide F2")
        if not drop_squarefree:
            rep.add("f1_squarefree", is_squarefree_bivariate(f1), "F1 must be square-free")
    return rep


@dataclass(frozen=True)
class DivisorInstance:
    params: FamilyParams
    f: Poly
    fx: Poly
    fy: Poly
    fz: Poly

    @property
    def jacobian(self):
        return (self.fx, self.fy, self.fz)


def build_divisor(params: FamilyParams, drop_squarefree: bool = False) -> DivisorInstance:
    """Assemble F and its gradient; raises InvalidParams on a failed report."""
    rep = validate(params, drop_squarefree=drop_squarefree)
    if not rep.ok:
        raise InvalidParams(f"invalid parameters: {', '.join(rep.failures())}")
    d, a, b = params.d, params.alpha, params.beta
    v = params.v
    fld = params.field
    f1 = params.f1.as_trivariate()
    f2 = params.f2.as_trivariate()
    block1 = Poly.monomial(fld, (d - a, 0, 0)) * f1
    block2 = Poly.monomial(fld, (0, v + a + 1, 0)) * f2
    block_z = Poly.monomial(fld, (b, d - b - 1, 1))
    # the two bivariate support blocks may never share a monomial
    assert not (set(block1.terms) & set(block2.terms)), "support blocks overlap"
    f = block1 + block2 + block_z
    assert f.is_homogeneous() and f.degree() == d
    f.euler_check()
    return DivisorInstance(params, f, f.partial("x"), f.partial("y"), f.partial("z"))


def _random_form(field: Field, degree: int, rng: random.Random) -> Poly:
    """Dense random bivariate form with nonzero x^deg and y^deg edge coefficients."""
    terms = {}
    for i in range(degree + 1):
        if i in (0, degree):
            c = field.random_nonzero(rng)
        else:
            c = field.random(rng)
        if not field.is_zero(c):
            terms[(i, degree - i, 0)] = c
    return Poly(field, 2, terms)


def random_instance(d: int, alpha: int, beta: int, seed: int, field: Field = QQ,
                    drop_squarefree: bool = False) -> FamilyParams:
    """Reproducible random family member for legal (d, alpha, beta).

    Coefficients are drawn from a PRNG seeded by (d, alpha, beta, seed) and
    resampled until validation passes; the edge coefficients of F1, F2 are
    forced nonzero so the divisibility conditions hold by construction.
    """
    if not (alpha >= 0 and beta >= 0 and alpha + beta <= pair_bound(d)):
        raise InvalidParams(f"(d, alpha, beta) = ({d}, {alpha}, {beta}) violates the parameter bound")
    # string seeds hash deterministically across processes, tuples do not
    rng = random.Random(f"{d}:{alpha}:{beta}:{seed}:{field!r}")
    for _ in range(100):
        f1 = _random_form(field, alpha, rng)
        f2 = _random_form(field, d - d // 2 - alpha - 1, rng)
        params = FamilyParams(d, alpha, beta, f1, f2, seed=seed)
        if validate(params, drop_squarefree=drop_squarefree).ok:
            return params
    raise ExhaustedRetries(f"no valid instance after 100 draws for (d={d}, alpha={alpha}, beta={beta})")


def random_non_squarefree_instance(d: int, alpha: int, beta: int, seed: int,
                                   field: Field = QQ) -> FamilyParams:
    """Exploratory variant: F1 carries a forced repeated linear factor.

    Needs alpha >= 2; everything else follows random_instance.
    """
    if alpha < 2:
        raise InvalidParams("a repeated factor in F1 needs alpha >= 2")
    if not (beta >= 0 and alpha + beta <= pair_bound(d)):
        raise InvalidParams(f"(d, alpha, beta) = ({d}, {alpha}, {beta}) violates the parameter bound")
    rng = random.Random(f"{d}:{alpha}:{beta}:{seed}:nsf:{field!r}")
    x = Poly.variable(field, "x", 2)
    y = Poly.variable(field, "y", 2)
    for _ in range(100):
        lin = x + y.scale(field.random_nonzero(rng))
        f1 = lin * lin * _random_form(field, alpha - 2, rng)
        f2 = _random_form(field, d - d // 2 - alpha - 1, rng)
        params = FamilyParams(d, alpha, beta, f1, f2, seed=seed)
        rep = validate(params, drop_squarefree=True)
        if rep.ok and not is_squarefree_bivariate(f1):
            return params
    raise ExhaustedRetries(f"no non-square-free instance after 100 draws for (d={d}, alpha={alpha}, beta={beta})")


def is_irreducible(f: Poly) -> bool:
    """Irreducibility test for polynomials linear in z.

    Writes f = A(x, y) + B(x, y) z; with B a monomial the only possible common
    factors are x and y, so f factors exactly when A and B share one of them.
    Validated family members always come out irreducible.
    """
    fld = f.field
    a_terms = {m: c for m, c in f.terms.items() if m[2] == 0}
    b_terms = {(m[0], m[1], 0): c for m, c in f.terms.items() if m[2] == 1}
    if any(m[2] > 1 for m in f.terms):
        raise ValueError("expected a polynomial linear in z")
    a = Poly(fld, 3, a_terms)
    b = Poly(fld, 3, b_terms)
    if b.is_zero() or a.is_zero():
        return False
    for var in ("x", "y"):
        p = Poly.variable(fld, var, 3)
        if divides(p, a)[0] and divides(p, b)[0]:
            return False
    return True


def instance_to_json(inst: DivisorInstance) -> dict:
    p = inst.params
    out = {
        "d": p.d,
        "alpha": p.alpha,
        "beta": p.beta,
        "field": p.field.to_spec(),
    }
    if p.seed is not None:
        out["seed"] = p.seed
    out["F1"] = render(p.f1)
    out["F2"] = render(p.f2)
    out["F"] = render(inst.f)
    return out


class InconsistentInstance(InvalidParams):
    """The stored F does not match the divisor assembled from its parameters."""


def instance_from_json(data: dict) -> DivisorInstance:
    fld = field_from_spec(data["field"])
    params = FamilyParams(
        d=int(data["d"]),
        alpha=int(data["alpha"]),
        beta=int(data["beta"]),
        f1=parse(data["F1"], fld, nvars=2),
        f2=parse(data["F2"], fld, nvars=2),
        seed=data.get("seed"),
    )
    inst = build_divisor(params)
    if "F" in data and parse(data["F"], fld) != inst.f:
        raise InconsistentInstance("stored F disagrees with the assembled divisor")
    return inst
