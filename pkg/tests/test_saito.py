import random

import pytest

from saito_forge.family import FamilyParams, build_divisor, random_instance
from saito_forge.field import PrimeField, QQ
from saito_forge.oracle import SyzygyVector, in_kernel_span, syzygy_kernel
from saito_forge.poly import Poly, parse, render, split_pure_power
from saito_forge.saito import (DegenerateConstant, ROUTE_EXPLICIT_BETA0,
                               ROUTE_EXPLICIT_ODD, ROUTE_ORACLE,
                               SaitoConstructionFailed, base_pair,
                               build_saito_matrix, compute_constants,
                               coupling_residual, det3, even_explicit_probe,
                               last_column, last_column_residual,
                               last_column_strata, middle_column,
                               middle_column_residual, middle_ingredients,
                               verify_saito)

F1009 = PrimeField(1009)


def worked_instance(fld=QQ):
    return build_divisor(FamilyParams(5, 0, 0, parse("1", fld, 2),
                                      parse("x^2 + x*y + y^2", fld, 2)))


ODD_EXPLICIT_CASES = [
    (7, 0, 1, QQ), (9, 1, 1, QQ), (9, 0, 2, F1009), (11, 2, 1, F1009),
    (11, 0, 3, F1009), (11, 1, 2, F1009), (13, 2, 1, F1009),
]

BETA0_CASES = [(5, 0, 0, QQ), (7, 1, 0, QQ), (9, 2, 0, F1009), (11, 3, 0, F1009)]

EVEN_CASES = [(6, 0, 0, QQ), (8, 0, 1, F1009), (8, 1, 0, F1009), (10, 2, 0, F1009),
              (12, 1, 1, F1009)]


# ----- constants --------------------------------------------------------------


def test_constants_bracket_edge_is_d_times_f1_edge():
    params = random_instance(9, 1, 1, seed=2, field=QQ)
    d, a = params.d, params.alpha
    x = parse("x", nvars=2)
    bracket = x * params.f1.partial("x") + (d - a) * params.f1
    assert bracket.coeff_of((a, 0, 0)) == d * params.f1.coeff_of((a, 0, 0))


def test_constants_worked_case():
    params = random_instance(7, 0, 1, seed=12, field=QQ)
    consts = compute_constants(params)
    assert consts["b"] == 1
    assert not QQ.is_zero(consts["mu"])
    assert not QQ.is_zero(consts["a"])


def test_constants_need_odd_beta_pos():
    with pytest.raises(DegenerateConstant):
        compute_constants(random_instance(7, 1, 0, seed=1, field=QQ))
    with pytest.raises(DegenerateConstant):
        compute_constants(random_instance(8, 0, 1, seed=1, field=F1009))


def test_mu_needs_the_squared_edge_factor():
    """Dropping one [F1|y^a] factor from mu (so that mu would match the naive
    edge-free closed form) must break the coupling identity whenever that edge
    coefficient is not 1."""
    from fractions import Fraction

    from saito_forge.column_system import build_column_system, solve_column_system

    params = FamilyParams(9, 1, 1, parse("x + 2*y", QQ, 2),
                          parse("2*x^3 + 3*x^2*y + 5*x*y^2 + 7*y^3", QQ, 2))
    inst = build_divisor(params)
    good = compute_constants(params)
    f1_yedge = params.f1.coeff_of((0, 1, 0))
    assert f1_yedge == Fraction(2)

    def coupling_for(mu):
        d, al, be = params.d, params.alpha, params.beta
        v = params.v
        a_const = QQ.div(QQ.neg(QQ.mul(mu, QQ.from_int(d - be - 1))),
                         QQ.from_int((d - v + al) ** 2)
                         * params.f2.coeff_of((v - al, 0, 0)) ** 2
                         * QQ.from_int(d) * params.f1.coeff_of((al, 0, 0)))
        g1, g2 = base_pair(params)
        x = parse("x", QQ, nvars=2)
        y = parse("y", QQ, nvars=2)
        e = x.scale(a_const) + y
        sol = solve_column_system(build_column_system(params, mu))
        bracket_y = y * params.f2.partial("y") + (d - v + al) * params.f2
        bracket_x = x * params.f1.partial("x") + (d - al) * params.f1
        v1, _ = split_pure_power(sol.h1, "x")
        u1, _ = split_pure_power(sol.h3, "y")
        w1, _ = split_pure_power((params.f2 * bracket_x).scale(
            QQ.mul(a_const, QQ.from_int(d - v + al))), "y")
        w2, _ = split_pure_power((params.f1 * bracket_y).scale(QQ.from_int(d - al)), "x")
        h2 = g1 * e
        h6 = (-(be * v1) - (d - be - 1) * u1 - params.f2.partial("x") * h2
              + (params.f2.partial("y") * bracket_x).scale(a_const)
              + params.f1.partial("x") * bracket_y + w1 + w2)
        ing = {"h1": sol.h1, "h2": h2, "h3": sol.h3, "h4": g2 * e, "h6": h6}
        return coupling_residual(params, ing)

    assert coupling_for(good["mu"]).is_zero()
    assert not coupling_for(QQ.div(good["mu"], f1_yedge)).is_zero()


# ----- explicit odd route -------------------------------------------------------


@pytest.mark.parametrize("d,a,b,fld", ODD_EXPLICIT_CASES)
def test_explicit_odd_route(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=33, field=fld))
    sm = build_saito_matrix(inst)
    assert sm.route == ROUTE_EXPLICIT_ODD
    assert sm.verify.passed
    # the bracket matrix determinant is exactly d*mu*F
    assert sm.unit == fld.mul(fld.from_int(d), sm.constants["mu"])
    assert sm.residuals["eq2"].is_zero()
    assert sm.residuals["eq3"].is_zero()
    assert sm.residuals["eq4"].is_zero()
    v = inst.params.v
    assert sm.column_degrees() == [1, v, v]
    assert [render(e) for e in (sm.matrix[0][0], sm.matrix[1][0], sm.matrix[2][0])] == ["x", "y", "z"]


@pytest.mark.parametrize("d,a,b,fld", ODD_EXPLICIT_CASES[:3])
def test_proof_identities(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=33, field=fld))
    sm = build_saito_matrix(inst)
    ing = sm.ingredients
    # h2/h4 share the linear factor: g1*h4 = g2*h2
    assert ing["g1"] * ing["h4"] == ing["g2"] * ing["h2"]
    assert coupling_residual(inst.params, ing).is_zero()
    assert middle_column_residual(inst, ing).is_zero()
    assert last_column_residual(inst, ing).is_zero()
    strata = last_column_strata(inst, ing)
    assert all(s.is_zero() for s in strata.values())
    assert set(strata) >= {0, 1, 2}


def test_first_column_quotient_is_degree():
    inst = worked_instance()
    sm = build_saito_matrix(inst)
    assert sm.verify.quotients[0] == parse("5")
    assert sm.verify.quotients[1].is_zero()
    assert sm.verify.quotients[2].is_zero()


# ----- explicit beta = 0 route ---------------------------------------------------


@pytest.mark.parametrize("d,a,b,fld", BETA0_CASES)
def test_beta0_route(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=44, field=fld))
    sm = build_saito_matrix(inst)
    assert sm.route == ROUTE_EXPLICIT_BETA0
    assert sm.verify.passed
    # mu is normalized to 1 on this route, so the unit is d itself
    assert sm.unit == fld.from_int(d)
    assert sm.constants["lambda"] is not None
    assert sm.ingredients["lambda_unique"]
    assert sm.column_degrees() == [1, inst.params.v, inst.params.v]


def test_worked_instance_full_matrix():
    from fractions import Fraction

    sm = build_saito_matrix(worked_instance())
    assert sm.verify.passed and sm.unit == 5
    assert render(sm.matrix[0][2]) == "1/5*y^2"   # h1 = y^2/5
    assert sm.constants["lambda"] == Fraction(4, 45)


# ----- oracle route --------------------------------------------------------------


@pytest.mark.parametrize("d,a,b,fld", EVEN_CASES)
def test_oracle_route_even(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=55, field=fld))
    sm = build_saito_matrix(inst)
    assert sm.route == ROUTE_ORACLE
    assert sm.verify.passed
    v = inst.params.v
    assert sm.column_degrees() == [1, v - 1, v]


@pytest.mark.parametrize("d,a,b,fld", [(5, 0, 0, QQ), (7, 0, 1, F1009), (9, 1, 1, F1009)])
def test_route_agreement_odd(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=66, field=fld))
    sm_exp = build_saito_matrix(inst)
    sm_orc = build_saito_matrix(inst, route="oracle")
    assert sm_exp.verify.passed and sm_orc.verify.passed
    v = inst.params.v
    basis = syzygy_kernel(inst, v)
    for j in (1, 2):
        col = sm_exp.column(j)
        vec = SyzygyVector(col[0], col[1], col[2], Poly.zero(fld))
        assert in_kernel_span(basis, vec, fld)


def test_explicit_route_override_even_rejected():
    inst = build_divisor(random_instance(6, 0, 0, seed=1, field=F1009))
    with pytest.raises((DegenerateConstant, ValueError)):
        build_saito_matrix(inst, route="explicit_odd")


def test_unknown_route():
    with pytest.raises(ValueError):
        build_saito_matrix(worked_instance(), route="nonsense")


# ----- verifier ------------------------------------------------------------------


def test_verify_identity_matrix_fails():
    inst = worked_instance()
    fld = inst.f.field
    one = Poly.constant(fld, fld.one)
    zero = Poly.zero(fld)
    ident = [[one, zero, zero], [zero, one, zero], [zero, zero, one]]
    rep = verify_saito(inst.f, ident)
    assert not rep.passed
    assert rep.unit is None


def test_verify_rescaled_column_gives_det_f():
    # dividing one column by the unit makes det(B) = F verbatim
    inst = worked_instance()
    sm = build_saito_matrix(inst)
    fld = inst.f.field
    inv = fld.inv(sm.unit)
    rescaled = [row[:2] + [row[2].scale(inv)] for row in sm.matrix]
    rep = verify_saito(inst.f, rescaled)
    assert rep.passed and rep.unit == fld.one
    assert det3(rescaled) == inst.f


def test_verify_reports_failing_column():
    inst = worked_instance()
    sm = build_saito_matrix(inst)
    bad = [row[:] for row in sm.matrix]
    bad[0][1] = bad[0][1] + parse("x^2")
    rep = verify_saito(inst.f, bad)
    assert not rep.passed
    assert any("column 2" in f for f in rep.failures)


# ----- sensitivity ---------------------------------------------------------------


@pytest.mark.parametrize("d,a,b,fld", [(9, 1, 1, F1009), (7, 0, 1, QQ)])
def test_perturbation_sensitivity(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=77, field=fld))
    sm = build_saito_matrix(inst)
    rng = random.Random(123)
    for key in ("g1", "g2", "g3", "w", "h1", "h2", "h3", "h4", "h5", "h6"):
        ing = dict(sm.ingredients)
        bump = Poly.constant(fld, fld.from_int(rng.randint(1, 100)), nvars=2)
        ing[key] = ing[key] + bump
        col2 = middle_column(inst.params, ing)
        col3 = last_column(inst.params, ing)
        eq3 = middle_column_residual(inst, ing)
        eq4 = last_column_residual(inst, ing)
        matrix = [[parse("x", fld), col2[0], col3[0]],
                  [parse("y", fld), col2[1], col3[1]],
                  [parse("z", fld), col2[2], col3[2]]]
        det_ok = verify_saito(inst.f, matrix).passed
        assert (not eq3.is_zero()) or (not eq4.is_zero()) or (not det_ok), key


def test_g3_perturbation_breaks_middle_column():
    inst = build_divisor(random_instance(9, 1, 1, seed=5, field=F1009))
    ing = middle_ingredients(inst.params)
    assert middle_column_residual(inst, ing).is_zero()
    ing["g3"] = ing["g3"] + Poly.constant(F1009, 1, nvars=2)
    assert not middle_column_residual(inst, ing).is_zero()


# ----- even-degree experimental probe ---------------------------------------------


@pytest.mark.parametrize("d,a,b,fld", [(8, 0, 1, F1009), (10, 1, 1, F1009), (8, 0, 1, QQ)])
def test_even_probe_finds_quadratic_multiplier(d, a, b, fld):
    inst = build_divisor(random_instance(d, a, b, seed=5, field=fld))
    res = even_explicit_probe(inst)
    assert res["attempted"] and res["success"]
    assert res["e"] != "0"


def test_even_probe_skips_beta0():
    inst = build_divisor(random_instance(6, 0, 0, seed=5, field=F1009))
    res = even_explicit_probe(inst)
    assert not res["attempted"]


# ----- report shape ----------------------------------------------------------------


def test_report_json_shape():
    sm = build_saito_matrix(worked_instance())
    data = sm.to_json()
    assert list(data) == ["route", "pass", "unit_c", "column_degrees",
                          "residuals", "constants", "matrix"]
    assert list(data["residuals"]) == ["eq2", "eq3", "eq4", "det"]
    assert list(data["constants"]) == ["a", "b", "mu", "lambda"]
    assert data["residuals"]["det"] == "0"
    assert data["pass"] is True
