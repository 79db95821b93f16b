import random
from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from weiljet.errors import NotDivisible, SpecMismatch
from weiljet.expr import Variable, evaluate, parse
from weiljet.jets import (
    NearPoint,
    TwistSpec,
    jet_from_coordinates,
    jet_var,
    parse_jet_var,
    prolong,
    random_jet_values,
    singular_twisted_quotient,
    total_derivative,
    twisted_differential,
    universal_jet,
    lambda_constant,
    wronskian,
)
from weiljet.presets import DERIVE_PRESETS, SCHWARZIAN, volume_expr
from weiljet.ring import Polynomial, RationalFunction, RingDescriptor
from weiljet.weil import MultiWeilElement, WeilElement, WeilSpec, lift, tensor_rk

from .conftest import to_sympy

T = sympy.Symbol("t")


def rf_to_sympy(c):
    if isinstance(c, RationalFunction):
        return to_sympy(c.num) / to_sympy(c.den)
    if isinstance(c, Polynomial):
        return to_sympy(c)
    return sympy.Rational(c.numerator, c.denominator)


def sympy_twisted(expr_text, n, r, twist):
    """Independent oracle: substitute x_i(c_j t) as a Taylor polynomial and expand in t."""
    syms = {}
    curve = {}
    for i in range(1, n + 1):
        coeffs = [sympy.Symbol(jet_var(i, o)) for o in range(r + 1)]
        syms.update({str(s): s for s in coeffs})
        curve[i] = lambda t, cs=coeffs: sum(c * t ** o / factorial(o) for o, c in enumerate(cs))
    local = {f"x{i}_p{j}": curve[i](c * T) for i in range(1, n + 1) for j, c in enumerate(twist, start=1)}
    text = expr_text.replace("^", "**")
    for d in (2, 3):
        text = text.replace(f"det{d}(", f"_det{d}(")
    ns = dict(local)
    ns["_det2"] = lambda *a: sympy.Matrix(2, 2, a).det()
    ns["_det3"] = lambda *a: sympy.Matrix(3, 3, a).det()
    value = eval(text, {"__builtins__": {}}, ns)
    series = sympy.series(value, T, 0, r + 1).removeO()
    return [sympy.simplify(series.coeff(T, k)) for k in range(r + 1)]


def engine_twisted(expr_text, n, r, twist):
    p = universal_jet(n, 1, r)
    res = twisted_differential(parse(expr_text), TwistSpec.scaling(p.spec, *twist), p)
    return [rf_to_sympy(res.coefficient(k)) for k in range(r + 1)]


# ---------------------------------------------------------------- jets


def test_universal_jet_shape():
    p = universal_jet(2, 1, 3)
    assert p.spec.dimension == 4
    assert p.series[0].coeff((2,)) == RingDescriptor.rational_function(p.spec.ring.vars).var("x1_d2") * Fraction(1, 2)
    coords = p.coordinates()
    assert set(coords) == {jet_var(i, o) for i in (1, 2) for o in range(4)}
    assert coords["x2_d3"] == p.spec.ring.var("x2_d3")
    q = universal_jet(1, 2, 2)
    assert q.spec.dimension == 6
    assert q.series[0].coeff((1, 1)) == q.spec.ring.var("x1_a1_1")


def test_jet_variable_names():
    assert jet_var(1, 3) == "x1_d3"
    assert jet_var(2, (1, 0)) == "x2_a1_0"
    assert parse_jet_var("x2_a1_0") == (2, (1, 0))
    assert parse_jet_var("x1_p1") is None


def test_prolong_examples():
    A = WeilSpec(1, 2)
    p = jet_from_coordinates({"x1_d0": Fraction(2), "x1_d1": Fraction(1)}, 1, A)
    # (2 + e)^2 = 4 + 4e + e^2
    assert prolong(parse("x1_p1^2"), p) == WeilElement(A, {(0,): 4, (1,): 4, (2,): 1})
    # 1/(2 + e) = 1/2 - e/4 + e^2/8
    assert prolong(parse("1/x1_p1"), p) == WeilElement(A, {(0,): Fraction(1, 2), (1,): Fraction(-1, 4), (2,): Fraction(1, 8)})


def test_prolong_over_multi_weil_is_componentwise():
    A = WeilSpec(1, 2)
    P = tensor_rk(A, 2)
    u = MultiWeilElement(P, [A.const(2) + A.gen(0), A.const(3)])
    v = evaluate(parse("x^2 + 1/x"), {"x": u}, algebra=P)
    for part, src in zip(v.parts, u.parts):
        assert part == evaluate(parse("x^2 + 1/x"), {"x": src}, algebra=A)


def test_near_point_rejects_mixed_algebras():
    with pytest.raises(SpecMismatch):
        NearPoint(2, WeilSpec(1, 2), (WeilSpec(1, 2).one(), WeilSpec(1, 3).one()))


def test_total_derivative_examples():
    assert total_derivative(parse("x1_d1^2")) == parse("2*x1_d1*x1_d2")
    assert total_derivative(parse("x1_d1*x2_d2")) == parse("x2_d2*x1_d2 + x1_d1*x2_d3")
    assert total_derivative(parse("x1_a1_0"), j=1, m=2) == Variable("x1_a1_1")
    assert evaluate(total_derivative(parse("5")), {}) == 0


def test_total_derivative_is_derivative_along_curves():
    t = sympy.Symbol("t")
    curve = 3 * t ** 4 - t ** 3 + 2 * t + 1
    e = parse(SCHWARZIAN)
    de = total_derivative(e)
    for t0 in (Fraction(1), Fraction(2), Fraction(-3, 2)):
        jet = {f"x1_d{o}": Fraction(str(sympy.diff(curve, t, o).subs(t, sympy.Rational(t0)))) for o in range(5)}
        along = sympy.diff(
            sympy.sympify(SCHWARZIAN.replace("^", "**")).subs(
                {sympy.Symbol(f"x1_d{o}"): sympy.diff(curve, t, o) for o in range(1, 4)}
            ),
            t,
        ).subs(t, sympy.Rational(t0))
        assert evaluate(de, jet) == Fraction(str(along))


# ---------------------------------------------------------------- twisted differentials


def split_quotient(text):
    num, den = text.split(")/(")
    return num + ")", "(" + den


@pytest.mark.parametrize("name", ["endo-metric", "area", "affine-ratio", "anharmonic"])
def test_twisted_against_sympy_oracle(name):
    pre = DERIVE_PRESETS[name]
    # a quotient's denominator is nilpotent, so numerator and denominator are checked on their own
    parts = split_quotient(pre.expr) if pre.quotient else (pre.expr,)
    for text in parts:
        engine = engine_twisted(text, pre.dim, pre.jet_order, pre.twist)
        oracle = sympy_twisted(text, pre.dim, pre.jet_order, pre.twist)
        for k, (a, b) in enumerate(zip(engine, oracle)):
            assert sympy.simplify(a - b) == 0, (text, k)


def test_frozen_twisted_values():
    # frozen from the sympy oracle above
    p = universal_jet(2, 1, 2)
    R = p.spec.ring
    res = twisted_differential(parse(DERIVE_PRESETS["endo-metric"].expr), TwistSpec.scaling(p.spec, 0, 1), p)
    assert [a for a, _ in res.components] == [(2,)]
    assert res.coefficient(2) == R.var("x1_d1") ** 2 + R.var("x2_d1") ** 2
    p3 = universal_jet(2, 1, 3)
    R3 = p3.spec.ring
    area = twisted_differential(parse(volume_expr(2)), TwistSpec.scaling(p3.spec, 0, 1, 2), p3)
    assert area.lowest()[0] == (3,)
    assert area.coefficient(3) == R3.var("x1_d1") * R3.var("x2_d2") - R3.var("x1_d2") * R3.var("x2_d1")


def test_volume_three_vanishes_below_six():
    p = universal_jet(3, 1, 6)
    res = twisted_differential(parse(volume_expr(3)), TwistSpec.scaling(p.spec, 0, 1, 2, 3), p)
    assert res.lowest()[0] == (6,)
    R = p.spec.ring
    W = evaluate(wronskian(3), {v: R.var(v) for v in R.vars}, algebra=R)
    assert res.coefficient(6) == lambda_constant(3) * W


def test_singular_quotients():
    p = universal_jet(1, 1, 2)
    R = p.spec.ring
    q = singular_twisted_quotient(
        parse("x1_p3 - x1_p1"), parse("x1_p2 - x1_p1"), TwistSpec.scaling(p.spec, 0, 1, 2), p
    )
    assert q.reduced_order == 1
    assert q.coefficient(0) == 2
    assert q.coefficient(1) == R.var("x1_d2") / R.var("x1_d1")
    p4 = universal_jet(1, 1, 4)
    pre = DERIVE_PRESETS["anharmonic"]
    num, den = split_quotient(pre.expr)
    aq = singular_twisted_quotient(parse(num), parse(den), TwistSpec.scaling(p4.spec, *pre.twist), p4)
    assert aq.reduced_order == 2
    assert aq.coefficient(0) == 4 and aq.coefficient(1) == 0
    R4 = p4.spec.ring
    x1, x2, x3 = (R4.var(f"x1_d{o}") for o in (1, 2, 3))
    assert aq.coefficient(2) == (3 * x2 ** 2 - 2 * x1 * x3) / x1 ** 2


def test_quotient_not_divisible():
    p = universal_jet(1, 1, 2)
    with pytest.raises(NotDivisible):
        singular_twisted_quotient(parse("x1_p1"), parse("x1_p2 - x1_p1"), TwistSpec.scaling(p.spec, 0, 1), p)


@pytest.mark.parametrize("n", range(1, 7))
def test_lambda_constant(n):
    assert lambda_constant(n) == 1


def test_derivation_json():
    p = universal_jet(1, 1, 2)
    q = singular_twisted_quotient(
        parse("x1_p3 - x1_p1"), parse("x1_p2 - x1_p1"), TwistSpec.scaling(p.spec, 0, 1, 2), p
    )
    assert q.to_json() == {
        "order": 2,
        "reduced_order": 1,
        "components": [
            {"eps_power": 0, "coefficient": "2", "factorial_scaled": "2"},
            {"eps_power": 1, "coefficient": "x1_d2/x1_d1", "factorial_scaled": "x1_d2/x1_d1"},
        ],
    }


@pytest.mark.parametrize("name", ["area", "anharmonic"])
def test_symbolic_and_numeric_agree(name):
    pre = DERIVE_PRESETS[name]
    sym = universal_jet(pre.dim, 1, pre.jet_order)
    tw = TwistSpec.scaling(sym.spec, *pre.twist)
    symbolic = twisted_differential(parse(pre.expr), tw, sym) if not pre.quotient else None
    rng = random.Random(11)
    checked = 0
    while checked < 20:
        vals = random_jet_values(rng, pre.dim, pre.jet_order)
        if vals["x1_d1"] == 0:
            continue
        A = WeilSpec(1, pre.jet_order)
        num = jet_from_coordinates(vals, pre.dim, A)
        ntw = TwistSpec.scaling(A, *pre.twist)
        if pre.quotient:
            I, J = (parse(t) for t in split_quotient(pre.expr))
            a = singular_twisted_quotient(I, J, ntw, num)
            b = singular_twisted_quotient(I, J, tw, sym)
        else:
            a, b = twisted_differential(parse(pre.expr), ntw, num), symbolic
        for alpha in a.element.spec.basis:
            assert b.element.coeff(alpha).evaluate(vals) == a.element.coeff(alpha)
        checked += 1


def _diff_polys():
    diffs = [parse("x1_p2 - x1_p1"), parse("x1_p3 - x1_p1"), parse("x2_p2 - x2_p1")]
    mono = st.tuples(st.sampled_from(range(3)), st.integers(1, 2), st.integers(-3, 3).filter(bool))
    return st.lists(mono, min_size=1, max_size=4).map(
        lambda terms: sum((c * diffs[i] ** k for i, k, c in terms[1:]), terms[0][2] * diffs[terms[0][0]] ** terms[0][1])
    )


@settings(max_examples=30)
@given(_diff_polys(), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_differences_have_positive_order(I, twist):
    p = universal_jet(2, 1, 2, kind="polynomial")
    res = twisted_differential(I, TwistSpec.scaling(p.spec, *twist), p)
    assert res.element.coeff((0,)) == 0


@given(st.lists(st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5)), min_size=6, max_size=6))
def test_area_lowest_term_is_lambda_times_wronskian(vals):
    A = WeilSpec(1, 3)
    coords = {jet_var(i, o): vals[(i - 1) * 3 + o - 1] for i in (1, 2) for o in (1, 2, 3)}
    p = jet_from_coordinates(coords, 2, A)
    res = twisted_differential(parse(volume_expr(2)), TwistSpec.scaling(A, 0, 1, 2), p)
    W = evaluate(wronskian(2), coords)
    assert res.coefficient(3) == lambda_constant(2) * W
    assert all(res.coefficient(k) == 0 for k in range(3))


@settings(max_examples=25)
@given(st.lists(st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5)), min_size=4, max_size=4))
def test_quotient_lift_reproduces_numerator(vals):
    if vals[0] == 0:
        return
    A = WeilSpec(1, 4)
    p = jet_from_coordinates({jet_var(1, o): v for o, v in enumerate(vals, start=1)}, 1, A)
    pre = DERIVE_PRESETS["anharmonic"]
    I, J = (parse(t) for t in split_quotient(pre.expr))
    tw = TwistSpec.scaling(A, *pre.twist)
    q = singular_twisted_quotient(I, J, tw, p)
    num, den = twisted_differential(I, tw, p).element, twisted_differential(J, tw, p).element
    assert den * lift(q.element, 4) == num
