import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from weiljet.errors import NotAUnit, ParseError, UnboundVariable, UnsupportedOperation
from weiljet.expr import (
    Add,
    Constant,
    Det,
    Div,
    IntPow,
    Mul,
    Neg,
    Sqrt,
    Sub,
    Variable,
    evaluate,
    free_variables,
    parse,
    partial_derivative,
    render,
    rename,
    substitute,
)
from weiljet.presets import DERIVE_PRESETS
from weiljet.ring import Polynomial, RingDescriptor, poly_partial
from weiljet.weil import WeilElement, WeilSpec

from .conftest import polynomials, to_sympy

x, y = Variable("x"), Variable("y")


def test_parse_examples():
    assert parse("x + 2*y") == Add(x, Mul(Constant(2), y))
    assert parse("x - y - 1") == Sub(Sub(x, y), Constant(1))
    assert parse("-x^2") == Neg(IntPow(x, 2))
    assert parse("(x+y)^3") == IntPow(Add(x, y), 3)
    assert parse("1/2*x") == Mul(Constant(Fraction(1, 2)), x)
    assert parse("x/2/3") == Div(Div(x, Constant(2)), Constant(3))
    assert parse("sqrt(x)") == Sqrt(x)
    assert parse("det2(x, 1, 0, y)") == Det(2, (x, Constant(1), Constant(0), y))
    assert parse("x − y") == Sub(x, y)
    assert parse("-3") == Constant(-3)
    assert parse("  x1_p1 \n") == Variable("x1_p1")


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("x +", 1, 4),
        ("x + * y", 1, 5),
        ("(x", 1, 3),
        ("x $ y", 1, 3),
        ("det2(x, y)", 1, 1),
        ("foo(x)", 1, 1),
        ("x^y", 1, 3),
        ("x\n  + )", 2, 5),
        ("", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_render_minimal_parentheses():
    assert render(parse("x - (y - 1)")) == "x - (y - 1)"
    assert render(parse("(x - y) - 1")) == "x - y - 1"
    assert render(parse("x/(y*2)")) == "x/(y*2)"
    assert render(parse("(x*y)^2")) == "(x*y)^2"
    assert render(parse("-(x + y)")) == "-(x + y)"
    assert render(Mul(x, Constant(Fraction(2, 3)))) == "x*(2/3)"


def _ast():
    leaves = st.one_of(
        st.sampled_from([x, y, Variable("x1_p2")]),
        st.builds(Constant, st.builds(Fraction, st.integers(0, 9), st.integers(1, 4))),
    )

    def extend(children):
        binary = st.sampled_from([Add, Sub, Mul, Div])
        nonconst = children.filter(lambda c: not isinstance(c, Constant))
        return st.one_of(
            st.builds(lambda op, a, b: op(a, b), binary, children, nonconst),
            st.builds(lambda op, a, b: op(a, b), binary, nonconst, children),
            st.builds(Neg, nonconst),
            st.builds(IntPow, children, st.integers(0, 3)),
            st.builds(Sqrt, children),
            st.builds(lambda a: Det(2, a), st.tuples(children, children, children, children)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(_ast())
def test_render_parse_round_trip(e):
    assert parse(render(e)) == e


def test_free_variables_and_substitution():
    e = parse("x1_p1*x1_p2 + sqrt(x1_p1)")
    assert free_variables(e) == {"x1_p1", "x1_p2"}
    assert substitute(e, {"x1_p1": Constant(4)}) == parse("4*x1_p2 + sqrt(4)")
    assert free_variables(rename(e, {"x1_p2": "z"})) == {"x1_p1", "z"}


def test_evaluate_examples():
    d2 = parse(DERIVE_PRESETS["endo-metric"].expr)
    assert evaluate(d2, {"x1_p1": Fraction(0), "x2_p1": Fraction(0), "x1_p2": Fraction(3), "x2_p2": Fraction(4)}) == 25
    cr = parse(DERIVE_PRESETS["anharmonic"].expr)
    assert evaluate(cr, {f"x1_p{j}": Fraction(j - 1) for j in range(1, 5)}) == 4
    assert evaluate(parse("sqrt(x)"), {"x": 2.25}) == 1.5
    assert evaluate(parse("det3(1,2,3, 0,1,4, 5,6,0)"), {}) == 1


def test_evaluate_errors():
    with pytest.raises(UnboundVariable):
        evaluate(parse("x + y"), {"x": Fraction(1)})
    with pytest.raises(NotAUnit):
        evaluate(parse("1/x"), {"x": Fraction(0)})
    with pytest.raises(UnsupportedOperation):
        evaluate(parse("sqrt(x)"), {"x": Fraction(4)})
    with pytest.raises(UnsupportedOperation):
        evaluate(parse("sqrt(x)"), {"x": -1.0})
    A = WeilSpec(1, 2)
    with pytest.raises(NotAUnit):
        evaluate(parse("1/x"), {"x": A.gen(0)})


def test_evaluate_over_weil_algebra():
    A = WeilSpec(1, 2)
    eps = A.gen(0)
    # 1/(1 - e) = 1 + e + e^2
    assert evaluate(parse("1/(1 - x)"), {"x": eps}) == A.one() + eps + eps * eps
    assert evaluate(parse("x^2 + 3"), {"x": eps}, algebra=A) == A.const(3) + eps * eps


@given(st.data())
def test_prolongation_is_multiplicative(data):
    # (I*J)^A = I^A * J^A and the same for sums
    A = WeilSpec(1, 3)
    vals = data.draw(st.lists(st.builds(Fraction, st.integers(-5, 5), st.integers(1, 3)), min_size=8, max_size=8))
    a = WeilElement(A, {(k,): vals[k] for k in range(4)})
    b = WeilElement(A, {(k,): vals[4 + k] for k in range(4)})
    I, J = parse("x^2 - 2*y"), parse("x*y + 1")
    bind = {"x": a, "y": b}
    assert evaluate(Mul(I, J), bind) == evaluate(I, bind) * evaluate(J, bind)
    assert evaluate(Add(I, J), bind) == evaluate(I, bind) + evaluate(J, bind)


def test_partial_derivative_examples():
    assert partial_derivative(parse("x^3 + x*y"), "x") == parse("3*x^2 + y")
    d = partial_derivative(parse("x/y"), "y")
    assert evaluate(d, {"x": Fraction(2), "y": Fraction(4)}) == Fraction(-1, 8)
    assert partial_derivative(parse("det2(x, y, 1, x)"), "x") == parse("det2(1, y, 0, x) + det2(x, 0, 1, 1)")
    assert evaluate(partial_derivative(parse("sqrt(x)"), "x"), {"x": 4.0}) == 0.25


def test_det_derivative_against_finite_differences():
    e = parse("det2(x*y, x^2, sqrt(y), x - y)")
    dx = partial_derivative(e, "x")
    rng = random.Random(7)
    h = 1e-6
    for _ in range(10):
        px, py = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
        exact = evaluate(dx, {"x": px, "y": py})
        fd = (evaluate(e, {"x": px + h, "y": py}) - evaluate(e, {"x": px - h, "y": py})) / (2 * h)
        assert abs(exact - fd) <= 1e-6 * max(1.0, abs(exact))


def _to_expr(p: Polynomial):
    return parse(p.render()) if not p.is_zero() else Constant(0)


@given(polynomials(("x", "y", "z")), st.sampled_from(["x", "y", "z"]))
def test_partial_derivative_matches_polynomial_partial(p, v):
    R = RingDescriptor.polynomial(("x", "y", "z"))
    binding = {n: R.var(n) for n in R.vars}
    symbolic = evaluate(partial_derivative(_to_expr(p), v), binding, algebra=R)
    assert symbolic == poly_partial(p, v)
    assert sympy.expand(to_sympy(symbolic) - sympy.diff(to_sympy(p), sympy.Symbol(v))) == 0
