import math

import pytest

from cliffcalc.expr import (
    ExprDomainError,
    ExprSyntaxError,
    constant_expr,
    eval_jet,
    parse,
)


def test_basic_evaluation():
    e = parse("2*x1 + x2^2", 2)
    assert e.eval((1.0, 3.0)) == pytest.approx(11.0)


def test_precedence_and_associativity():
    assert parse("2 + 3 * 4", 1).eval((0,)) == pytest.approx(14.0)
    assert parse("2 - 3 - 4", 1).eval((0,)) == pytest.approx(-5.0)
    assert parse("12 / 2 / 3", 1).eval((0,)) == pytest.approx(2.0)
    assert parse("(2 + 3) * 4", 1).eval((0,)) == pytest.approx(20.0)


def test_unary_minus_and_power():
    # unary minus is part of the atom, so it binds tighter than '^'
    assert parse("-x1^2", 1).eval((3.0,)) == pytest.approx(9.0)
    assert parse("0 - x1^2", 1).eval((3.0,)) == pytest.approx(-9.0)
    assert parse("x1^-1", 1).eval((4.0,)) == pytest.approx(0.25)
    assert parse("(-x1)^2", 1).eval((3.0,)) == pytest.approx(9.0)


def test_imaginary_literal():
    e = parse("i*x1", 1)
    assert e.eval((2.0,)) == pytest.approx(2j)


def test_functions():
    p = (0.3,)
    assert parse("exp(x1)", 1).eval(p) == pytest.approx(math.exp(0.3))
    assert parse("log(exp(x1))", 1).eval(p) == pytest.approx(0.3)
    assert parse("sin(x1)^2 + cos(x1)^2", 1).eval(p) == pytest.approx(1.0)
    assert parse("sqrt(x1*x1)", 1).eval(p) == pytest.approx(0.3)


def test_jet_gradient_hessian():
    e = parse("exp(x1)*sin(x2)", 2)
    p = (0.5, 1.2)
    j = eval_jet(e, p)
    ex, s, c = math.exp(0.5), math.sin(1.2), math.cos(1.2)
    assert j.value == pytest.approx(ex * s)
    assert j.gradient[0] == pytest.approx(ex * s)
    assert j.gradient[1] == pytest.approx(ex * c)
    assert j.hessian[0][0] == pytest.approx(ex * s)
    assert j.hessian[0][1] == pytest.approx(ex * c)
    assert j.hessian[1][1] == pytest.approx(-ex * s)
    # this function is harmonic in 2 variables
    assert abs(j.hessian[0][0] + j.hessian[1][1]) < 1e-12


def test_high_order_jets():
    e = parse("exp(2*x1)", 1)
    t = e.taylor((0.0,), 5)
    for k in range(6):
        assert t.coef.get((k,), 0) == pytest.approx(2 ** k / math.factorial(k))


def test_syntax_errors_carry_offsets():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x1 + ", 1)
    assert err.value.offset == 5
    with pytest.raises(ExprSyntaxError):
        parse("", 1)
    with pytest.raises(ExprSyntaxError):
        parse("x3", 2)
    with pytest.raises(ExprSyntaxError):
        parse("foo(x1)", 1)
    with pytest.raises(ExprSyntaxError):
        parse("x1^x1", 1)
    with pytest.raises(ExprSyntaxError):
        parse("x1) + 2", 1)
    with pytest.raises(ExprSyntaxError):
        parse("x", 1)


def test_domain_error_names_subexpression():
    e = parse("log(x1 - 2)", 1)
    with pytest.raises(ExprDomainError) as err:
        e.eval((1.0,))
    assert "log" in str(err.value)
    with pytest.raises(ExprDomainError):
        parse("1/x1", 1).eval((0.0,))


def test_render_round_trip():
    sources = ["2*x1 + x2^2", "exp(x1)*sin(x2)", "-x1^2 - 1/x2", "i*x1 + sqrt(x2)",
               "x1^-3", "cos(x1 - x2)*(x1 + 0.5)"]
    for src in sources:
        e = parse(src, 2)
        again = parse(e.render(), 2)
        assert again.root == e.root
        p = (0.4, 0.9)
        assert again.eval(p) == pytest.approx(e.eval(p))


def test_variables():
    assert parse("x1*x3 + 2", 4).variables() == {1, 3}
    assert constant_expr(5.0, 3).variables() == set()


def test_constant_expr():
    e = constant_expr(2 - 1j, 2)
    assert e.eval((0, 0)) == 2 - 1j
    assert parse(e.render(), 2).eval((0, 0)) == pytest.approx(2 - 1j)
