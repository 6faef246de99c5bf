import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliffcalc.taylor import JetDomainError, JetOrderError, Taylor


def jet1(fn_str_order=3, x0=0.4):
    return Taylor.variable(0, x0, 1, fn_str_order)


def test_variable_seed():
    t = Taylor.variable(1, 2.5, 3, 2)
    assert t.value == 2.5
    assert t.grad(1) == 1.0
    assert t.grad(0) == 0.0


def test_polynomial_derivatives():
    # f(x, y) = x^2 y + 3y at (1, 2)
    x = Taylor.variable(0, 1.0, 2, 3)
    y = Taylor.variable(1, 2.0, 2, 3)
    f = x * x * y + 3.0 * y
    assert f.value == pytest.approx(8.0)
    assert f.grad(0) == pytest.approx(4.0)   # 2xy
    assert f.grad(1) == pytest.approx(4.0)   # x^2 + 3
    assert f.second(0, 0) == pytest.approx(4.0)  # 2y
    assert f.second(0, 1) == pytest.approx(2.0)  # 2x
    assert f.second(1, 1) == pytest.approx(0.0)


def test_exp_against_math():
    x0 = 0.7
    t = jet1(4, x0).exp()
    e = math.exp(x0)
    for k in range(5):
        # Taylor coefficient of exp is e^x0 / k!
        assert t.coef.get((k,), 0) == pytest.approx(e / math.factorial(k))


def test_log_sin_cos_sqrt_values_and_grads():
    x0 = 0.8
    t = jet1(2, x0)
    assert t.log().value == pytest.approx(math.log(x0))
    assert t.log().grad(0) == pytest.approx(1 / x0)
    assert t.sin().grad(0) == pytest.approx(math.cos(x0))
    assert t.cos().grad(0) == pytest.approx(-math.sin(x0))
    assert t.sqrt().value == pytest.approx(math.sqrt(x0))
    assert t.sqrt().grad(0) == pytest.approx(0.5 / math.sqrt(x0))


def test_reciprocal_and_division():
    x0 = 0.5
    t = jet1(3, x0)
    r = t.reciprocal()
    assert r.value == pytest.approx(2.0)
    assert r.grad(0) == pytest.approx(-4.0)  # -1/x^2
    q = 1.0 / t
    assert q.value == pytest.approx(2.0)
    assert (t / t).value == pytest.approx(1.0)


def test_intpow():
    t = jet1(3, 2.0)
    assert t.intpow(3).value == pytest.approx(8.0)
    assert t.intpow(3).grad(0) == pytest.approx(12.0)
    assert t.intpow(0).value == 1.0
    assert t.intpow(-2).value == pytest.approx(0.25)
    assert t.intpow(-2).grad(0) == pytest.approx(-0.25)  # -2/x^3


def test_diff_costs_one_order():
    t = jet1(2).exp()
    d = t.diff(0)
    assert d.order == 1
    assert d.value == pytest.approx(math.exp(0.4))
    with pytest.raises(JetOrderError):
        d.diff(0).diff(0)


def test_diff_matches_grad():
    x = Taylor.variable(0, 0.3, 2, 3)
    y = Taylor.variable(1, -0.2, 2, 3)
    f = (x * y).exp() + x.sin() * y
    assert f.diff(0).value == pytest.approx(f.grad(0))
    assert f.diff(0).diff(1).value == pytest.approx(f.second(0, 1))


def test_truncation_to_min_order():
    a = Taylor.variable(0, 1.0, 1, 3)
    b = Taylor.variable(0, 1.0, 1, 1)
    assert (a + b).order == 1
    assert (a * b).order == 1


def test_domain_errors():
    t = Taylor.variable(0, -1.0, 1, 2)
    with pytest.raises(JetDomainError):
        t.log()
    zero = Taylor.constant(0.0, 1, 2)
    with pytest.raises(JetDomainError):
        zero.reciprocal()
    with pytest.raises(JetDomainError):
        zero.sqrt()


def test_complex_arithmetic():
    t = Taylor.variable(0, 0.2, 1, 2) * (1 + 2j)
    assert t.value == pytest.approx((1 + 2j) * 0.2)
    assert t.conjugate().value == pytest.approx((1 - 2j) * 0.2)


@settings(max_examples=40, deadline=None)
@given(x0=st.floats(min_value=-1.0, max_value=1.0),
       y0=st.floats(min_value=-1.0, max_value=1.0))
def test_product_rule_property(x0, y0):
    x = Taylor.variable(0, x0, 2, 2)
    y = Taylor.variable(1, y0, 2, 2)
    f = x.sin() + y
    g = x.cos() * y + 2.0
    prod = f * g
    assert prod.grad(0) == pytest.approx(f.grad(0) * g.value + f.value * g.grad(0), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(x0=st.floats(min_value=-0.9, max_value=0.9))
def test_exp_log_round_trip(x0):
    t = Taylor.variable(0, x0, 1, 3)
    back = t.exp().log()
    for k in range(4):
        want = x0 if k == 0 else (1.0 if k == 1 else 0.0)
        assert abs(back.coef.get((k,), 0j) - want) < 1e-10
