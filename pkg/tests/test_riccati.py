import cmath
import math

import pytest

from cliffcalc.algebra import Multivector
from cliffcalc.expr import parse
from cliffcalc.fields import (
    EPS_FD,
    ConstantField,
    ExprField,
    FieldError,
    GridSpec,
    PreconditionError,
)
from cliffcalc.riccati import (
    OdeBlowupError,
    RiccatiCandidate,
    _AxisSolution,
    check_harmonic,
    combination_family_gap,
    euler_combine,
    euler_shift,
    homogeneous_sum,
    log_derivative,
    riccati_residual,
    separable_solve,
    vector_split_residuals,
)


def minus_one(n):
    return ExprField.scalar(n, "0 - 1")


def test_constant_solution():
    # f = e1: D(f) = 0, f^2 = -1, so v = -1
    n = 3
    cand = RiccatiCandidate(ConstantField(Multivector.basis(n, 1)), minus_one(n))
    rep = riccati_residual(cand, GridSpec.cube(n, samples_per_axis=4))
    assert rep.passed and rep.sup_norm < 1e-14


def test_log_derivative_round_trip():
    n = 2
    phi = ExprField.scalar(n, "exp(x1) + exp(0.5*x2)")
    cand = log_derivative(phi)
    rep = riccati_residual(cand, GridSpec.cube(n, samples_per_axis=5))
    assert rep.passed
    assert rep.sup_norm < 1e-12


def test_log_derivative_known_value():
    # phi = exp(a x1): f = a e1, v = -a^2
    n = 2
    phi = ExprField.scalar(n, "exp(0.7*x1)")
    cand = log_derivative(phi)
    p = (0.3, 0.9)
    assert (cand.f.value(p) - Multivector.basis(n, 1) * 0.7).norm() < 1e-13
    assert cand.potential.value(p).scalar_part() == pytest.approx(-0.49)


def test_vector_split():
    n = 2
    cand = log_derivative(ExprField.scalar(n, "exp(x1)*exp(x2)"))
    s_rep, b_rep = vector_split_residuals(cand, GridSpec.cube(n, samples_per_axis=4))
    assert s_rep.passed and b_rep.passed


def test_vector_split_rejects_nonvector():
    n = 2
    cand = RiccatiCandidate(ExprField.scalar(n, "1"), minus_one(n))
    with pytest.raises(FieldError):
        vector_split_residuals(cand, GridSpec.cube(n, samples_per_axis=3))


def test_axis_solution_matches_tanh():
    # v = -1: f' = 1 - f^2, f(0) = 0 has the solution tanh(x)
    sol = _AxisSolution(parse("0 - 1", 1), 1, 0.0, 0.0, -2.0, 2.0, 1e-3, 1e6)
    for x in (-1.5, -0.4, 0.37, 1.0, 2.0):
        assert abs(sol(x) - math.tanh(x)) < 1e-9
    assert abs(sol(1.0) - 0.7615941559557649) < 1e-6


def test_separable_assembles_tanh_field():
    n = 3
    cand = separable_solve([parse("0 - 1", n)] * n, [0.0] * n, [0.0] * n,
                           [(-0.9, 0.9)] * n)
    rep = riccati_residual(cand, GridSpec((( -0.9, 0.9),) * n, 5), eps=EPS_FD)
    assert rep.passed
    p = (0.5, -0.2, 0.1)
    v = cand.f.value(p)
    for j in range(n):
        assert abs(v.coeff(1 << j) - math.tanh(p[j])) < 1e-9


def test_separable_blow_up_flagged():
    # v = +1: f' = -1 - f^2 from f(0)=0 is -tan(x), pole at pi/2
    with pytest.raises(OdeBlowupError) as err:
        separable_solve([parse("1", 1)], [0.0], [0.0], [(-1.0, 2.0)])
    assert 1.4 < err.value.x < 1.7
    assert err.value.axis == 1


def test_separable_rejects_mixed_variables():
    with pytest.raises(FieldError):
        separable_solve([parse("x2", 2), parse("x2", 2)], [0, 0], [0, 0],
                        [(-1, 1), (-1, 1)])


def test_check_harmonic():
    n = 2
    assert check_harmonic(ExprField.scalar(n, "x1*x2"), GridSpec.cube(n, samples_per_axis=3)).passed
    assert not check_harmonic(ExprField.scalar(n, "x1^2"), GridSpec.cube(n, samples_per_axis=3)).passed


def test_homogeneous_sum():
    n = 3
    cand, rep = homogeneous_sum(ExprField.scalar(n, "x1"), ExprField.scalar(n, "x2"),
                                GridSpec.cube(n, samples_per_axis=4))
    assert rep.passed
    assert cand.provenance == "homogeneous_sum"


def test_homogeneous_sum_rejects_nonharmonic():
    n = 2
    with pytest.raises(PreconditionError):
        homogeneous_sum(ExprField.scalar(n, "x1^2"), ExprField.scalar(n, "x2"),
                        GridSpec.cube(n, samples_per_axis=3))


def test_euler_shift_worked_example():
    # h = e1 solves v = -1; phi = exp(-2 x1) gives f = -2 e1 + e1 = -e1
    n = 3
    h = RiccatiCandidate(ConstantField(Multivector.basis(n, 1)), minus_one(n))
    phi = ExprField.scalar(n, "exp(0 - 2*x1)")
    cand, rep = euler_shift(h, phi, GridSpec.cube(n, samples_per_axis=4))
    assert rep.passed
    for p in [(0.0, 0.0, 0.0), (0.5, -0.5, 0.25)]:
        assert (cand.f.value(p) + Multivector.basis(n, 1)).norm() < 1e-12


def test_euler_shift_rejects_bad_phi():
    n = 2
    h = RiccatiCandidate(ConstantField(Multivector.basis(n, 1)), minus_one(n))
    with pytest.raises(PreconditionError):
        euler_shift(h, ExprField.scalar(n, "exp(x2)"), GridSpec.cube(n, samples_per_axis=3))


def test_euler_combine():
    # phi1 = x1, phi2 = x2 both have D(phi) constant unit vectors solving v = -1
    n = 3
    grid = GridSpec.cube(n, samples_per_axis=5)
    for K in (2.0, -3.0, 0.5):
        cand, rep = euler_combine(ExprField.scalar(n, "x1"), ExprField.scalar(n, "x2"),
                                  K, minus_one(n), grid)
        assert rep.passed, K
        assert rep.sup_norm < rep.tolerance


def test_euler_combine_rejects_wrong_potential():
    n = 2
    with pytest.raises(PreconditionError):
        euler_combine(ExprField.scalar(n, "x1"), ExprField.scalar(n, "x2"), 2.0,
                      ExprField.scalar(n, "1"), GridSpec.cube(n, samples_per_axis=3))


def test_combination_family_gap():
    n = 3
    grid = GridSpec.cube(n, samples_per_axis=5)
    res = combination_family_gap(n, grid, [2.0, -3.0, 0.5])
    assert res.passed
    assert res.base_report.passed
    assert all(d >= 0.1 for d in res.distances.values())
    with pytest.raises(FieldError):
        combination_family_gap(2, GridSpec.cube(2, samples_per_axis=3), [2.0])


def test_to_json():
    n = 2
    cand = RiccatiCandidate(ExprField(n, {"e1": "x1"}), ExprField.scalar(n, "1"))
    d = cand.to_json()
    assert d["f"] == {"e1": "x1"}
    assert d["provenance"] == "user"
    bad = RiccatiCandidate(ConstantField(Multivector.basis(n, 1)), minus_one(n))
    with pytest.raises(FieldError):
        bad.to_json()
