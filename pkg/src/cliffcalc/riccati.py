"""The Clifford Riccati equation D(f) + f^2 = v: residuals and constructors.

Constructors cover logarithmic derivatives of Schroedinger / harmonic
solutions, separable potentials solved axis-by-axis as classical 1-D
Riccati ODEs, sums of homogeneous solutions, and the two Euler-style
combination rules for building new solutions out of known ones.
Every construction verifies its own hypotheses numerically before
claiming anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import Multivector
from .expr import BinOp, ScalarExpr, constant_expr
from .fields import (
    EPS_EXACT,
    EPS_FD,
    ConstantField,
    DerivedField,
    ExprField,
    FDField,
    FieldError,
    GridSpec,
    MultivectorField,
    PreconditionError,
    ResidualReport,
    add_fields,
    dirac_field,
    div_by_scalar_field,
    grid_residual,
    mv_dirac,
    mv_laplacian,
    mv_value,
    scalar_of,
    _inv_scalar,
)

DEFAULT_DENOM_RADIUS = 1e-2
ODE_DEFAULT_STEP = 1e-3
ODE_BLOWUP_BOUND = 1e6


class OdeBlowupError(ArithmeticError):
    """The 1-D Riccati flow left the trust region: finite-time singularity."""

    def __init__(self, axis, x, value):
        super().__init__(f"1-D Riccati solution on axis {axis} blew up near x = {x:.6g} (|f| > {abs(value):.3g})")
        self.axis = axis
        self.x = x


@dataclass
class RiccatiCandidate:
    f: MultivectorField
    potential: MultivectorField  # scalar-valued field
    provenance: str = "user"

    @property
    def n(self):
        return self.f.n

    def to_json(self):
        if not isinstance(self.f, ExprField) or not isinstance(self.potential, ExprField):
            raise FieldError("only expression-backed candidates serialize to JSON")
        v = self.potential.components.get(0)
        return {
            "f": self.f.render_components(),
            "v": v.render() if v is not None else "0",
            "provenance": self.provenance,
        }


def riccati_residual(c: RiccatiCandidate, grid: GridSpec, tol=None, eps=EPS_EXACT) -> ResidualReport:
    """Sup/RMS of D(f) + f f - v over the grid."""

    def lhs_at(p):
        fj = c.f.at(p, 1)
        return mv_dirac(fj) + fj * fj

    def residual_at(p):
        return mv_value(lhs_at(p) - c.potential.at(p, 0))

    return grid_residual(residual_at, grid, tol=tol, eps=eps, scale_at=lambda p: mv_value(lhs_at(p)).norm())


def log_derivative(phi: MultivectorField, provenance="log_derivative") -> RiccatiCandidate:
    """Candidate f = D(phi)/phi with claimed potential v = -Lap(phi)/phi."""
    n = phi.n

    def f_at(p, order):
        inv = _inv_scalar(scalar_of(phi.at(p, order)))
        return mv_dirac(phi.at(p, order + 1)).map_coeffs(lambda t: t * inv)

    def v_at(p, order):
        inv = _inv_scalar(scalar_of(phi.at(p, order)))
        return -mv_laplacian(phi.at(p, order + 2)).map_coeffs(lambda t: t * inv)

    return RiccatiCandidate(DerivedField(n, f_at), DerivedField(n, v_at), provenance)


def vector_split_residuals(c: RiccatiCandidate, grid: GridSpec, tol=None, eps=EPS_EXACT):
    """Scalar and bivector parts of the full residual, for grade-1 candidates.

    The full residual of a 1-vector candidate with scalar potential carries
    exactly grades {0, 2}; anything else signals a malformed input.
    """
    cache = {}

    def full_at(p):
        fj = c.f.at(p, 1)
        if not mv_value(fj).is_homogeneous(1):
            raise FieldError("vector split needs a pure grade-1 candidate")
        r = mv_value(mv_dirac(fj) + fj * fj - c.potential.at(p, 0))
        leftover = r - r.grade(0) - r.grade(2)
        if leftover.norm() > 1e-12 * (1.0 + r.norm()):
            raise FieldError("residual has grades outside {0, 2}; potential is not scalar")
        cache[p] = r
        return r

    def part(k):
        return lambda p: cache[p].grade(k) if p in cache else full_at(p).grade(k)

    scalar_report = grid_residual(lambda p: full_at(p).grade(0), grid, tol=tol, eps=eps,
                                  scale_at=lambda p: cache[p].norm())
    bivector_report = grid_residual(part(2), grid, tol=tol, eps=eps)
    return scalar_report, bivector_report


class _AxisSolution:
    """Dense output of one scalar Riccati ODE f' = -v(x) - f^2 via RK4.

    Knots are stored on a fixed step ladder from x0 out to both box ends;
    a query takes the nearest knot toward x0 plus one partial RK4 step,
    so evaluation is smooth in x up to the integrator's own error.
    """

    def __init__(self, v_expr: ScalarExpr, axis: int, x0: float, f0: float,
                 lo: float, hi: float, step: float, blowup: float):
        self.axis = axis
        self.x0 = x0
        self.step = step
        self._v = v_expr
        self._n = v_expr.n
        self.forward = self._march(x0, f0, hi, step, blowup)
        self.backward = self._march(x0, f0, lo, -step, blowup)

    def _rhs(self, x, y):
        p = [0.0] * self._n
        p[self.axis - 1] = x
        return -self._v.eval(tuple(p)) - y * y

    def _rk4_step(self, x, y, h):
        k1 = self._rhs(x, y)
        k2 = self._rhs(x + h / 2, y + h * k1 / 2)
        k3 = self._rhs(x + h / 2, y + h * k2 / 2)
        k4 = self._rhs(x + h, y + h * k3)
        return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6

    def _march(self, x0, f0, target, h, blowup):
        knots = [complex(f0)]
        x, y = x0, complex(f0)
        steps = int(abs((target - x0) / h) + 1e-9)
        for _ in range(steps):
            y = self._rk4_step(x, y, h)
            x += h
            if abs(y) > blowup:
                raise OdeBlowupError(self.axis, x, y)
            knots.append(y)
        return knots

    def __call__(self, x):
        dx = x - self.x0
        knots = self.forward if dx >= 0 else self.backward
        h = self.step if dx >= 0 else -self.step
        i = min(int(abs(dx) / self.step), len(knots) - 1)
        rem = dx - i * h
        y = knots[i]
        if rem:
            y = self._rk4_step(self.x0 + i * h, y, rem)
        return y


def separable_solve(v_list, x0, f0, box, step=ODE_DEFAULT_STEP, blowup=ODE_BLOWUP_BOUND,
                    fd_step=1e-5) -> RiccatiCandidate:
    """Assemble f = sum_k f_k(x_k) e_k from per-axis 1-D Riccati solutions.

    Each v_k may depend only on x_k; the assembled candidate claims the
    potential v = sum_k v_k and is a finite-difference-mode field.
    Raises OdeBlowupError when any axis solution leaves |f| <= blowup
    inside the box.
    """
    n = len(v_list)
    if not (len(x0) == len(f0) == len(box) == n):
        raise FieldError("v_list, x0, f0 and box must all have one entry per axis")
    for k, v in enumerate(v_list, start=1):
        extra = v.variables() - {k}
        if extra:
            raise FieldError(f"potential term {k} depends on variables {sorted(extra)} besides x{k}")
    # pad query range so finite differencing near the box edge stays inside
    pad = 10 * fd_step
    axes = [
        _AxisSolution(v_list[k], k + 1, x0[k], f0[k], box[k][0] - pad, box[k][1] + pad, step, blowup)
        for k in range(n)
    ]

    def fn(p):
        return Multivector(n, {1 << k: axes[k](p[k]) for k in range(n)})

    v_total = v_list[0].root
    for v in v_list[1:]:
        v_total = BinOp("+", v_total, v.root)
    potential = ExprField.scalar(n, ScalarExpr(v_total, n))
    return RiccatiCandidate(FDField(n, fn, fd_step), potential, "separable")


def _mask_scalar_zero(grid: GridSpec, fields_and_radii):
    for f, radius in fields_and_radii:
        grid = grid.with_exclusion(
            lambda p, _f=f, _r=radius: abs(scalar_of(_f.value(p))) < _r)
    return grid


def check_harmonic(phi: MultivectorField, grid: GridSpec, eps=EPS_EXACT) -> ResidualReport:
    return grid_residual(lambda p: mv_value(mv_laplacian(phi.at(p, 2))), grid, eps=eps,
                         scale_at=lambda p: mv_value(phi.at(p, 0)).norm())


def homogeneous_sum(phi1, phi2, grid: GridSpec, eps=EPS_EXACT,
                    denom_radius=DEFAULT_DENOM_RADIUS):
    """Sum of two homogeneous log-derivative solutions.

    Returns the candidate f = D(phi1)/phi1 + D(phi2)/phi2 with the induced
    potential v = -2 <D(phi1)/phi1, D(phi2)/phi2> and its residual report.
    """
    masked = _mask_scalar_zero(grid, [(phi1, denom_radius), (phi2, denom_radius)])
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        rep = check_harmonic(phi, masked, eps)
        if not rep.passed:
            raise PreconditionError(f"{name} is not harmonic (sup residual {rep.sup_norm:.3g})", rep)
    a = log_derivative(phi1).f
    b = log_derivative(phi2).f

    def v_at(p, order):
        # for 1-vectors, a b + b a is the scalar -2<a, b>
        av, bv = a.at(p, order), b.at(p, order)
        return (av * bv + bv * av).grade(0)

    candidate = RiccatiCandidate(add_fields(a, b), DerivedField(grid.n, v_at), "homogeneous_sum")
    report = riccati_residual(candidate, masked, eps=eps)
    return candidate, report


def euler_shift(h: RiccatiCandidate, phi: MultivectorField, grid: GridSpec, eps=EPS_EXACT,
                denom_radius=DEFAULT_DENOM_RADIUS):
    """Shift a known solution h by the log-derivative of an admissible phi.

    phi must satisfy Lap(phi) + 2 <D(phi), h> = 0; then D(phi)/phi + h solves
    the same equation as h.
    """
    masked = _mask_scalar_zero(grid, [(phi, denom_radius)])
    h_rep = riccati_residual(h, masked, eps=eps)
    if not h_rep.passed:
        raise PreconditionError(f"h does not solve its Riccati equation (sup {h_rep.sup_norm:.3g})", h_rep)

    def phi_eq_at(p):
        ph = phi.at(p, 2)
        hv = h.f.at(p, 0)
        # <D(phi), h> = -[D(phi) h]_0
        inner = -(mv_dirac(ph) * hv).grade(0)
        return mv_value(mv_laplacian(ph) + 2.0 * inner)

    phi_rep = grid_residual(phi_eq_at, masked, eps=eps,
                            scale_at=lambda p: mv_value(phi.at(p, 0)).norm())
    if not phi_rep.passed:
        raise PreconditionError(
            f"phi fails its shift equation (sup residual {phi_rep.sup_norm:.3g})", phi_rep)
    candidate = RiccatiCandidate(add_fields(log_derivative(phi).f, h.f), h.potential, "euler_shift")
    report = riccati_residual(candidate, masked, eps=eps)
    return candidate, report


def _alpha_field(phi1, phi2, K):
    def at(p, order):
        t1 = scalar_of(phi1.at(p, order))
        t2 = scalar_of(phi2.at(p, order))
        return Multivector.scalar(phi1.n, ((t1 - t2).exp()) * K)

    return DerivedField(phi1.n, at)


def euler_combine(phi1, phi2, K, potential: MultivectorField, grid: GridSpec, eps=EPS_EXACT,
                  denom_radius=DEFAULT_DENOM_RADIUS):
    """Blend the gradient solutions D(phi1) and D(phi2) of one equation.

    With alpha = K exp(phi1 - phi2), f = (alpha D(phi1) - D(phi2))/(alpha - 1)
    solves the same equation away from the alpha = 1 locus, which is masked.
    """
    g = RiccatiCandidate(dirac_field(phi1), potential, "euler_input")
    h = RiccatiCandidate(dirac_field(phi2), potential, "euler_input")
    alpha = _alpha_field(phi1, phi2, complex(K))
    masked = grid.with_exclusion(
        lambda p: abs(scalar_of(alpha.value(p)) - 1.0) < denom_radius)
    for name, cand in (("D(phi1)", g), ("D(phi2)", h)):
        rep = riccati_residual(cand, masked, eps=eps)
        if not rep.passed:
            raise PreconditionError(f"{name} does not solve the target equation (sup {rep.sup_norm:.3g})", rep)

    def f_at(p, order):
        a = scalar_of(alpha.at(p, order))
        inv = _inv_scalar(a - 1.0)
        num = g.f.at(p, order).map_coeffs(lambda t: a * t) - h.f.at(p, order)
        return num.map_coeffs(lambda t: t * inv)

    candidate = RiccatiCandidate(DerivedField(grid.n, f_at), potential, "euler_combine")
    report = riccati_residual(candidate, masked, eps=eps)
    return candidate, report


@dataclass
class FamilyGapResult:
    base_report: ResidualReport
    distances: dict
    margin: float
    passed: bool
    extra: dict = dc_field(default_factory=dict)


def combination_family_gap(n: int, grid: GridSpec, K_samples, margin=0.1, eps=EPS_EXACT,
                           denom_radius=DEFAULT_DENOM_RADIUS) -> FamilyGapResult:
    """Show the two-solution blend family misses a known constant solution.

    For v = -1 the constant fields e_1 and e_2 are gradient solutions; their
    blend family (over the sampled K values) keeps a sup-norm distance of at
    least `margin` from the equally valid solution e_3.
    """
    if n < 3:
        raise FieldError("the gap demonstration needs dimension >= 3")
    minus_one = ExprField.scalar(n, constant_expr(-1.0, n))
    e3 = RiccatiCandidate(ConstantField(Multivector.basis(n, 3)), minus_one, "constant")
    base_report = riccati_residual(e3, grid, eps=eps)
    phi1 = ExprField.scalar(n, "x1")
    phi2 = ExprField.scalar(n, "x2")
    target = Multivector.basis(n, 3)
    distances = {}
    for K in K_samples:
        candidate, _ = euler_combine(phi1, phi2, K, minus_one, grid, eps=eps,
                                     denom_radius=denom_radius)
        masked = grid.with_exclusion(
            lambda p, _a=_alpha_field(phi1, phi2, complex(K)): abs(scalar_of(_a.value(p)) - 1.0) < denom_radius)
        sup = 0.0
        for p in masked.points():
            sup = max(sup, (candidate.f.value(p) - target).norm())
        distances[complex(K)] = sup
    min_gap = min(distances.values())
    passed = base_report.passed and min_gap >= margin
    return FamilyGapResult(base_report, distances, margin, passed, {"min_distance": min_gap})
