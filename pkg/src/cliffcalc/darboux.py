"""Factorized first-order operators D +/- M^f and their composition calculus.

M^f is right multiplication by the field f. The composition of the two
factorized operators acts like a Schroedinger operator on scalar fields and
admits closed forms on homogeneous k-vector fields; applying the opposite
factor maps eigenfunctions of one composition to the other (the Darboux
transform). Pipelines verify both the hypotheses and the conclusions of
these constructions numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Multivector
from .fields import (
    EPS_EXACT,
    DerivedField,
    FieldError,
    GridSpec,
    MultivectorField,
    PreconditionError,
    ResidualReport,
    grid_residual,
    mv_dirac,
    mv_laplacian,
    mv_partial,
    mv_value,
    scalar_of,
)

CLOSED_FORMS = ("plus_minus", "minus_plus", "minus_plus_scalar")


@dataclass(frozen=True)
class SpectralParam:
    lam: complex

    def __post_init__(self):
        if complex(self.lam) == 0:
            raise FieldError("spectral parameter must be nonzero")

    @property
    def squared(self):
        return complex(self.lam) ** 2


def as_lambda(value) -> complex:
    lam = value.lam if isinstance(value, SpectralParam) else complex(value)
    if lam == 0:
        raise FieldError("spectral parameter must be nonzero")
    return lam


@dataclass(frozen=True)
class FactorizedOperator:
    """D + M^f (sign=+1) or D - M^f (sign=-1)."""

    f: MultivectorField
    sign: int

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise FieldError("sign must be +1 or -1")

    def field(self, g: MultivectorField) -> MultivectorField:
        def at(p, order):
            gj = g.at(p, order + 1)
            prod = gj * self.f.at(p, order)
            d = mv_dirac(gj)
            return d + prod if self.sign > 0 else d - prod

        return DerivedField(g.n, at)

    def apply(self, g: MultivectorField, p) -> Multivector:
        return mv_value(self.field(g).at(p, 0))


def plus_op(f):
    return FactorizedOperator(f, +1)


def minus_op(f):
    return FactorizedOperator(f, -1)


@dataclass
class PipelineResult:
    preconditions: dict
    conclusion: ResidualReport
    extras: dict

    @property
    def passed(self):
        return self.conclusion.passed and all(r.passed for r in self.preconditions.values())

    def reports(self):
        out = [(f"precondition:{k}", v) for k, v in self.preconditions.items()]
        out.append(("conclusion", self.conclusion))
        return out


def gen_schrodinger_residual(f, g, lam, grid: GridSpec, tol=None, eps=EPS_EXACT) -> ResidualReport:
    """Residual of (D + M^f)(D - M^f) g = lam^2 g."""
    lam2 = as_lambda(lam) ** 2

    def lhs_at(p):
        gj = g.at(p, 2)
        fj = f.at(p, 1)
        h = mv_dirac(gj) - gj * fj
        return mv_dirac(h) + h * fj, gj

    def residual_at(p):
        lhs, gj = lhs_at(p)
        return mv_value(lhs - lam2 * gj)

    return grid_residual(residual_at, grid, tol=tol, eps=eps,
                         scale_at=lambda p: mv_value(lhs_at(p)[0]).norm())


def darboux_transform(f, g, lam, grid: GridSpec, eps=EPS_EXACT):
    """Map an eigenfunction g of (D+M^f)(D-M^f) to one of the swapped product.

    Returns h = (D - M^f) g together with the report certifying
    (D - M^f)(D + M^f) h = lam^2 h.
    """
    lam = as_lambda(lam)
    pre = gen_schrodinger_residual(f, g, lam, grid, eps=eps)
    if not pre.passed:
        raise PreconditionError(
            f"g is not an eigenfunction of the factorized operator (sup {pre.sup_norm:.3g})", pre)
    h = minus_op(f).field(g)
    lam2 = lam * lam

    def residual_at(p):
        hj = h.at(p, 2)
        fj = f.at(p, 1)
        w = mv_dirac(hj) + hj * fj
        return mv_value(mv_dirac(w) - w * fj - lam2 * hj)

    conclusion = grid_residual(residual_at, grid, eps=eps,
                               scale_at=lambda p: abs(lam2) * mv_value(h.at(p, 0)).norm())
    return h, PipelineResult({"eigenfunction": pre}, conclusion, {})


def _grade_shift_sum(g_mv, f_mv, target):
    """sum_j [e_j G]_target d_j(f)."""
    n = g_mv.n
    acc = Multivector(n)
    for j in range(1, n + 1):
        proj = (Multivector.basis(n, j) * g_mv).grade(target)
        if proj.terms:
            acc = acc + proj * mv_partial(f_mv, j)
    return acc


def kvector_closed_form(f, gk, k: int, which: str, p):
    """Closed form vs direct operator composition on a grade-k field.

    which = "plus_minus":  (D+M^f)(D-M^f) G
          = -Lap G + G((-1)^(k+1) D(f) - f^2) - 2 sum_j [e_j G]_{k-1} d_j(f)
    which = "minus_plus":  (D-M^f)(D+M^f) G
          = -Lap G - G((-1)^(k+1) D(f) + f^2) + 2 sum_j [e_j G]_{k-1} d_j(f)
    which = "minus_plus_scalar" (k = 0 shortcut):
            (D-M^f)(D+M^f) phi = -Lap phi + phi (D(f) - f^2)
    Returns the (closed_form, direct) pair of numeric multivectors at p.
    """
    if which not in CLOSED_FORMS:
        raise FieldError(f"unknown closed form {which!r}")
    g_mv = gk.at(p, 2)
    if not mv_value(g_mv).is_homogeneous(k):
        raise FieldError(f"field is not a pure {k}-vector at {p} (grades {mv_value(g_mv).grades()})")
    f_mv = f.at(p, 1)
    sign = 1.0 if (k + 1) % 2 == 0 else -1.0  # (-1)^(k+1)
    df = mv_dirac(f_mv)
    f2 = f_mv * f_mv
    lap = mv_laplacian(g_mv)
    if which == "plus_minus":
        closed = -lap + g_mv * (sign * df - f2) - 2.0 * _grade_shift_sum(g_mv, f_mv, k - 1)
        inner = mv_dirac(g_mv) - g_mv * f_mv
        direct = mv_dirac(inner) + inner * f_mv
    elif which == "minus_plus":
        closed = -lap - g_mv * (sign * df + f2) + 2.0 * _grade_shift_sum(g_mv, f_mv, k - 1)
        inner = mv_dirac(g_mv) + g_mv * f_mv
        direct = mv_dirac(inner) - inner * f_mv
    else:
        if k != 0:
            raise FieldError("the scalar closed form needs a scalar field")
        closed = -lap + scalar_of(g_mv) * (df - f2)
        inner = mv_dirac(g_mv) + g_mv * f_mv
        direct = mv_dirac(inner) - inner * f_mv
    return mv_value(closed), mv_value(direct)


def _check_scalar_field(field_at, grid, what, eps):
    """Verify a derived quantity is scalar-valued on the grid."""
    rep = grid_residual(lambda p: (lambda m: m - m.grade(0))(field_at(p)), grid, eps=eps,
                        scale_at=lambda p: field_at(p).norm())
    if not rep.passed:
        raise PreconditionError(f"{what} is not scalar-valued (sup {rep.sup_norm:.3g})", rep)
    return rep


def darboux_scalar_pipeline(f_candidate, phi, lam, grid: GridSpec, eps=EPS_EXACT) -> PipelineResult:
    """Scalar eigenfunction -> vector eigen-solution via the minus factor.

    Given f solving D(f)+f^2 = v and phi with (-Lap - v) phi = lam^2 phi,
    the 1-vector h = (D - M^f) phi satisfies
    (-Lap - v) h - 2 sum_j h_j d_j(f) = lam^2 h, the scalar operator acting
    componentwise.
    """
    lam2 = as_lambda(lam) ** 2
    f, v = f_candidate.f, f_candidate.potential
    from .riccati import riccati_residual  # local import to avoid a cycle
    pre_riccati = riccati_residual(f_candidate, grid, eps=eps)

    def schrodinger_at(p):
        ph = phi.at(p, 2)
        return mv_value(-mv_laplacian(ph) - scalar_of(v.at(p, 0)) * ph - lam2 * ph)

    pre_phi = grid_residual(schrodinger_at, grid, eps=eps,
                            scale_at=lambda p: abs(lam2) * mv_value(phi.at(p, 0)).norm())
    for name, rep in (("riccati", pre_riccati), ("schrodinger", pre_phi)):
        if not rep.passed:
            raise PreconditionError(f"{name} precondition failed (sup {rep.sup_norm:.3g})", rep)
    h = minus_op(f).field(phi)
    n = grid.n

    def residual_at(p):
        hj = h.at(p, 2)
        if not mv_value(hj).is_homogeneous(1) and mv_value(hj).terms:
            raise FieldError(f"transformed field is not a 1-vector (grades {mv_value(hj).grades()})")
        fj = f.at(p, 1)
        vval = scalar_of(v.at(p, 0))
        acc = -mv_laplacian(hj) - vval * hj - lam2 * hj
        for j in range(1, n + 1):
            acc = acc - 2.0 * (hj.coeff(1 << (j - 1)) * mv_partial(fj, j))
        return mv_value(acc)

    conclusion = grid_residual(residual_at, grid, eps=eps,
                               scale_at=lambda p: abs(lam2) * mv_value(h.at(p, 0)).norm())
    return PipelineResult({"riccati": pre_riccati, "schrodinger": pre_phi}, conclusion, {})


def darboux_kvector_pipeline(f, gk, k: int, lam, grid: GridSpec, eps=EPS_EXACT) -> PipelineResult:
    """Grade-k eigen-solution -> (k-1, k+1) pair via the minus factor.

    With w = (-1)^(k+1) D(f) - f^2 (checked scalar), a grade-k G solving

        G (-Lap + w) - 2 sum_j [e_j G]_{k-1} d_j(f) = lam^2 G

    yields H = (D - M^f) G whose grade parts H_{k-1}, H_{k+1} satisfy

        (H_{k-1}+H_{k+1})(-Lap + w)
          + 2 sum_j ([e_j H_{k-1}]_{k-2} + [e_j H_{k+1}]_k) d_j(f)
          = lam^2 (H_{k-1}+H_{k+1}).
    """
    lam2 = as_lambda(lam) ** 2
    sign = 1.0 if (k + 1) % 2 == 0 else -1.0
    n = grid.n

    def w_mv(p, order=0):
        fj = f.at(p, order + 1)
        return sign * mv_dirac(fj) - fj * fj

    pre_w = _check_scalar_field(lambda p: mv_value(w_mv(p)), grid, "the derived potential", eps)

    def pre_at(p):
        g = gk.at(p, 2)
        if not mv_value(g).is_homogeneous(k) and mv_value(g).terms:
            raise FieldError(f"input is not a pure {k}-vector (grades {mv_value(g).grades()})")
        fj = f.at(p, 1)
        w = scalar_of(w_mv(p))
        lhs = -mv_laplacian(g) + w * g - 2.0 * _grade_shift_sum(g, fj, k - 1)
        return mv_value(lhs - lam2 * g)

    pre_g = grid_residual(pre_at, grid, eps=eps,
                          scale_at=lambda p: abs(lam2) * mv_value(gk.at(p, 0)).norm())
    if not pre_g.passed:
        raise PreconditionError(f"input field fails its eigen-equation (sup {pre_g.sup_norm:.3g})", pre_g)
    h = minus_op(f).field(gk)

    def residual_at(p):
        hj = h.at(p, 2)
        fj = f.at(p, 1)
        w = scalar_of(w_mv(p))
        lo, hi = hj.grade(k - 1), hj.grade(k + 1)
        total = lo + hi
        acc = -mv_laplacian(total) + w * total - lam2 * total
        acc = acc + 2.0 * (_grade_shift_sum(lo, fj, k - 2) + _grade_shift_sum(hi, fj, k))
        return mv_value(acc)

    conclusion = grid_residual(residual_at, grid, eps=eps,
                               scale_at=lambda p: abs(lam2) * mv_value(h.at(p, 0)).norm())
    return PipelineResult({"scalar_potential": pre_w, "eigen_equation": pre_g}, conclusion, {})


def darboux_vector_pipeline(f, g_vec, lam, grid: GridSpec, eps=EPS_EXACT) -> PipelineResult:
    """1-vector eigen-solution -> scalar + bivector pair; grade-1 case written out.

    u = D(f) - f^2 must be scalar; g solving g(-Lap+u) + 2 sum_j g_j d_j(f)
    = lam^2 g yields phi = [(D-M^f)g]_0 and H2 = [(D-M^f)g]_2 with

        (phi + H2)(-Lap + u) + 2 sum_j [e_j H2]_1 d_j(f) = lam^2 (phi + H2).
    """
    lam2 = as_lambda(lam) ** 2
    n = grid.n

    def u_mv(p):
        fj = f.at(p, 1)
        return mv_dirac(fj) - fj * fj

    pre_u = _check_scalar_field(lambda p: mv_value(u_mv(p)), grid, "the derived potential", eps)

    def pre_at(p):
        g = g_vec.at(p, 2)
        if not mv_value(g).is_homogeneous(1) and mv_value(g).terms:
            raise FieldError(f"input is not a 1-vector (grades {mv_value(g).grades()})")
        fj = f.at(p, 1)
        u = scalar_of(u_mv(p))
        acc = -mv_laplacian(g) + u * g - lam2 * g
        for j in range(1, n + 1):
            acc = acc + 2.0 * (g.coeff(1 << (j - 1)) * mv_partial(fj, j))
        return mv_value(acc)

    pre_g = grid_residual(pre_at, grid, eps=eps,
                          scale_at=lambda p: abs(lam2) * mv_value(g_vec.at(p, 0)).norm())
    if not pre_g.passed:
        raise PreconditionError(f"input field fails its eigen-equation (sup {pre_g.sup_norm:.3g})", pre_g)
    h = minus_op(f).field(g_vec)

    def residual_at(p):
        hj = h.at(p, 2)
        fj = f.at(p, 1)
        u = scalar_of(u_mv(p))
        total = hj.grade(0) + hj.grade(2)
        acc = -mv_laplacian(total) + u * total - lam2 * total
        acc = acc + 2.0 * _grade_shift_sum(hj.grade(2), fj, 1)
        return mv_value(acc)

    conclusion = grid_residual(residual_at, grid, eps=eps,
                               scale_at=lambda p: abs(lam2) * mv_value(h.at(p, 0)).norm())
    return PipelineResult({"scalar_potential": pre_u, "eigen_equation": pre_g}, conclusion, {})
