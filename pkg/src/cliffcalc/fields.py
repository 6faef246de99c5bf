"""Multivector-valued fields on R^n and their first-order calculus.

A field answers `at(p, order)` with a Multivector whose coefficients are
Taylor jets of the requested order, so Dirac derivatives, Laplacians and
pointwise products compose freely: each derivative spends one order, and
callers request exactly as many orders as the identity they evaluate needs.

Two derivative providers exist: expression-backed fields (exact jets of any
order) and black-box fields (central finite differences, orders 0..2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .algebra import Multivector, blade_name, parse_blade
from .expr import ScalarExpr, parse
from .taylor import JetOrderError, Taylor

EPS_EXACT = 1e-9
EPS_FD = 1e-4
FD_STEP = 1e-5


class FieldError(ValueError):
    pass


class PreconditionError(ValueError):
    """An input failed the residual check that the construction assumes."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def coeff_value(c) -> complex:
    return c.value if isinstance(c, Taylor) else complex(c)


def mv_value(mv: Multivector) -> Multivector:
    """Numeric multivector from a jet-coefficient multivector."""
    return mv.map_coeffs(coeff_value)


def mv_partial(mv: Multivector, j: int) -> Multivector:
    """Componentwise partial derivative along axis j (1-based)."""
    return mv.map_coeffs(lambda t, _j=j - 1: t.diff(_j))


def mv_dirac(mv: Multivector) -> Multivector:
    """Sum over j of e_j times the j-th partial of the coefficients."""
    acc = Multivector(mv.n)
    for j in range(1, mv.n + 1):
        acc = acc + Multivector.basis(mv.n, j) * mv_partial(mv, j)
    return acc


def mv_laplacian(mv: Multivector) -> Multivector:
    acc = Multivector(mv.n)
    for j in range(1, mv.n + 1):
        acc = acc + mv_partial(mv_partial(mv, j), j)
    return acc


class MultivectorField:
    """Base class: map from points of R^n to multivectors, with jets."""

    n: int

    def at(self, p, order: int = 0) -> Multivector:
        raise NotImplementedError

    def value(self, p) -> Multivector:
        return mv_value(self.at(p, 0))


class ExprField(MultivectorField):
    """Exact-mode field: one scalar expression per blade."""

    def __init__(self, n: int, components):
        self.n = n
        self.components = {}
        for key, src in components.items():
            mask = key if isinstance(key, int) else parse_blade(key)
            e = src if isinstance(src, ScalarExpr) else parse(src, n)
            if e.n != n:
                raise FieldError(f"component {blade_name(mask)} parsed for dimension {e.n}, field has {n}")
            self.components[mask] = e

    @classmethod
    def scalar(cls, n, src):
        return cls(n, {0: src})

    def at(self, p, order=0):
        return Multivector(self.n, {m: e.taylor(p, order) for m, e in self.components.items()})

    def render_components(self):
        return {blade_name(m): e.render() for m, e in sorted(self.components.items())}


class ConstantField(MultivectorField):
    def __init__(self, mv: Multivector):
        self.n = mv.n
        self.mv = mv

    def at(self, p, order=0):
        return self.mv.map_coeffs(lambda c: Taylor.constant(c, self.n, order))


class FDField(MultivectorField):
    """Black-box field differentiated by central differences (orders 0..2)."""

    def __init__(self, n: int, fn, step: float = FD_STEP):
        if step <= 0:
            raise FieldError("finite-difference step must be positive")
        self.n = n
        self.fn = fn
        self.step = step

    def _shift(self, p, j, s):
        q = list(p)
        q[j] += s
        return tuple(q)

    def at(self, p, order=0):
        if order > 2:
            raise JetOrderError("finite-difference fields provide jets up to order 2 only")
        n, h = self.n, self.step
        base = self.fn(tuple(p))
        coefs = {m: {(0,) * n: c} for m, c in mv_value(base).terms.items()}

        def put(alpha, mv, scale):
            for m, c in mv_value(mv).terms.items():
                slot = coefs.setdefault(m, {})
                slot[alpha] = slot.get(alpha, 0j) + c * scale

        if order >= 1:
            plus = [self.fn(self._shift(p, j, h)) for j in range(n)]
            minus = [self.fn(self._shift(p, j, -h)) for j in range(n)]
            for j in range(n):
                alpha = tuple(1 if i == j else 0 for i in range(n))
                put(alpha, plus[j] - minus[j], 1.0 / (2 * h))
            if order >= 2:
                for j in range(n):
                    alpha = tuple(2 if i == j else 0 for i in range(n))
                    # Taylor coefficient is half the second derivative
                    put(alpha, plus[j] + minus[j] - 2 * base, 0.5 / (h * h))
                for j in range(n):
                    for k in range(j + 1, n):
                        pp = self.fn(self._shift(self._shift(p, j, h), k, h))
                        pm = self.fn(self._shift(self._shift(p, j, h), k, -h))
                        mp = self.fn(self._shift(self._shift(p, j, -h), k, h))
                        mm = self.fn(self._shift(self._shift(p, j, -h), k, -h))
                        alpha = tuple((i == j) + (i == k) for i in range(n))
                        put(alpha, pp - pm - mp + mm, 1.0 / (4 * h * h))
        return Multivector(n, {m: Taylor(n, order, cf) for m, cf in coefs.items()})


class DerivedField(MultivectorField):
    """Field defined by a closure over other fields' jets."""

    def __init__(self, n: int, fn):
        self.n = n
        self.fn = fn

    def at(self, p, order=0):
        return self.fn(tuple(p), order)


# -- field combinators ------------------------------------------------------

def add_fields(*fields):
    n = fields[0].n
    return DerivedField(n, lambda p, o: _sum_at(fields, p, o))


def _sum_at(fields, p, o):
    acc = fields[0].at(p, o)
    for f in fields[1:]:
        acc = acc + f.at(p, o)
    return acc


def sub_fields(a, b):
    return DerivedField(a.n, lambda p, o: a.at(p, o) - b.at(p, o))


def scale_field(c, f):
    return DerivedField(f.n, lambda p, o: f.at(p, o) * c)


def mul_fields(a, b):
    return DerivedField(a.n, lambda p, o: a.at(p, o) * b.at(p, o))


def right_const_mul_field(f, mv):
    return DerivedField(f.n, lambda p, o: f.at(p, o) * mv)


def grade_field(f, k):
    return DerivedField(f.n, lambda p, o: f.at(p, o).grade(k))


def dirac_field(f):
    return DerivedField(f.n, lambda p, o: mv_dirac(f.at(p, o + 1)))


def laplacian_field(f):
    return DerivedField(f.n, lambda p, o: mv_laplacian(f.at(p, o + 2)))


def scalar_of(mv: Multivector):
    return mv.coeff(0)


def _inv_scalar(c):
    if isinstance(c, Taylor):
        return c.reciprocal()
    if c == 0:
        raise FieldError("vanishing scalar denominator")
    return 1.0 / c


def div_by_scalar_field(f, s):
    """Pointwise f / s with s a scalar-valued field."""

    def at(p, o):
        inv = _inv_scalar(scalar_of(s.at(p, o)))
        return f.at(p, o).map_coeffs(lambda t: t * inv)

    return DerivedField(f.n, at)


# -- pointwise operations ----------------------------------------------------

def dirac(f: MultivectorField, p) -> Multivector:
    return mv_value(mv_dirac(f.at(p, 1)))


def laplacian(f: MultivectorField, p) -> Multivector:
    return mv_value(mv_laplacian(f.at(p, 2)))


def scalar_leibniz_residual(phi: MultivectorField, f: MultivectorField, p) -> Multivector:
    """D(phi f) - [D(phi) f + phi D(f)] for scalar-valued phi."""
    ph = phi.at(p, 1)
    if not ph.is_homogeneous(0):
        raise FieldError("scalar Leibniz rule needs a scalar-valued first factor")
    fj = f.at(p, 1)
    lhs = mv_dirac(ph * fj)
    rhs = mv_dirac(ph) * fj + scalar_of(ph) * mv_dirac(fj)
    return mv_value(lhs - rhs)


def kvector_leibniz_residual(gk: MultivectorField, f: MultivectorField, k: int, p) -> Multivector:
    """Residual of the graded Leibniz rule for a k-vector first factor:

    D(G f) = D(G) f + 2 sum_j [e_j G]_{k-1} d_j(f) + (-1)^k G D(f)
    """
    g = gk.at(p, 1)
    if not g.is_homogeneous(k):
        raise FieldError(f"first factor is not a pure {k}-vector (grades {g.grades()})")
    fj = f.at(p, 1)
    n = g.n
    lhs = mv_dirac(g * fj)
    rhs = mv_dirac(g) * fj
    for j in range(1, n + 1):
        rhs = rhs + 2.0 * ((Multivector.basis(n, j) * g).grade(k - 1) * mv_partial(fj, j))
    sign = -1.0 if k & 1 else 1.0
    rhs = rhs + sign * (g * mv_dirac(fj))
    return mv_value(lhs - rhs)


# -- grids and residual aggregation ------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    box: tuple
    samples_per_axis: int = 11
    exclusion: object = None  # optional predicate point -> bool (True = skip)

    def __post_init__(self):
        if not self.box:
            raise FieldError("grid box must have at least one axis")
        for lo, hi in self.box:
            if not lo < hi:
                raise FieldError(f"bad axis range [{lo}, {hi}]")
        if self.samples_per_axis < 2:
            raise FieldError("need at least 2 samples per axis")
        if self.samples_per_axis ** len(self.box) > 1_000_000:
            raise FieldError("grid too large (over 1e6 samples)")

    @property
    def n(self):
        return len(self.box)

    def axis_samples(self, axis):
        lo, hi = self.box[axis]
        s = self.samples_per_axis
        return [lo + (hi - lo) * i / (s - 1) for i in range(s)]

    def points(self):
        axes = [self.axis_samples(a) for a in range(self.n)]
        for p in itertools.product(*axes):
            if self.exclusion is not None and self.exclusion(p):
                continue
            yield p

    def with_exclusion(self, pred):
        old = self.exclusion
        combined = pred if old is None else (lambda p: old(p) or pred(p))
        return GridSpec(self.box, self.samples_per_axis, combined)

    @classmethod
    def cube(cls, n, lo=-1.0, hi=1.0, samples_per_axis=11):
        return cls(tuple((lo, hi) for _ in range(n)), samples_per_axis)


@dataclass(frozen=True)
class ResidualReport:
    sup_norm: float
    rms: float
    worst_point: tuple
    samples_used: int
    tolerance: float
    passed: bool

    def to_dict(self):
        return {
            "sup_norm": self.sup_norm,
            "rms": self.rms,
            "worst_point": list(self.worst_point),
            "samples_used": self.samples_used,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def grid_residual(residual_at, grid: GridSpec, tol=None, eps=EPS_EXACT, scale_at=None) -> ResidualReport:
    """Aggregate a pointwise residual over the grid.

    When tol is not given it is derived from the scale of the identity's
    left-hand side: tol = eps * (1 + max |LHS| sampled), which keeps the
    pass criterion invariant under rescaling the inputs.
    """
    sup = 0.0
    sumsq = 0.0
    count = 0
    worst = None
    scale = 0.0
    for p in grid.points():
        r = residual_at(p)
        v = r if isinstance(r, float) else r.norm()
        if v >= sup:
            sup = v
            worst = p
        sumsq += v * v
        count += 1
        if scale_at is not None:
            scale = max(scale, scale_at(p))
    if count == 0:
        raise FieldError("all grid points were excluded")
    tolerance = tol if tol is not None else eps * (1.0 + scale)
    rms = math.sqrt(sumsq / count)
    return ResidualReport(sup, rms, worst, count, tolerance, sup <= tolerance)
