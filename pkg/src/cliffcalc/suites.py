"""Seeded random inputs and the randomized identity suite.

Shared by the CLI `verify-identities` command and the test suite: all
generation is driven by one random.Random instance, so a fixed seed gives
byte-identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import Multivector, conjugate, dot_and_wedge, linear_combine
from .darboux import kvector_closed_form, minus_op, plus_op
from .expr import parse
from .fields import (
    ExprField,
    FDField,
    kvector_leibniz_residual,
    mv_value,
    scalar_leibniz_residual,
)
from .kernel import PseudoscalarMode, apply_A, apply_B, default_mode, operator_field


def random_point(rng: random.Random, n, lo=-1.0, hi=1.0):
    return tuple(rng.uniform(lo, hi) for _ in range(n))


def random_multivector(rng: random.Random, n, max_terms=5, grades=None) -> Multivector:
    masks = [m for m in range(1 << n) if grades is None or m.bit_count() in grades]
    count = rng.randint(1, min(max_terms, len(masks)))
    chosen = rng.sample(masks, count)
    return Multivector(n, {m: complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for m in chosen})


def random_expr_str(rng: random.Random, n, transcendental=True) -> str:
    """Small smooth expression, bounded on [-1, 1]^n."""

    def coeff():
        return f"{rng.uniform(0.1, 1.2):.3f}"

    def var():
        return f"x{rng.randint(1, n)}"

    pool = [
        lambda: coeff(),
        lambda: f"{coeff()}*{var()}",
        lambda: f"{coeff()}*{var()}*{var()}",
        lambda: f"{coeff()}*{var()}^2",
    ]
    if transcendental:
        pool += [
            lambda: f"exp({coeff()}*{var()})",
            lambda: f"sin({coeff()}*{var()})",
            lambda: f"cos({coeff()}*{var()})",
        ]
    terms = [rng.choice(pool)() for _ in range(rng.randint(2, 3))]
    out = terms[0]
    for t in terms[1:]:
        out += f" {rng.choice('+-')} {t}"
    return out


def random_scalar_field(rng, n, transcendental=True) -> ExprField:
    return ExprField.scalar(n, random_expr_str(rng, n, transcendental))


def random_mv_field(rng, n, grades=None, max_blades=3, transcendental=True) -> ExprField:
    masks = [m for m in range(1 << n) if grades is None or m.bit_count() in grades]
    chosen = rng.sample(masks, rng.randint(1, min(max_blades, len(masks))))
    return ExprField(n, {m: random_expr_str(rng, n, transcendental) for m in chosen})


def random_kvector_field(rng, n, k, max_blades=3, transcendental=True) -> ExprField:
    return random_mv_field(rng, n, grades={k}, max_blades=max_blades, transcendental=transcendental)


@dataclass
class SuiteEntry:
    name: str
    worst: float
    tolerance: float
    samples: int

    @property
    def passed(self):
        return self.worst <= self.tolerance


def _algebra_entries(rng, n, rounds):
    anti = assoc = invol = grades = vector_sq = split = 0.0
    for _ in range(rounds):
        a = random_multivector(rng, n)
        b = random_multivector(rng, n)
        c = random_multivector(rng, n)
        scale = 1.0 + a.norm() * b.norm() * c.norm()
        assoc = max(assoc, ((a * b) * c - a * (b * c)).norm() / scale)
        invol = max(invol, (conjugate(a * b) - conjugate(b) * conjugate(a)).norm() / (1.0 + a.norm() * b.norm()))
        total = linear_combine([1.0] * (n + 1), [a.grade(k) for k in range(n + 1)])
        grades = max(grades, (total - a).norm())
        for j in range(1, n + 1):
            ej = Multivector.basis(n, j)
            anti = max(anti, (ej * ej + Multivector.scalar(n, 1.0)).norm())
            for k in range(j + 1, n + 1):
                ek = Multivector.basis(n, k)
                anti = max(anti, (ej * ek + ek * ej).norm())
        x = random_multivector(rng, n, grades={1})
        y = random_multivector(rng, n, grades={1})
        sq = x * x
        norm2 = sum(abs(v) ** 2 for v in x.terms.values())
        vector_sq = max(vector_sq, (sq + Multivector.scalar(n, sum(v * v for v in x.terms.values()))).norm() / (1 + norm2))
        dot, wedge = dot_and_wedge(x, y)
        split = max(split, (x * y - Multivector.scalar(n, dot) - wedge).norm())
    return [
        SuiteEntry("algebra/anticommutation", anti, 1e-12, rounds),
        SuiteEntry("algebra/associativity", assoc, 1e-12, rounds),
        SuiteEntry("algebra/anti_involution", invol, 1e-12, rounds),
        SuiteEntry("algebra/grade_completeness", grades, 1e-12, rounds),
        SuiteEntry("algebra/vector_square_scalar", vector_sq, 1e-12, rounds),
        SuiteEntry("algebra/product_split", split, 1e-12, rounds),
    ]


def _leibniz_entries(rng, n, rounds, points_per_round=3):
    worst_scalar = 0.0
    worst_k = {k: 0.0 for k in range(n + 1)}
    for _ in range(rounds):
        phi = random_scalar_field(rng, n)
        f = random_mv_field(rng, n)
        for _ in range(points_per_round):
            p = random_point(rng, n)
            worst_scalar = max(worst_scalar, scalar_leibniz_residual(phi, f, p).norm())
        for k in range(n + 1):
            gk = random_kvector_field(rng, n, k)
            for _ in range(points_per_round):
                p = random_point(rng, n)
                worst_k[k] = max(worst_k[k], kvector_leibniz_residual(gk, f, k, p).norm())
    out = [SuiteEntry("leibniz/scalar", worst_scalar, 1e-9, rounds * points_per_round)]
    for k in range(n + 1):
        out.append(SuiteEntry(f"leibniz/kvector_k{k}", worst_k[k], 1e-9, rounds * points_per_round))
    return out


def _closed_form_entries(rng, n, rounds, points_per_round=2):
    worst = {name: 0.0 for name in ("plus_minus", "minus_plus", "minus_plus_scalar")}
    for _ in range(rounds):
        f = random_mv_field(rng, n, grades={1})
        for k in range(n + 1):
            gk = random_kvector_field(rng, n, k)
            for _ in range(points_per_round):
                p = random_point(rng, n)
                for which in ("plus_minus", "minus_plus"):
                    closed, direct = kvector_closed_form(f, gk, k, which, p)
                    scale = 1.0 + direct.norm()
                    worst[which] = max(worst[which], (closed - direct).norm() / scale)
        phi = random_scalar_field(rng, n)
        for _ in range(points_per_round):
            p = random_point(rng, n)
            closed, direct = kvector_closed_form(f, phi, 0, "minus_plus_scalar", p)
            worst["minus_plus_scalar"] = max(
                worst["minus_plus_scalar"], (closed - direct).norm() / (1.0 + direct.norm()))
    return [SuiteEntry(f"closed_form/{name}", w, 1e-10, rounds) for name, w in worst.items()]


def _operator_entries(rng, n, rounds):
    """Pointwise identities for the unit-element conjugated operators."""
    mode = default_mode(n)
    ie = mode.element
    restrict = None if mode.kind == "full_pseudoscalar" else set(range(1, n))
    worst_forms = worst_square = worst_conj = worst_unit = 0.0
    for _ in range(rounds):
        if restrict is None:
            f = random_mv_field(rng, n, grades={1})
        else:
            masks = [1 << (j - 1) for j in restrict]
            chosen = rng.sample(masks, rng.randint(1, min(3, len(masks))))
            f = ExprField(n, {m: random_expr_str(rng, n) for m in chosen})
        g = random_mv_field(rng, n)
        p = random_point(rng, n)
        a_of_g = apply_A(f, mode, g, p)
        # the two factorized forms of A agree
        other = mv_value(plus_op(f).field(_right_unit_field(g, ie)).at(p, 0))
        worst_forms = max(worst_forms, (a_of_g - other).norm() / (1.0 + a_of_g.norm()))
        # A^2 equals the plus-minus composition
        a_sq = mv_value(operator_field(f, mode, operator_field(f, mode, g, "A"), "A").at(p, 0))
        comp = mv_value(plus_op(f).field(minus_op(f).field(g)).at(p, 0))
        worst_square = max(worst_square, (a_sq - comp).norm() / (1.0 + comp.norm()))
        # conjugation by the unit flips the factor sign
        conj = mv_value(_right_unit_field(minus_op(f).field(_right_unit_field(g, ie)), ie).at(p, 0))
        plus = mv_value(plus_op(f).field(g).at(p, 0))
        worst_conj = max(worst_conj, (conj - plus).norm() / (1.0 + plus.norm()))
        # right multiplication by iE is an involution
        gv = g.value(p)
        worst_unit = max(worst_unit, ((gv * ie) * ie - gv).norm() / (1.0 + gv.norm()))
        b_sq = mv_value(operator_field(f, mode, operator_field(f, mode, g, "B"), "B").at(p, 0))
        b_comp = mv_value(minus_op(f).field(plus_op(f).field(g)).at(p, 0))
        worst_square = max(worst_square, (b_sq - b_comp).norm() / (1.0 + b_comp.norm()))
    return [
        SuiteEntry("operator/two_factorized_forms", worst_forms, 1e-10, rounds),
        SuiteEntry("operator/square_matches_composition", worst_square, 1e-10, rounds),
        SuiteEntry("operator/unit_conjugation_flips_sign", worst_conj, 1e-10, rounds),
        SuiteEntry("operator/unit_involution", worst_unit, 1e-12, rounds),
    ]


def _right_unit_field(g, ie):
    from .fields import right_const_mul_field

    return right_const_mul_field(g, ie)


def identity_suite(n: int, seed: int, rounds: int = 25):
    """Run every randomized identity family; returns a list of SuiteEntry."""
    rng = random.Random(seed)
    entries = []
    entries += _algebra_entries(rng, n, rounds)
    entries += _leibniz_entries(rng, n, max(2, rounds // 5))
    entries += _closed_form_entries(rng, n, max(2, rounds // 5))
    entries += _operator_entries(rng, n, max(2, rounds // 5))
    return entries
