"""Clifford algebra calculus with numerically verified operator identities.

The package provides the complexified Clifford algebra with negative
generator squares, exact-jet expression fields on R^n, the Clifford
Riccati equation and its solution constructors, factorized first-order
Schroedinger operators with Darboux-style eigenfunction transport, and
kernel splitting through a commuting pseudoscalar unit.
"""

from .algebra import (
    AlgebraError,
    AlgebraSignature,
    Multivector,
    blade_grade,
    blade_indices,
    blade_mask,
    blade_name,
    conjugate,
    dot_and_wedge,
    geometric_product,
    grade_projection,
    linear_combine,
    parse_blade,
    pseudoscalar,
)
from .taylor import JetDomainError, JetOrderError, Taylor
from .expr import ExprDomainError, ExprError, ExprSyntaxError, ScalarExpr, eval_jet, parse
from .fields import (
    EPS_EXACT,
    EPS_FD,
    FD_STEP,
    ConstantField,
    DerivedField,
    ExprField,
    FDField,
    FieldError,
    GridSpec,
    MultivectorField,
    PreconditionError,
    ResidualReport,
    dirac,
    grid_residual,
    kvector_leibniz_residual,
    laplacian,
    scalar_leibniz_residual,
)
from .riccati import (
    OdeBlowupError,
    RiccatiCandidate,
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
from .darboux import (
    FactorizedOperator,
    PipelineResult,
    SpectralParam,
    darboux_kvector_pipeline,
    darboux_scalar_pipeline,
    darboux_transform,
    darboux_vector_pipeline,
    gen_schrodinger_residual,
    kvector_closed_form,
    minus_op,
    plus_op,
)
from .kernel import (
    DecompositionResult,
    ModeError,
    PseudoscalarMode,
    apply_A,
    apply_B,
    decompose_conjugate_solution,
    decompose_schrodinger_solution,
    default_mode,
    first_order_residual,
    mode_check,
    split_kernel,
    squared_operator_residual,
)
from .suites import identity_suite

__version__ = "0.1.0"
