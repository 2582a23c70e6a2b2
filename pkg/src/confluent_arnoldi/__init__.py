"""Confluent Vandermonde with Arnoldi: stable Hermite fitting and its applications."""

from .arnoldi_core import (
    ArnoldiBasis,
    BreakdownError,
    ConfluentOperator,
    EvalMatrix,
    NodeSet,
    apply_confluent,
    confluent_arnoldi,
    confluent_eval_matrix,
    derivative_recursion_matrix,
    krylov_column,
    monomial_coefficients,
    naive_confluent_matrix,
)
from .fitting import (
    HermiteData,
    PolyModel,
    evaluate,
    fit_hermite,
    fit_hermite_with_values_basis,
    fit_indefinite_integral,
    fit_values_only,
    naive_eval,
    naive_fit,
)

__version__ = "0.1.0"
