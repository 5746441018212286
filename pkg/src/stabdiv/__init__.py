"""Exact stable-division experiments for polynomial ideals in the spaces ``H_d^(t)``."""

from .kernels import BACKEND, GaussianRational
from .polyring import (
    Polynomial,
    PolynomialSyntaxError,
    VectorPolynomial,
    WeightedOrder,
    format_poly,
    leading_term,
    parse,
    quasi_components,
    weighted_degree,
)
from .norms import SpaceParams, c_ratio, inner_product, norm_sq, poly_norm_sq
from .division import DivisionResult, divide, divide_vector, stability_ratio, step_constant
from .groebner import (
    GroebnerBasis,
    beurling_form,
    buchberger,
    equalize_degrees,
    ideal_gcd,
    is_member,
    quasi_homogeneous_basis,
    staircase_codimension,
)
from .stability import StabilityReport, certify, certify_vector, row_operator_gap, slice_basis

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GaussianRational",
    "Polynomial",
    "PolynomialSyntaxError",
    "VectorPolynomial",
    "WeightedOrder",
    "format_poly",
    "leading_term",
    "parse",
    "quasi_components",
    "weighted_degree",
    "SpaceParams",
    "c_ratio",
    "inner_product",
    "norm_sq",
    "poly_norm_sq",
    "DivisionResult",
    "divide",
    "divide_vector",
    "stability_ratio",
    "step_constant",
    "GroebnerBasis",
    "beurling_form",
    "buchberger",
    "equalize_degrees",
    "ideal_gcd",
    "is_member",
    "quasi_homogeneous_basis",
    "staircase_codimension",
    "StabilityReport",
    "certify",
    "certify_vector",
    "row_operator_gap",
    "slice_basis",
]
