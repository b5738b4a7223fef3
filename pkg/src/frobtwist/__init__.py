"""Exact arithmetic for twisted point counting over finite fields.

The package is organised around one pipeline:

    fields      finite field contexts F_{p^n}, embeddings, Frobenius
    gaussian    exact Q(i) scalars for densities and character sums
    diffpoly    difference polynomials x@i and endomorphism specs
    diffvar     difference systems, twisted point counts Q_n = q^n q0
    cover       explicit covers, deck actions, substitution classes
    quandle     conjugation structures and central functions on them
    density     Chebotarev densities, trace checks, zeta/L series
    ideals      truncated difference ideals and bounded perfection
    cli         the `frobtwist` command line driver

Everything numeric is exact (integers, Fractions, Gaussian rationals,
finite field elements); floats appear only in convenience summaries.
"""

from .fields import BudgetError, FieldCtx, embedding, make_field
from .gaussian import GaussianRational
from .diffpoly import (
    DifferencePolynomial,
    EndoSpec,
    compose_plain,
    constant,
    evaluate_plain,
    evaluate_twisted,
    identity_endo,
    parse_endo,
    parse_poly,
    substitute_plain,
    to_string,
    variable,
)
from .diffvar import (
    DiffSystem,
    DimensionError,
    count_points,
    count_sequence,
    count_sequence_csv,
    lang_weil_fit,
    points,
)
from .cover import (
    DifferenceCover,
    build_cover,
    component_equity,
    frobenius_substitution,
    histogram_csv,
    inertia_check,
    pushforward_to_base,
    structural_images,
    substitution_histogram,
)
from .quandle import (
    CentralFunction,
    DiffMorphism,
    DiffStructure,
    GroupWithOperators,
    build_structure,
    conjugacy_domains,
    constant_function,
    coset_quandle,
    indicator,
    inner_product,
    is_full,
    is_regular,
    pullback,
    pushforward,
    quandle_fiber_product,
    trivial_structure,
)
from .density import (
    BasicConstructible,
    ConstructibleFunction,
    adjointness_report,
    chebotarev_report,
    constructible_algebra,
    dirichlet_density,
    l_coeffs,
    near_rationality_probe,
    pairing,
    realize,
    realized_pullback,
    trace_check,
    zeta_coeffs,
    zeta_shape_check,
)
from .ideals import (
    TruncatedIdeal,
    groebner_basis,
    groebner_membership,
    nu_string,
    perfect_intersection_check,
    perfect_membership_bounded,
    perfect_point_check,
    power_of,
    shift_closure,
)

__version__ = "0.1.0"

__all__ = [
    "BasicConstructible",
    "BudgetError",
    "CentralFunction",
    "ConstructibleFunction",
    "DiffMorphism",
    "DiffStructure",
    "DiffSystem",
    "DifferenceCover",
    "DifferencePolynomial",
    "DimensionError",
    "EndoSpec",
    "FieldCtx",
    "GaussianRational",
    "GroupWithOperators",
    "TruncatedIdeal",
    "adjointness_report",
    "build_cover",
    "build_structure",
    "chebotarev_report",
    "component_equity",
    "compose_plain",
    "conjugacy_domains",
    "constant",
    "constant_function",
    "constructible_algebra",
    "coset_quandle",
    "count_points",
    "count_sequence",
    "count_sequence_csv",
    "dirichlet_density",
    "embedding",
    "evaluate_plain",
    "evaluate_twisted",
    "frobenius_substitution",
    "groebner_basis",
    "groebner_membership",
    "histogram_csv",
    "identity_endo",
    "indicator",
    "inertia_check",
    "inner_product",
    "is_full",
    "is_regular",
    "l_coeffs",
    "lang_weil_fit",
    "make_field",
    "near_rationality_probe",
    "nu_string",
    "pairing",
    "parse_endo",
    "parse_poly",
    "perfect_intersection_check",
    "perfect_membership_bounded",
    "perfect_point_check",
    "points",
    "power_of",
    "pullback",
    "pushforward",
    "pushforward_to_base",
    "quandle_fiber_product",
    "realize",
    "realized_pullback",
    "shift_closure",
    "structural_images",
    "substitute_plain",
    "substitution_histogram",
    "to_string",
    "trace_check",
    "trivial_structure",
    "variable",
    "zeta_coeffs",
    "zeta_shape_check",
]
