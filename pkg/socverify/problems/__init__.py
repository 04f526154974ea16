"""
Problem definitions for socverify.

This package holds the control domain and problem models, the registry of
built-in example problems, and the derivative and regularity checks run on
user-supplied problem data.
"""

from .library import BUILTIN_NAMES, builtin_problem, riccati_candidate
from .models import (
    ControlDomain,
    DynamicsEval,
    PiecewiseControl,
    Problem,
    RelaxedMixture,
    blend,
    check_metric_axioms,
    domain_distance,
    eval_stack,
)
from .validation import (
    ModulusChoice,
    RegularityReport,
    ValidationReport,
    audit_regularity,
    default_samples,
    resolve_modulus,
    validate_derivatives,
)

__all__ = [
    "BUILTIN_NAMES",
    "ControlDomain",
    "DynamicsEval",
    "ModulusChoice",
    "PiecewiseControl",
    "Problem",
    "RegularityReport",
    "RelaxedMixture",
    "ValidationReport",
    "audit_regularity",
    "blend",
    "builtin_problem",
    "check_metric_axioms",
    "default_samples",
    "domain_distance",
    "eval_stack",
    "resolve_modulus",
    "riccati_candidate",
    "validate_derivatives",
]
