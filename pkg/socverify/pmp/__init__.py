"""
First-order checks: the maximum condition, singular sets and the first-order gap.
"""

from .hamiltonian import (
    HamiltonianTable,
    OracleReport,
    PmpReport,
    first_order_gap,
    first_quotient_oracle,
    hamiltonian,
    hamiltonian_table,
    pmp_residual,
    quotient_rows,
)
from .singular import SingularSet, is_singular, singular_set

__all__ = [
    "HamiltonianTable",
    "OracleReport",
    "PmpReport",
    "SingularSet",
    "first_order_gap",
    "first_quotient_oracle",
    "hamiltonian",
    "hamiltonian_table",
    "is_singular",
    "pmp_residual",
    "quotient_rows",
    "singular_set",
]
