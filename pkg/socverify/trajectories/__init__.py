"""
Trajectory-level solvers: state, cost, adjoints, fundamental matrix and variations.
"""

from .adjoint import (
    AdjointBundle,
    Candidate,
    analyze_candidate,
    hessian_of_hamiltonian,
    solve_adjoint,
    solve_fundamental,
    solve_second_adjoint,
)
from .stages import StageTable, stage_table
from .state import AprioriReport, TrajectoryBundle, a_priori_check, solve_state
from .variational import (
    outer_product_residual,
    solve_second_variational,
    solve_variational,
    x_via_transition,
)

__all__ = [
    "AdjointBundle",
    "AprioriReport",
    "Candidate",
    "StageTable",
    "TrajectoryBundle",
    "a_priori_check",
    "analyze_candidate",
    "hessian_of_hamiltonian",
    "outer_product_residual",
    "solve_adjoint",
    "solve_fundamental",
    "solve_second_adjoint",
    "solve_second_variational",
    "solve_state",
    "solve_variational",
    "stage_table",
    "x_via_transition",
]
