"""
Relaxation tools: chattering controls, difference quotients and their bounds.
"""

from .chattering import (
    ChatterSpec,
    ConvergenceReport,
    chattering,
    chattering_convergence,
    empirical_order,
)
from .quotients import (
    BoundReport,
    ThetaSeries,
    difference_quotient_X,
    difference_quotient_Y,
    quotient_bounds,
    quotient_convergence,
    theta_series,
)

__all__ = [
    "BoundReport",
    "ChatterSpec",
    "ConvergenceReport",
    "ThetaSeries",
    "chattering",
    "chattering_convergence",
    "difference_quotient_X",
    "difference_quotient_Y",
    "empirical_order",
    "quotient_bounds",
    "quotient_convergence",
    "theta_series",
]
