"""Fixed-step integration and quadrature on a shared uniform grid."""

from .grid import GridFunction, TimeGrid
from .integrate import integrate, rk4_step
from .quadrature import (
    QuadResult,
    cumulative_quad_intervals,
    quad,
    quad_intervals,
    separable_tri_integral,
    tri_double_integral,
)

__all__ = [
    "GridFunction",
    "QuadResult",
    "TimeGrid",
    "cumulative_quad_intervals",
    "integrate",
    "quad",
    "quad_intervals",
    "rk4_step",
    "separable_tri_integral",
    "tri_double_integral",
]
