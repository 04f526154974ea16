"""
First and second variations of the state along a mixture direction.

X solves X' = J(u_bar) X + f(u) - f(u_bar) and Y solves
Y' = J(u_bar) Y + (J(u) - J(u_bar)) X + 1/2 [<f^k_xx X, X>]_k, both from zero,
with every coefficient taken on the candidate trajectory.
"""

import numpy as np

from ..ode.grid import GridFunction
from ..ode.integrate import integrate
from ..ode.quadrature import cumulative_quad_intervals
from ..problems.models import FloatArray, PiecewiseControl
from ..utils.logging_config import get_logger
from .adjoint import Candidate

logger = get_logger(__name__)


def solve_variational(candidate: Candidate, u: PiecewiseControl) -> GridFunction:
    """
    First variation X of the state in the direction of u.

    Args:
        candidate: Solved candidate.
        u: Probe control on the same grid and domain.

    Returns:
        GridFunction: X, shape (N + 1, n).
    """
    base = candidate.stages
    probe = candidate.probe_stages(u)

    def field(t: float, x: FloatArray, k: int) -> FloatArray:
        e_bar = base.at(t, k)
        return e_bar.jacobian @ x + (probe.at(t, k).f - e_bar.f)

    return integrate(field, np.zeros(candidate.problem.dim), candidate.grid, label="variation X")


def solve_second_variational(candidate: Candidate, u: PiecewiseControl, X: GridFunction) -> GridFunction:  # noqa: N803
    """
    Second variation Y of the state in the direction of u.

    Args:
        candidate: Solved candidate.
        u: Probe control.
        X: First variation from solve_variational.

    Returns:
        GridFunction: Y, shape (N + 1, n).
    """
    base = candidate.stages
    probe = candidate.probe_stages(u)

    def field(t: float, y: FloatArray, k: int) -> FloatArray:
        e_bar = base.at(t, k)
        x = X.sample(t, k)
        curvature = np.array([x @ m @ x for m in e_bar.hessians[1:]])
        return e_bar.jacobian @ y + (probe.at(t, k).jacobian - e_bar.jacobian) @ x + 0.5 * curvature

    return integrate(field, np.zeros(candidate.problem.dim), candidate.grid, label="variation Y")


def x_via_transition(candidate: Candidate, u: PiecewiseControl) -> GridFunction:
    """
    X(t) = Phi(t) times the running integral of PhiInv(s) (f(s, u) - f(s, u_bar)).

    The running integral uses interval-wise Simpson on the stage values, so the
    result is a node series (no midpoints) to compare with solve_variational.

    Args:
        candidate: Solved candidate.
        u: Probe control.

    Returns:
        GridFunction: The transition representation of X.
    """
    base = candidate.stages
    probe = candidate.probe_stages(u)
    inv = candidate.PhiInv
    assert inv.midpoints is not None
    b_left, b_mid, b_right = base.stage_series(lambda e: e.f)
    p_left, p_mid, p_right = probe.stage_series(lambda e: e.f)
    left = np.einsum("kij,kj->ki", inv.values[:-1], p_left - b_left)
    mid = np.einsum("kij,kj->ki", inv.midpoints, p_mid - b_mid)
    right = np.einsum("kij,kj->ki", inv.values[1:], p_right - b_right)
    running = cumulative_quad_intervals(left, mid, right, candidate.grid)
    values = np.einsum("kij,kj->ki", candidate.Phi.values, running)
    return GridFunction(candidate.grid, values)


def outer_product_residual(candidate: Candidate, u: PiecewiseControl, X: GridFunction) -> float:  # noqa: N803
    """
    Sup-norm gap between the integrated M' = J M + M J^T + df X^T + X df^T and X X^T.

    Args:
        candidate: Solved candidate.
        u: Probe control that produced X.
        X: First variation.

    Returns:
        float: max over nodes of |M - X X^T|.
    """
    base = candidate.stages
    probe = candidate.probe_stages(u)
    n = candidate.problem.dim

    def field(t: float, m: FloatArray, k: int) -> FloatArray:
        e_bar = base.at(t, k)
        x = X.sample(t, k)
        df = probe.at(t, k).f - e_bar.f
        return e_bar.jacobian @ m + m @ e_bar.jacobian.T + np.outer(df, x) + np.outer(x, df)

    m = integrate(field, np.zeros((n, n)), candidate.grid, label="outer product")
    direct = np.einsum("ki,kj->kij", X.values, X.values)
    residual = float(np.max(np.abs(m.values - direct), initial=0.0))
    logger.debug(f"outer product residual {residual:.3e}")
    return residual
