"""
Backward adjoint sweeps and the fundamental matrix of the linearised system.

All equations use the plain Jacobian J = df/dx:

    psi' = -J^T psi + grad f0,                    psi(T) = 0
    W'   = -(J^T W + W J + H_xx),                 W(T)   = 0
    Phi' = J Phi,        PhiInv' = -PhiInv J,     Phi(0) = PhiInv(0) = I

with H_xx = sum_i psi_i f^i_xx - f0_xx. Coefficients are read from a
StageTable built on the candidate trajectory.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConditioningError, DomainError, IntegrityError
from ..ode.grid import GridFunction, TimeGrid
from ..ode.integrate import integrate
from ..problems.models import DynamicsEval, FloatArray, PiecewiseControl, Problem
from ..utils.logging_config import get_logger
from .stages import StageTable, stage_table
from .state import TrajectoryBundle, check_compatible, solve_state

logger = get_logger(__name__)

ASYMMETRY_LIMIT = 1e-8


def hessian_of_hamiltonian(e: DynamicsEval, psi: FloatArray) -> FloatArray:
    """H_xx = sum_i psi_i f^i_xx - f0_xx at one evaluation."""
    h_xx = -e.hessians[0]
    for i, value in enumerate(psi):
        h_xx = h_xx + value * e.hessians[i + 1]
    return h_xx


def solve_adjoint(stages: StageTable) -> GridFunction:
    """
    Backward sweep of psi' = -J^T psi + grad f0 from psi(T) = 0.

    Args:
        stages: Evaluations along the candidate trajectory.

    Returns:
        GridFunction: psi on the grid, shape (N + 1, n).
    """
    n = stages.evals[0][0].f.shape[0]

    def field(t: float, psi: FloatArray, k: int) -> FloatArray:
        e = stages.at(t, k)
        return -e.jacobian.T @ psi + e.grad0

    psi = integrate(field, np.zeros(n), stages.grid, direction="backward", label="adjoint")
    logger.debug(f"adjoint solved, |psi(0)| = {np.linalg.norm(psi.values[0]):.6g}")
    return psi


def solve_second_adjoint(stages: StageTable, psi: GridFunction) -> GridFunction:
    """
    Backward sweep of W' + J^T W + W J + H_xx = 0 from W(T) = 0.

    The result is symmetrised as (W + W^T) / 2; the largest nodewise asymmetry
    before symmetrisation is kept in meta["asymmetry"].

    Args:
        stages: Evaluations along the candidate trajectory.
        psi: Adjoint from solve_adjoint.

    Returns:
        GridFunction: W on the grid, shape (N + 1, n, n).

    Raises:
        IntegrityError: If the asymmetry exceeds 1e-8.
    """
    n = psi.shape[0]

    def field(t: float, w: FloatArray, k: int) -> FloatArray:
        e = stages.at(t, k)
        h_xx = hessian_of_hamiltonian(e, psi.sample(t, k))
        return -(e.jacobian.T @ w + w @ e.jacobian + h_xx)

    raw = integrate(field, np.zeros((n, n)), stages.grid, direction="backward", label="second adjoint")
    asymmetry = float(np.max(np.abs(raw.values - np.swapaxes(raw.values, 1, 2)), initial=0.0))
    if asymmetry > ASYMMETRY_LIMIT:
        logger.error(f"second adjoint asymmetry {asymmetry:.3e} exceeds {ASYMMETRY_LIMIT:g}")
        raise IntegrityError(f"second adjoint asymmetry {asymmetry:.3e} exceeds {ASYMMETRY_LIMIT:g}")
    assert raw.midpoints is not None
    values = 0.5 * (raw.values + np.swapaxes(raw.values, 1, 2))
    mids = 0.5 * (raw.midpoints + np.swapaxes(raw.midpoints, 1, 2))
    logger.debug(f"second adjoint solved, asymmetry {asymmetry:.3e}")
    return GridFunction(raw.grid, values, mids, meta={"asymmetry": asymmetry})


def solve_fundamental(stages: StageTable, tol_inv: float = 1e-8) -> tuple[GridFunction, GridFunction]:
    """
    Forward sweeps of Phi' = J Phi and PhiInv' = -PhiInv J from the identity.

    The inverse is integrated on its own; the product is checked at every node
    and the worst deviation is kept in meta["inverse_deviation"].

    Args:
        stages: Evaluations along the candidate trajectory.
        tol_inv: Largest accepted infinity-norm of Phi PhiInv - I.

    Returns:
        tuple: (Phi, PhiInv), each of shape (N + 1, n, n).

    Raises:
        ConditioningError: At the worst node when the product check fails.
    """
    n = stages.evals[0][0].f.shape[0]
    eye = np.eye(n)

    def phi_field(t: float, phi: FloatArray, k: int) -> FloatArray:
        return stages.at(t, k).jacobian @ phi

    def inv_field(t: float, inv: FloatArray, k: int) -> FloatArray:
        return -inv @ stages.at(t, k).jacobian

    phi = integrate(phi_field, eye, stages.grid, label="fundamental matrix")
    inv = integrate(inv_field, eye, stages.grid, label="inverse fundamental matrix")
    products = np.einsum("kij,kjl->kil", phi.values, inv.values) - eye
    deviations = np.abs(products).sum(axis=2).max(axis=1)
    worst = int(np.argmax(deviations))
    deviation = float(deviations[worst])
    if deviation > tol_inv:
        logger.error(f"Phi*PhiInv deviates from I by {deviation:.3e} at node {worst}")
        raise ConditioningError(worst, deviation)
    logger.debug(f"fundamental matrix solved, inverse deviation {deviation:.3e}")
    meta = {"inverse_deviation": deviation}
    return (
        GridFunction(phi.grid, phi.values, phi.midpoints, meta=meta),
        GridFunction(inv.grid, inv.values, inv.midpoints, meta=meta),
    )


@dataclass(frozen=True, eq=False)
class AdjointBundle:
    """First and second adjoints with the fundamental matrix and its inverse."""

    psi: GridFunction
    W: GridFunction  # noqa: N815
    Phi: GridFunction  # noqa: N815
    PhiInv: GridFunction  # noqa: N815


@dataclass(frozen=True, eq=False)
class Candidate:
    """
    Everything solved once for a candidate control.

    Attributes:
        problem: The control problem.
        control: The candidate control.
        grid: Time grid shared by every series.
        state: Candidate trajectory and cost.
        adjoint: psi, W, Phi and PhiInv.
        stages: Evaluations along the candidate trajectory with the candidate control.
    """

    problem: Problem
    control: PiecewiseControl
    grid: TimeGrid
    state: TrajectoryBundle
    adjoint: AdjointBundle
    stages: StageTable

    @property
    def x(self) -> GridFunction:
        return self.state.x

    @property
    def j(self) -> float:
        return self.state.j

    @property
    def psi(self) -> GridFunction:
        return self.adjoint.psi

    @property
    def W(self) -> GridFunction:  # noqa: N802
        return self.adjoint.W

    @property
    def Phi(self) -> GridFunction:  # noqa: N802
        return self.adjoint.Phi

    @property
    def PhiInv(self) -> GridFunction:  # noqa: N802
        return self.adjoint.PhiInv

    def probe_stages(self, u: PiecewiseControl) -> StageTable:
        """Evaluations along the candidate trajectory with another control."""
        if u.domain is not self.control.domain:
            raise DomainError("probe control uses a different domain")
        check_compatible(u, self.grid)
        if u.same_as(self.control):
            return self.stages
        return stage_table(self.problem, self.x, u)


def analyze_candidate(
    problem: Problem, control: PiecewiseControl, grid: TimeGrid, tol_inv: float = 1e-8
) -> Candidate:
    """
    Solve the state, cost, adjoints and fundamental matrix of a candidate.

    Args:
        problem: The control problem.
        control: Candidate control.
        grid: Time grid.
        tol_inv: Tolerance of the Phi PhiInv = I check.

    Returns:
        Candidate: The bundled solution.
    """
    state = solve_state(problem, control, grid)
    stages = stage_table(problem, state.x, control)
    psi = solve_adjoint(stages)
    w = solve_second_adjoint(stages, psi)
    phi, phi_inv = solve_fundamental(stages, tol_inv)
    logger.info(
        f"analyzed candidate for {problem.name} on N={grid.intervals}: J = {state.j:.8g}, "
        f"W asymmetry {w.meta['asymmetry']:.2e}"
    )
    return Candidate(problem, control, grid, state, AdjointBundle(psi, w, phi, phi_inv), stages)
