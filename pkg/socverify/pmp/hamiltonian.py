"""
Hamiltonian, maximum-condition residuals and the first-order gap.

H(t, x, u, psi) = <f(t, x, u), psi> - f0(t, x, u). The maximum condition asks
the candidate control to maximise H over the domain along (x_bar, psi_bar);
on the grid this is checked at every node against every domain point, with a
tolerance scaled by the size of H at that node.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from ..ode.grid import GridFunction, TimeGrid
from ..ode.quadrature import quad_intervals
from ..problems.models import DomainPoint, FloatArray, PiecewiseControl, Problem, RelaxedMixture
from ..trajectories.adjoint import Candidate
from ..trajectories.stages import StageTable
from ..trajectories.state import solve_state
from ..utils.concurrency import ordered_map
from ..utils.logging_config import get_logger

logger = get_logger(__name__)

ROUNDOFF_CLAMP = -1e-12


def hamiltonian(problem: Problem, t: float, x: FloatArray, u: DomainPoint, psi: FloatArray) -> float:
    """Return <f(t, x, u), psi> - f0(t, x, u)."""
    f = np.asarray(problem.dynamics(t, x, u), dtype=float).reshape(-1)
    return float(f @ np.asarray(psi, dtype=float)) - float(problem.running_cost(t, x, u))


@dataclass(frozen=True, eq=False)
class HamiltonianTable:
    """
    H(t_k, x_bar(t_k), v, psi_bar(t_k)) for every node k and domain point v.

    Attributes:
        grid: Time grid.
        values: Shape (N + 1, M).
        candidate_index: Domain index of the candidate at each node.
    """

    grid: TimeGrid
    values: FloatArray
    candidate_index: npt.NDArray[np.int64]

    @property
    def at_candidate(self) -> FloatArray:
        return self.values[np.arange(self.values.shape[0]), self.candidate_index]

    @property
    def maxima(self) -> FloatArray:
        return self.values.max(axis=1)

    def tolerance(self, eta: float) -> FloatArray:
        """Per-node tolerance eta * max(1, max_v |H|)."""
        return eta * np.maximum(1.0, np.abs(self.values).max(axis=1))


def hamiltonian_table(candidate: Candidate, workers: int | None = None) -> HamiltonianTable:
    """
    Tabulate H on all nodes and domain points along the candidate.

    Args:
        candidate: Solved candidate.
        workers: Pool size for the per-node scans (default from the environment).

    Returns:
        HamiltonianTable: The table.
    """
    problem = candidate.problem
    points = candidate.control.domain.points
    nodes = candidate.grid.nodes
    x, psi = candidate.x.values, candidate.psi.values

    def row(k: int) -> FloatArray:
        t = float(nodes[k])
        return np.array([hamiltonian(problem, t, x[k], v, psi[k]) for v in points])

    values = np.vstack(ordered_map(row, range(candidate.grid.intervals + 1), workers))
    logger.debug(f"tabulated H on {values.shape[0]} nodes x {values.shape[1]} domain points")
    return HamiltonianTable(candidate.grid, values, candidate.control.node_indices())


@dataclass
class PmpReport:
    """
    Maximum-condition residuals of the candidate.

    Attributes:
        residual: r(t_k) = max_v H - H(u_bar(t_k)) at every node.
        tolerance: Per-node tolerance the residual is compared with.
        eta: Base tolerance eta_pmp.
        max_residual: Largest residual.
        violation_measure: Total length carried by nodes with r above tolerance.
    """

    residual: GridFunction
    tolerance: FloatArray
    eta: float
    max_residual: float
    violation_measure: float

    @property
    def passed(self) -> bool:
        return self.violation_measure == 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "eta_pmp": self.eta,
            "max_residual": self.max_residual,
            "violation_measure": self.violation_measure,
            "violating_nodes": [int(k) for k in np.flatnonzero(self.residual.values > self.tolerance)],
            "verdict": "pass" if self.passed else "fail",
        }


def pmp_residual(candidate: Candidate, eta_pmp: float, table: HamiltonianTable | None = None) -> PmpReport:
    """
    Check that the candidate maximises H at every node.

    Args:
        candidate: Solved candidate.
        eta_pmp: Base tolerance, scaled per node by max(1, max_v |H|).
        table: Precomputed Hamiltonian table, built when omitted.

    Returns:
        PmpReport: Residual series and verdict; PASS iff the violation measure is zero.
    """
    table = table if table is not None else hamiltonian_table(candidate)
    residual = np.maximum(table.maxima - table.at_candidate, ROUNDOFF_CLAMP)
    tolerance = table.tolerance(eta_pmp)
    weights = candidate.grid.node_weights()
    measure = float(weights[residual > tolerance].sum())
    report = PmpReport(
        residual=GridFunction(candidate.grid, residual),
        tolerance=tolerance,
        eta=eta_pmp,
        max_residual=float(residual.max()),
        violation_measure=measure,
    )
    logger.info(
        f"maximum condition on {candidate.problem.name}: max residual {report.max_residual:.3e}, "
        f"violation measure {measure:.4g} -> {'pass' if report.passed else 'fail'}"
    )
    return report


def _stage_hamiltonians(stages: StageTable, psi: GridFunction) -> tuple[FloatArray, FloatArray, FloatArray]:
    assert psi.midpoints is not None
    left, mid, right = stages.stage_series(lambda e: np.concatenate(([e.f0], e.f)))
    return (
        np.einsum("ki,ki->k", left[:, 1:], psi.values[:-1]) - left[:, 0],
        np.einsum("ki,ki->k", mid[:, 1:], psi.midpoints) - mid[:, 0],
        np.einsum("ki,ki->k", right[:, 1:], psi.values[1:]) - right[:, 0],
    )


def first_order_gap(candidate: Candidate, u: PiecewiseControl) -> float:
    """
    G1(u) = integral of H(t, x_bar, u_bar, psi_bar) - H(t, x_bar, u, psi_bar).

    Uses interval-wise Simpson on the stage values of both controls.
    """
    if u.same_as(candidate.control):
        return 0.0
    bar = _stage_hamiltonians(candidate.stages, candidate.psi)
    probe = _stage_hamiltonians(candidate.probe_stages(u), candidate.psi)
    return quad_intervals(bar[0] - probe[0], bar[1] - probe[1], bar[2] - probe[2], candidate.grid)


@dataclass
class OracleReport:
    """
    Difference quotients of the cost against their predicted limit.

    Attributes:
        target: Predicted limit of the quotient.
        rows: One dict per alpha with "alpha", "quotient", "error" and "ratio"
            (error of the previous alpha over this one).
    """

    target: float
    rows: list[dict[str, float]] = field(default_factory=list)

    def errors(self) -> list[float]:
        return [row["error"] for row in self.rows]

    def ratios(self) -> list[float]:
        return [row["ratio"] for row in self.rows[1:]]

    def to_dict(self) -> dict[str, Any]:
        return {"target": self.target, "rows": [dict(row) for row in self.rows]}


def quotient_rows(
    candidate: Candidate, u: PiecewiseControl, alpha_list: Sequence[float], power: int, target: float
) -> OracleReport:
    """(J(sigma^alpha) - J(u_bar)) / alpha**power for every alpha, compared with target."""
    report = OracleReport(target=target)
    previous: float | None = None
    for alpha in alpha_list:
        mixed = solve_state(candidate.problem, RelaxedMixture(candidate.control, u, alpha), candidate.grid)
        quotient = (mixed.j - candidate.j) / alpha**power
        error = abs(quotient - target)
        ratio = previous / error if previous is not None and error > 0.0 else float("nan")
        report.rows.append({"alpha": alpha, "quotient": quotient, "error": error, "ratio": ratio})
        previous = error
    return report


def first_quotient_oracle(
    candidate: Candidate, u: PiecewiseControl, alpha_list: Sequence[float]
) -> OracleReport:
    """
    Compare (J(sigma^alpha) - J(u_bar)) / alpha with the first-order gap G1(u).

    Args:
        candidate: Solved candidate.
        u: Probe control.
        alpha_list: Decreasing mixture weights in (0, 1].

    Returns:
        OracleReport: Quotients, errors and error ratios.
    """
    report = quotient_rows(candidate, u, alpha_list, power=1, target=first_order_gap(candidate, u))
    logger.info(f"first quotient oracle on {candidate.problem.name}: errors {report.errors()}")
    return report
