"""
Singular sets of the maximum condition.

At each node the singular set holds every domain point whose Hamiltonian is
within tolerance of the maximum; a control is singular when it stays inside
these sets at all but a set of nodes of negligible length.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from ..problems.models import PiecewiseControl
from ..trajectories.adjoint import Candidate
from ..utils.logging_config import get_logger
from ..utils.reports import write_rows_csv
from .hamiltonian import HamiltonianTable, hamiltonian_table

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SingularSet:
    """
    Near-maximisers of the Hamiltonian at every node.

    Attributes:
        mask: Boolean membership, shape (N + 1, M).
        eta: Base tolerance eta_pmp.
        weights: Length carried by each node.
    """

    mask: npt.NDArray[np.bool_]
    eta: float
    weights: npt.NDArray[np.float64]

    def members(self, k: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.mask[k])]

    @property
    def sizes(self) -> npt.NDArray[np.int64]:
        return self.mask.sum(axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "eta_pmp": self.eta,
            "nodes": self.mask.shape[0],
            "domain_size": self.mask.shape[1],
            "members": [self.members(k) for k in range(self.mask.shape[0])],
        }

    def to_csv(self, path: str | Path) -> Path:
        """Write one row per node: node index and space-separated member indices."""
        rows = ([k, " ".join(str(v) for v in self.members(k))] for k in range(self.mask.shape[0]))
        return write_rows_csv(path, ["node", "members"], rows)


def singular_set(
    candidate: Candidate, eta_pmp: float, table: HamiltonianTable | None = None
) -> SingularSet:
    """
    Domain points v with H(t_k, v) >= max H(t_k) - eta_k at every node.

    eta_k = eta_pmp * max(1, max_v |H(t_k, v)|); the argmax is always a member.

    Args:
        candidate: Solved candidate.
        eta_pmp: Base tolerance.
        table: Precomputed Hamiltonian table, built when omitted.

    Returns:
        SingularSet: Membership per node.
    """
    table = table if table is not None else hamiltonian_table(candidate)
    threshold = table.maxima - table.tolerance(eta_pmp)
    mask = table.values >= threshold[:, None]
    result = SingularSet(mask=mask, eta=eta_pmp, weights=candidate.grid.node_weights())
    logger.debug(
        f"singular set sizes on {candidate.problem.name}: min {int(result.sizes.min())}, "
        f"max {int(result.sizes.max())}"
    )
    return result


def is_singular(
    singular: SingularSet, u: PiecewiseControl, eta_meas: float = 0.0
) -> tuple[bool, float]:
    """
    Whether u stays in the singular set at all but nodes of total length <= eta_meas.

    Args:
        singular: Singular set of the candidate.
        u: Control to classify.
        eta_meas: Tolerated length of exceptional nodes.

    Returns:
        tuple: (singular flag, violation measure).
    """
    indices = u.node_indices()
    inside = singular.mask[np.arange(indices.shape[0]), indices]
    measure = float(singular.weights[~inside].sum())
    return measure <= eta_meas, measure
