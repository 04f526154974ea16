"""
Kernels of the second-order conditions.

With H_x = J^T psi - grad f0 and every quantity taken on the candidate
trajectory at node t,

    F(t, v) = Phi(t)^T [W(t) (f(u_bar) - f(v)) + H_x(u_bar) - H_x(v)]
    G(t, v) = PhiInv(t) (f(v) - f(u_bar))

The values of f and H_x at (t_k, v) are computed on first use and cached, so
only the node/domain pairs a check actually visits are evaluated.
"""

import threading

import numpy as np
import numpy.typing as npt

from ..problems.models import FloatArray, eval_stack
from ..trajectories.adjoint import Candidate
from ..utils.logging_config import get_logger

logger = get_logger(__name__)


class SocKernelContext:
    """
    Candidate data and cached tables for F and G.

    Attributes:
        candidate: The solved candidate (x_bar, psi_bar, W, Phi, PhiInv, u_bar).
    """

    def __init__(self, candidate: Candidate) -> None:
        self.candidate = candidate
        self.problem = candidate.problem
        self.grid = candidate.grid
        self.domain = candidate.control.domain
        self.base_index = candidate.control.node_indices()
        nodes = self.grid.intervals + 1
        n = self.problem.dim
        self._f = np.zeros((nodes, self.domain.size, n))
        self._hx = np.zeros((nodes, self.domain.size, n))
        self._known = np.zeros((nodes, self.domain.size), dtype=bool)
        self._lock = threading.Lock()
        logger.debug(f"kernel context for {self.problem.name}: {nodes} nodes, |U| = {self.domain.size}")

    def _fill(self, k: int, v: int) -> None:
        t = float(self.grid.nodes[k])
        e = eval_stack(self.problem, t, self.candidate.x.values[k], self.domain.points[v])
        hx = e.jacobian.T @ self.candidate.psi.values[k] - e.grad0
        with self._lock:
            self._f[k, v] = e.f
            self._hx[k, v] = hx
            self._known[k, v] = True

    def ensure(self, ks: npt.ArrayLike, vs: npt.ArrayLike) -> None:
        """Evaluate every missing (node, domain index) pair."""
        ks_arr = np.asarray(ks, dtype=np.int64).reshape(-1)
        vs_arr = np.asarray(vs, dtype=np.int64).reshape(-1)
        missing = ~self._known[ks_arr, vs_arr]
        for k, v in zip(ks_arr[missing], vs_arr[missing], strict=True):
            self._fill(int(k), int(v))

    def f(self, k: int, v: int) -> FloatArray:
        if not self._known[k, v]:
            self._fill(k, v)
        return self._f[k, v]

    def hx(self, k: int, v: int) -> FloatArray:
        if not self._known[k, v]:
            self._fill(k, v)
        return self._hx[k, v]

    def increments(self, k: int, v: int) -> tuple[FloatArray, FloatArray]:
        """(f(u_bar) - f(v), H_x(u_bar) - H_x(v)) at node k."""
        b = int(self.base_index[k])
        return self.f(k, b) - self.f(k, v), self.hx(k, b) - self.hx(k, v)

    def along(self, indices: npt.NDArray[np.int64]) -> tuple[FloatArray, FloatArray]:
        """Stacked increments at every node for a node series of domain indices."""
        nodes = np.arange(self.grid.intervals + 1)
        self.ensure(nodes, indices)
        self.ensure(nodes, self.base_index)
        df = self._f[nodes, self.base_index] - self._f[nodes, indices]
        dhx = self._hx[nodes, self.base_index] - self._hx[nodes, indices]
        return df, dhx


def kernel_F(ctx: SocKernelContext, k: int, v: int) -> FloatArray:  # noqa: N802
    """F(t_k, v) = Phi^T [W (f(u_bar) - f(v)) + H_x(u_bar) - H_x(v)]."""
    df, dhx = ctx.increments(k, v)
    cand = ctx.candidate
    return cand.Phi.values[k].T @ (cand.W.values[k] @ df + dhx)


def kernel_G(ctx: SocKernelContext, k: int, v: int) -> FloatArray:  # noqa: N802
    """G(t_k, v) = PhiInv (f(v) - f(u_bar))."""
    df, _ = ctx.increments(k, v)
    return -(ctx.candidate.PhiInv.values[k] @ df)


def kernel_series(ctx: SocKernelContext, indices: npt.NDArray[np.int64]) -> tuple[FloatArray, FloatArray]:
    """F and G along a control given by its node indices, each of shape (N + 1, n)."""
    df, dhx = ctx.along(indices)
    cand = ctx.candidate
    inner = cand.W.values @ df[:, :, None]
    outer = np.einsum("kji,kj->ki", cand.Phi.values, inner[:, :, 0] + dhx)
    g = -np.einsum("kij,kj->ki", cand.PhiInv.values, df)
    return outer, g
