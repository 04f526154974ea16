"""
Second-order necessary conditions for singular controls.

Q(u) = -int_0^T dt int_0^t <F(t, u(t)), G(s, u(s))> ds must be non-positive
for every singular u when the candidate is optimal, and the pointwise form
D(t, v) = <W (f(u_bar) - f(v)) + H_x(u_bar) - H_x(v), f(u_bar) - f(v)> must be
non-positive for every v in the singular set. The sign of Q is fixed so that
(J(sigma^alpha) - J(u_bar)) / alpha^2 tends to -Q(u).
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import IntegrityError
from ..ode.grid import GridFunction
from ..ode.quadrature import quad_intervals, separable_tri_integral
from ..pmp.hamiltonian import OracleReport, quotient_rows
from ..pmp.singular import SingularSet, is_singular
from ..problems.models import PiecewiseControl
from ..trajectories.adjoint import hessian_of_hamiltonian
from ..trajectories.variational import solve_variational
from ..utils.logging_config import get_logger
from .kernels import SocKernelContext, kernel_series

logger = get_logger(__name__)

TRACE_GAP_LIMIT = 1e-5
MAX_LISTED = 200


def necessary_Q(ctx: SocKernelContext, u: PiecewiseControl) -> float:  # noqa: N802
    """
    The double integral Q(u); Q <= 0 is necessary for optimality.

    The inner integral is the trapezoid rule over nodes, the outer one goes
    through quad.

    Args:
        ctx: Kernel context of the candidate.
        u: Probe control.

    Returns:
        float: Q(u), zero when u equals the candidate.
    """
    if u.same_as(ctx.candidate.control):
        return 0.0
    outer, inner = kernel_series(ctx, u.node_indices())
    q = -separable_tri_integral(outer, inner, ctx.grid)
    logger.debug(f"Q = {q:.6g} for probe on {ctx.problem.name}")
    return q


def necessary_Q_via_variation(ctx: SocKernelContext, u: PiecewiseControl) -> float:  # noqa: N802
    """
    Single-integral form Q(u) = int <W (f(u) - f(u_bar)) + H_x(u) - H_x(u_bar), X> dt.

    X is the first variation in the direction of u; the integral uses
    interval-wise Simpson on stage values.
    """
    cand = ctx.candidate
    if u.same_as(cand.control):
        return 0.0
    X = solve_variational(cand, u)  # noqa: N806
    base, probe = cand.stages, cand.probe_stages(u)
    psi, w = cand.psi, cand.W
    assert X.midpoints is not None and psi.midpoints is not None and w.midpoints is not None

    def integrand(e_bar: Any, e_u: Any, p: Any, wm: Any, x: Any) -> float:
        hx_bar = e_bar.jacobian.T @ p - e_bar.grad0
        hx_u = e_u.jacobian.T @ p - e_u.grad0
        return float((wm @ (e_u.f - e_bar.f) + hx_u - hx_bar) @ x)

    n = ctx.grid.intervals
    left = np.array(
        [integrand(base.evals[k][0], probe.evals[k][0], psi.values[k], w.values[k], X.values[k]) for k in range(n)]
    )
    mid = np.array(
        [
            integrand(base.evals[k][1], probe.evals[k][1], psi.midpoints[k], w.midpoints[k], X.midpoints[k])
            for k in range(n)
        ]
    )
    right = np.array(
        [
            integrand(base.evals[k][2], probe.evals[k][2], psi.values[k + 1], w.values[k + 1], X.values[k + 1])
            for k in range(n)
        ]
    )
    return quad_intervals(left, mid, right, ctx.grid)


@dataclass
class PointwiseReport:
    """
    Pointwise second-order test over the singular sets.

    Attributes:
        eta_soc: Threshold on D.
        violations: (node, t, domain index, D) for every D above threshold.
        violation_measure: Total length of nodes with at least one violation.
        checked_pairs: Number of (node, v) pairs evaluated.
    """

    eta_soc: float
    violations: list[tuple[int, float, int, float]] = field(default_factory=list)
    violation_measure: float = 0.0
    checked_pairs: int = 0

    @property
    def passed(self) -> bool:
        return self.violation_measure == 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "eta_soc": self.eta_soc,
            "checked_pairs": self.checked_pairs,
            "violation_count": len(self.violations),
            "violation_measure": self.violation_measure,
            "violations": [
                {"node": k, "t": t, "v": v, "value": d} for k, t, v, d in self.violations[:MAX_LISTED]
            ],
            "verdict": "pass" if self.passed else "violated",
        }


def pointwise_value(ctx: SocKernelContext, k: int, v: int) -> float:
    """D(t_k, v) = <W (f(u_bar) - f(v)) + H_x(u_bar) - H_x(v), f(u_bar) - f(v)>."""
    df, dhx = ctx.increments(k, v)
    return float((ctx.candidate.W.values[k] @ df + dhx) @ df)


def pointwise_test(ctx: SocKernelContext, singular: SingularSet, eta_soc: float) -> PointwiseReport:
    """
    Evaluate D(t, v) for every node t and every v in the singular set at t.

    Args:
        ctx: Kernel context.
        singular: Singular sets of the candidate.
        eta_soc: Values above this threshold are violations.

    Returns:
        PointwiseReport: PASS iff the violating nodes carry zero length.
    """
    report = PointwiseReport(eta_soc=eta_soc)
    nodes = ctx.grid.nodes
    weights = ctx.grid.node_weights()
    ks, vs = np.nonzero(singular.mask)
    ctx.ensure(ks, vs)
    violating = np.zeros(nodes.shape[0], dtype=bool)
    for k, v in zip(ks, vs, strict=True):
        value = pointwise_value(ctx, int(k), int(v))
        if value > eta_soc:
            report.violations.append((int(k), float(nodes[k]), int(v), value))
            violating[k] = True
    report.checked_pairs = int(ks.shape[0])
    report.violation_measure = float(weights[violating].sum())
    logger.info(
        f"pointwise test on {ctx.problem.name}: {len(report.violations)} violations, "
        f"measure {report.violation_measure:.4g}"
    )
    return report


def trace_identity_check(
    ctx: SocKernelContext, u: PiecewiseControl, X: GridFunction | None = None  # noqa: N803
) -> tuple[float, float, float]:
    """
    Compare -1/2 int <H_xx X, X> dt with int <W (f(u_bar) - f(u)), X> dt.

    Args:
        ctx: Kernel context.
        u: Probe control.
        X: First variation for u, solved when omitted.

    Returns:
        tuple: (lhs, rhs, relative gap).

    Raises:
        IntegrityError: If the relative gap exceeds 1e-5.
    """
    cand = ctx.candidate
    if u.same_as(cand.control):
        return 0.0, 0.0, 0.0
    X = X if X is not None else solve_variational(cand, u)  # noqa: N806
    base, probe = cand.stages, cand.probe_stages(u)
    psi, w = cand.psi, cand.W
    assert X.midpoints is not None and psi.midpoints is not None and w.midpoints is not None
    n = ctx.grid.intervals

    def stage_values(stage: int) -> tuple[np.ndarray, np.ndarray]:
        lhs = np.empty(n)
        rhs = np.empty(n)
        for k in range(n):
            if stage == 1:
                p, wm, x = psi.midpoints[k], w.midpoints[k], X.midpoints[k]
            else:
                node = k + stage // 2
                p, wm, x = psi.values[node], w.values[node], X.values[node]
            e_bar = base.evals[k][stage]
            lhs[k] = -0.5 * float(x @ hessian_of_hamiltonian(e_bar, p) @ x)
            rhs[k] = float((wm @ (e_bar.f - probe.evals[k][stage].f)) @ x)
        return lhs, rhs

    (l_left, r_left), (l_mid, r_mid), (l_right, r_right) = (stage_values(s) for s in range(3))
    lhs = quad_intervals(l_left, l_mid, l_right, ctx.grid)
    rhs = quad_intervals(r_left, r_mid, r_right, ctx.grid)
    scale = max(abs(lhs), abs(rhs))
    gap = abs(lhs - rhs) / scale if scale > 1e-12 else 0.0
    if gap > TRACE_GAP_LIMIT:
        logger.error(f"trace identity gap {gap:.3e} on {ctx.problem.name} (lhs {lhs:.8g}, rhs {rhs:.8g})")
        raise IntegrityError(f"trace identity gap {gap:.3e} exceeds {TRACE_GAP_LIMIT:g}")
    return lhs, rhs, gap


def second_quotient_oracle(
    ctx: SocKernelContext,
    u: PiecewiseControl,
    alpha_list: Sequence[float],
    singular: SingularSet | None = None,
) -> OracleReport:
    """
    Compare (J(sigma^alpha) - J(u_bar)) / alpha^2 with -Q(u).

    Args:
        ctx: Kernel context.
        u: Probe control, expected to be singular.
        alpha_list: Decreasing mixture weights in (0, 1].
        singular: Singular sets used to warn about non-singular probes.

    Returns:
        OracleReport: Quotients, errors against -Q and error ratios.
    """
    if singular is not None and not is_singular(singular, u)[0]:
        logger.warning("second quotient oracle called with a non-singular probe; the limit may not exist")
    report = quotient_rows(ctx.candidate, u, alpha_list, power=2, target=-necessary_Q(ctx, u))
    logger.info(f"second quotient oracle on {ctx.problem.name}: errors {report.errors()}")
    return report

