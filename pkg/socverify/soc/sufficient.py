"""
Sufficient-condition fit and quadratic-growth verification on control families.

For each family member u the fit compares Q(u) with
R(u) = int omega(rho(u(t), u_bar(t)))^2 dt and reports
beta_hat = min(-Q(u) / R(u)) over members with R > 0. The growth check then
tests J(u) - J(u_bar) >= beta_hat / 2 R(u) on members of the neighbourhood
int omega(rho(u, u_bar)) dt <= eps0. Both are statements about the sampled
family only.
"""

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DegenerateFamilyError, DomainError
from ..ode.grid import TimeGrid
from ..problems.models import ControlDomain, Modulus, PiecewiseControl
from ..relaxation.quotients import theta_series
from ..trajectories.state import solve_state
from ..utils.concurrency import ordered_map
from ..utils.logging_config import get_logger
from .kernels import SocKernelContext
from .necessary import necessary_Q

logger = get_logger(__name__)

NEIGHBOURHOOD_SLACK = 1e-12


@dataclass(frozen=True)
class FamilySpec:
    """
    Which members a control family contains.

    Attributes:
        constants: One constant control per domain point.
        switches: Number of single-switch bang controls.
        random: Number of seeded block-random controls.
        seed: Generator seed of the random members.
        blocks: Number of constant blocks in each random member.
    """

    constants: bool = True
    switches: int = 20
    random: int = 50
    seed: int = 0
    blocks: int = 20

    def __post_init__(self) -> None:
        if self.switches < 0 or self.random < 0 or self.blocks < 1:
            raise DomainError("family sizes must be non-negative and blocks positive")


@dataclass(frozen=True, eq=False)
class FamilyMember:
    """A labelled control with the generator that produced it."""

    label: str
    kind: str
    control: PiecewiseControl


def farthest_pair(domain: ControlDomain) -> tuple[int, int]:
    """Indices of the two farthest domain points (lowest indices on ties)."""
    flat = int(np.argmax(domain.distance))
    i, j = divmod(flat, domain.size)
    return (min(i, j), max(i, j))


def control_family(
    domain: ControlDomain, grid: TimeGrid, spec: FamilySpec, base: PiecewiseControl | None = None
) -> list[FamilyMember]:
    """
    Build a deterministic family of comparison controls.

    Members are, in order: every constant control; single-switch controls
    between the two farthest points, switching at the grid quantiles
    j / (switches + 1) with alternating orientation; and block-random controls
    drawn from numpy's default generator seeded with spec.seed.

    Args:
        domain: Control domain.
        grid: Control grid.
        spec: Family composition.
        base: Candidate; members identical to it are dropped.

    Returns:
        list: The family members.
    """
    n = grid.intervals
    members: list[FamilyMember] = []
    if spec.constants:
        for index, label in enumerate(domain.labels):
            members.append(
                FamilyMember(f"constant[{label}]", "constant", PiecewiseControl.constant(domain, index, n))
            )
    if spec.switches and domain.size > 1:
        a, b = farthest_pair(domain)
        for j in range(1, spec.switches + 1):
            switch = int(round(j * n / (spec.switches + 1)))
            first, second = (a, b) if j % 2 else (b, a)
            values = np.full(n, second, dtype=np.int64)
            values[:switch] = first
            members.append(
                FamilyMember(
                    f"switch[{j}]@{switch * grid.step:.6g}", "switch", PiecewiseControl(domain, values)
                )
            )
    if spec.random:
        rng = np.random.default_rng(spec.seed)
        width = max(1, math.ceil(n / spec.blocks))
        for r in range(spec.random):
            draws = rng.integers(0, domain.size, size=math.ceil(n / width))
            values = np.repeat(draws, width)[:n]
            members.append(FamilyMember(f"random[{r}]", "random", PiecewiseControl(domain, values)))
    if base is not None:
        members = [m for m in members if not m.control.same_as(base)]
    logger.debug(f"control family of {len(members)} members on {n} intervals")
    return members


@dataclass
class SufficientFit:
    """
    Fitted beta over a family.

    Attributes:
        rows: Per member: label, kind, Q, R, ratio -Q/R (None when R = 0).
        beta_hat: Minimum ratio over the whole family.
        beta_hat_constants: Minimum ratio over the constant members, if any.
        violating: Label of the member attaining beta_hat when beta_hat <= 0.
    """

    rows: list[dict[str, Any]] = field(default_factory=list)
    beta_hat: float = math.nan
    beta_hat_constants: float | None = None
    violating: str | None = None

    @property
    def established(self) -> bool:
        return self.beta_hat > 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "beta_hat": self.beta_hat,
            "beta_hat_constants": self.beta_hat_constants,
            "established": self.established,
            "violating": self.violating,
            "members": [dict(row) for row in self.rows],
            "scope": "sampled family only",
        }


def _fit_row(ctx: SocKernelContext, member: FamilyMember, omega: Modulus) -> dict[str, Any]:
    q = necessary_Q(ctx, member.control)
    r = theta_series(ctx.candidate, member.control, omega).integral(2)
    ratio = -q / r if r > 0.0 else None
    return {"label": member.label, "kind": member.kind, "Q": q, "R": r, "ratio": ratio}


def sufficient_fit(
    ctx: SocKernelContext, family: list[FamilyMember], omega: Modulus, workers: int | None = None
) -> SufficientFit:
    """
    Fit beta_hat = min over the family of -Q(u) / R(u).

    Args:
        ctx: Kernel context of the candidate.
        family: Comparison controls.
        omega: Modulus of continuity.
        workers: Pool size (default from the environment).

    Returns:
        SufficientFit: beta_hat and, when it is not positive, the violating member.

    Raises:
        DegenerateFamilyError: If every member has R = 0.
    """
    if not family:
        raise DegenerateFamilyError("control family is empty")
    ctx.ensure(np.arange(ctx.grid.intervals + 1), ctx.base_index)
    rows = ordered_map(lambda m: _fit_row(ctx, m, omega), family, workers)
    scored = [row for row in rows if row["ratio"] is not None]
    if not scored:
        raise DegenerateFamilyError("every family member coincides with the candidate")

    worst = min(scored, key=lambda row: row["ratio"])
    constants = [row["ratio"] for row in scored if row["kind"] == "constant"]
    fit = SufficientFit(
        rows=rows,
        beta_hat=worst["ratio"],
        beta_hat_constants=min(constants) if constants else None,
        violating=None if worst["ratio"] > 0.0 else worst["label"],
    )
    logger.info(
        f"sufficient fit on {ctx.problem.name}: beta_hat {fit.beta_hat:.6g} over {len(scored)} members"
        + (f", violated by {fit.violating}" if fit.violating else "")
    )
    return fit


@dataclass
class GrowthReport:
    """
    Quadratic growth J(u) - J(u_bar) >= beta / 2 R(u) on the neighbourhood members.

    Attributes:
        beta: The beta used.
        eps0: Neighbourhood radius.
        rows: Per checked member: label, gain, bound, within flag.
        skipped: Members outside the neighbourhood.
        failures: Labels of members violating the growth bound.
    """

    beta: float
    eps0: float
    rows: list[dict[str, Any]] = field(default_factory=list)
    skipped: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "beta": self.beta,
            "eps0": self.eps0,
            "checked": len(self.rows),
            "skipped": self.skipped,
            "failures": list(self.failures),
            "members": [dict(row) for row in self.rows],
            "passed": self.passed,
        }


def growth_check(
    ctx: SocKernelContext,
    family: list[FamilyMember],
    beta_hat: float,
    eps0: float,
    omega: Modulus,
    tol_growth: float = 1e-9,
    workers: int | None = None,
) -> GrowthReport:
    """
    Verify quadratic growth of the cost on the family members near the candidate.

    Args:
        ctx: Kernel context.
        family: Comparison controls.
        beta_hat: Positive fitted beta.
        eps0: Neighbourhood radius on int omega(rho(u, u_bar)) dt.
        omega: Modulus of continuity.
        tol_growth: Absolute slack on the growth inequality.
        workers: Pool size (default from the environment).

    Returns:
        GrowthReport: Checked members and failures.
    """
    if not beta_hat > 0.0:
        raise DomainError(f"growth check needs a positive beta, got {beta_hat}")
    cand = ctx.candidate
    report = GrowthReport(beta=beta_hat, eps0=eps0)
    inside: list[tuple[FamilyMember, float]] = []
    for member in family:
        theta = theta_series(cand, member.control, omega)
        if theta.integral(1) <= eps0 + NEIGHBOURHOOD_SLACK:
            inside.append((member, theta.integral(2)))
        else:
            report.skipped += 1

    costs = ordered_map(lambda item: solve_state(cand.problem, item[0].control, cand.grid).j, inside, workers)
    for (member, r), cost in zip(inside, costs, strict=True):
        gain = cost - cand.j
        bound = 0.5 * beta_hat * r
        ok = gain >= bound - tol_growth
        report.rows.append({"label": member.label, "gain": gain, "bound": bound, "ok": ok})
        if not ok:
            report.failures.append(member.label)
    logger.info(
        f"growth check on {ctx.problem.name}: {len(report.rows)} members checked, "
        f"{report.skipped} outside the neighbourhood, {len(report.failures)} failures"
    )
    return report
