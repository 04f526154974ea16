"""
Aggregated second-order report of a candidate.
"""

from dataclasses import dataclass, field
from typing import Any

from .necessary import PointwiseReport
from .sufficient import GrowthReport, SufficientFit


@dataclass
class SocReport:
    """
    Second-order findings over the singular members of a family.

    Attributes:
        eta_soc: Threshold on Q and on pointwise values.
        members: Per singular member: label, Q and the variation cross-check.
        non_singular: Labels of family members outside the singular sets.
        pointwise: Pointwise test over the singular sets.
        fit: Sufficient-condition fit, when run.
        growth: Quadratic-growth check, when run.
        trace: (lhs, rhs, gap) of the trace identity on the worst member.
    """

    eta_soc: float
    members: list[dict[str, Any]] = field(default_factory=list)
    non_singular: list[str] = field(default_factory=list)
    pointwise: PointwiseReport | None = None
    fit: SufficientFit | None = None
    growth: GrowthReport | None = None
    trace: tuple[float, float, float] | None = None

    @property
    def Q(self) -> float:  # noqa: N802
        """Largest Q over the singular members (0 when there are none)."""
        return max((row["Q"] for row in self.members), default=0.0)

    @property
    def worst(self) -> str | None:
        if not self.members:
            return None
        return max(self.members, key=lambda row: row["Q"])["label"]

    @property
    def verdict(self) -> str:
        return "violated" if self.Q > self.eta_soc else "pass"

    @property
    def pointwise_verdict(self) -> str:
        if self.pointwise is None or self.pointwise.passed:
            return "pass"
        return "violated"

    @property
    def beta_hat(self) -> float | None:
        return self.fit.beta_hat if self.fit is not None else None

    @property
    def growth_failures(self) -> list[str]:
        return list(self.growth.failures) if self.growth is not None else []

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "eta_soc": self.eta_soc,
            "Q": self.Q,
            "worst_member": self.worst,
            "verdict": self.verdict,
            "singular_members": [dict(row) for row in self.members],
            "non_singular_members": list(self.non_singular),
            "pointwise": self.pointwise.to_dict() if self.pointwise is not None else None,
            "sufficient": self.fit.to_dict() if self.fit is not None else None,
            "growth": self.growth.to_dict() if self.growth is not None else None,
        }
        if self.trace is not None:
            lhs, rhs, gap = self.trace
            out["trace_identity"] = {"lhs": lhs, "rhs": rhs, "gap": gap}
        return out
