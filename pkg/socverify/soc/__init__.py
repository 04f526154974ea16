"""
Second-order checks: kernels, necessary conditions and the sufficient-condition fit.
"""

from .kernels import SocKernelContext, kernel_F, kernel_G, kernel_series
from .necessary import (
    PointwiseReport,
    necessary_Q,
    necessary_Q_via_variation,
    pointwise_test,
    pointwise_value,
    second_quotient_oracle,
    trace_identity_check,
)
from .report import SocReport
from .sufficient import (
    FamilyMember,
    FamilySpec,
    GrowthReport,
    SufficientFit,
    control_family,
    farthest_pair,
    growth_check,
    sufficient_fit,
)

__all__ = [
    "FamilyMember",
    "FamilySpec",
    "GrowthReport",
    "PointwiseReport",
    "SocKernelContext",
    "SocReport",
    "SufficientFit",
    "control_family",
    "farthest_pair",
    "growth_check",
    "kernel_F",
    "kernel_G",
    "kernel_series",
    "necessary_Q",
    "necessary_Q_via_variation",
    "pointwise_test",
    "pointwise_value",
    "second_quotient_oracle",
    "sufficient_fit",
    "trace_identity_check",
]
