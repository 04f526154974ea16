"""
Exception hierarchy for socverify.

Every error raised on purpose by the package derives from SocVerifyError so the
CLI can map families of failures onto exit codes.
"""


class SocVerifyError(Exception):
    """Base class for all socverify errors."""


class ConfigError(SocVerifyError):
    """Invalid run configuration, unknown problem id or unwritable output."""


class DomainError(SocVerifyError):
    """Invalid index, incompatible controls or an argument outside its domain."""


class EvaluationError(SocVerifyError):
    """A problem callable returned a non-finite value."""

    def __init__(self, component: str, message: str) -> None:
        super().__init__(f"{component}: {message}")
        self.component = component


class DivergenceError(SocVerifyError):
    """Non-finite state during a Runge-Kutta sweep."""

    def __init__(self, node: int, label: str = "state") -> None:
        super().__init__(f"non-finite {label} at node {node}")
        self.node = node


class QuadratureError(SocVerifyError):
    """Non-finite kernel value in a triangle integral."""

    def __init__(self, t_node: int, s_node: int) -> None:
        super().__init__(f"non-finite kernel value at node pair ({t_node}, {s_node})")
        self.t_node = t_node
        self.s_node = s_node


class ResolutionError(SocVerifyError):
    """The grid cannot represent the requested chattering period."""


class IntegrityError(SocVerifyError):
    """An internal identity (symmetry, trace identity) failed."""


class ConditioningError(IntegrityError):
    """The fundamental matrix and its inverse do not multiply to the identity."""

    def __init__(self, node: int, deviation: float) -> None:
        super().__init__(f"|Phi*PhiInv - I| = {deviation:.3e} at node {node}")
        self.node = node
        self.deviation = deviation


class InconsistencyError(SocVerifyError):
    """Estimates contradict the declared modulus of continuity."""


class DegenerateFamilyError(SocVerifyError):
    """Every member of a control family coincides with the candidate."""
