"""
Run configuration of the command-line front end.

Values are layered: built-in defaults, then the TOML file, then command-line
flags. The merged tables are flattened into a validated, frozen RunConfig.
"""

from collections.abc import Mapping
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..utils.config_loader import ConfigLoader, default_config
from ..utils.logging_config import get_logger

logger = get_logger(__name__)

# (table, key) -> RunConfig field
FIELD_MAP: dict[tuple[str, str], str] = {
    ("run", "problem"): "problem_id",
    ("run", "grid_n"): "grid_n",
    ("run", "domain_samples"): "domain_samples",
    ("run", "output_dir"): "output_dir",
    ("run", "suites"): "suites",
    ("run", "probe"): "probe",
    ("tolerances", "eta_pmp"): "eta_pmp",
    ("tolerances", "eta_soc"): "eta_soc",
    ("tolerances", "tol_fd"): "tol_fd",
    ("tolerances", "tol_inv"): "tol_inv",
    ("tolerances", "tol_growth"): "tol_growth",
    ("relaxation", "alpha_list"): "alpha_list",
    ("relaxation", "eps_list"): "eps_list",
    ("relaxation", "chatter_alpha"): "chatter_alpha",
    ("family", "constants"): "family_constants",
    ("family", "switches"): "family_switches",
    ("family", "random"): "family_random",
    ("family", "seed"): "seed",
    ("family", "eps0"): "eps0",
    ("audit", "samples"): "audit_samples",
    ("audit", "seed"): "audit_seed",
}


@dataclass(frozen=True)
class RunConfig:
    """
    Validated settings of one run.

    Attributes:
        problem_id: Built-in problem ("P1", "P2", "P3").
        grid_n: Number of grid intervals, even and at least 10.
        domain_samples: Number of control samples (P3 only).
        output_dir: Root directory of the reports.
        suites: Whether `check` also runs the relaxation suites.
        probe: Domain index of the constant probe control; None picks the last point.
        eta_pmp: Maximum-condition tolerance.
        eta_soc: Threshold on Q and on pointwise values.
        tol_fd: Finite-difference tolerance of the audit.
        tol_inv: Tolerance of the Phi PhiInv = I check.
        tol_growth: Slack of the growth inequality.
        alpha_list: Mixture weights of the quotient suites.
        eps_list: Chattering periods.
        chatter_alpha: Mixture weight of the chattering suite.
        family_constants: Include constant controls in the family.
        family_switches: Number of single-switch controls.
        family_random: Number of seeded random controls.
        seed: Seed of the random family members.
        eps0: Neighbourhood radius of the growth check.
        audit_samples: Samples of the regularity audit.
        audit_seed: Seed of the regularity audit.
    """

    problem_id: str = "P2"
    grid_n: int = 1000
    domain_samples: int = 401
    output_dir: str = "results"
    suites: bool = False
    probe: int | None = None
    eta_pmp: float = 2e-3
    eta_soc: float = 1e-4
    tol_fd: float = 1e-6
    tol_inv: float = 1e-8
    tol_growth: float = 1e-9
    alpha_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    eps_list: tuple[float, ...] = (0.25, 0.125, 0.0625, 0.03125, 0.015625)
    chatter_alpha: float = 0.5
    family_constants: bool = True
    family_switches: int = 20
    family_random: int = 50
    seed: int = 0
    eps0: float = 1.0
    audit_samples: int = 200
    audit_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_list", tuple(float(a) for a in self.alpha_list))
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        if self.grid_n < 10 or self.grid_n % 2:
            raise ConfigError(f"grid_n must be even and at least 10, got {self.grid_n}")
        if self.domain_samples < 2:
            raise ConfigError(f"domain_samples must be at least 2, got {self.domain_samples}")
        for name in ("eta_pmp", "eta_soc", "tol_fd", "tol_inv", "tol_growth", "eps0"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.alpha_list or not self.eps_list:
            raise ConfigError("alpha_list and eps_list must be nonempty")
        if any(not 0.0 < a <= 1.0 for a in self.alpha_list):
            raise ConfigError(f"alpha_list entries must lie in (0, 1], got {self.alpha_list}")
        if any(e <= 0.0 for e in self.eps_list):
            raise ConfigError("eps_list entries must be positive")
        if not 0.0 <= self.chatter_alpha <= 1.0:
            raise ConfigError(f"chatter_alpha must lie in [0, 1], got {self.chatter_alpha}")
        if self.family_switches < 0 or self.family_random < 0 or self.audit_samples < 2:
            raise ConfigError("family sizes must be non-negative and audit_samples at least 2")
        if self.probe is not None and self.probe < 0:
            raise ConfigError(f"probe index must be non-negative, got {self.probe}")

    @property
    def problem_dir(self) -> Path:
        return Path(self.output_dir) / self.problem_id

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def flatten_tables(tables: Mapping[str, Any]) -> dict[str, Any]:
    """
    Map [table] key = value entries onto RunConfig field names.

    Raises:
        ConfigError: For unknown tables or keys.
    """
    values: dict[str, Any] = {}
    for table, entries in tables.items():
        if not isinstance(entries, Mapping):
            raise ConfigError(f"config entry '{table}' must be a table")
        for key, value in entries.items():
            name = FIELD_MAP.get((table, key))
            if name is None:
                raise ConfigError(f"unknown config key [{table}] {key}")
            values[name] = value
    return values


def load_run_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """
    Merge defaults, an optional TOML file and flag overrides into a RunConfig.

    Args:
        path: TOML run file; a missing file is created with the defaults.
        overrides: RunConfig field values from the command line (None values are ignored).

    Returns:
        RunConfig: The validated configuration.

    Raises:
        ConfigError: For unknown keys, wrong types or invalid values.
    """
    values = flatten_tables(default_config())
    if path is not None:
        values.update(flatten_tables(ConfigLoader(path).load()))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = RunConfig(**values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid run configuration: {e}") from e
    logger.debug(f"run config: {config.to_dict()}")
    return config
