"""Experiment description and result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigurationError
from .grid import GridFunction
from .schemes import SchemeParams, StepDiagnostics
from .solutions import InitialCondition

__all__ = ["RunConfig", "RunResult"]


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run."""

    domain: tuple[float, float]
    n: int
    scheme: SchemeParams
    initial_condition: InitialCondition
    t_end: float
    snapshot_times: tuple[float, ...] = ()
    compare_exact: bool = False
    strict_ledger: bool = False
    output_dir: str = "out"

    def __post_init__(self) -> None:
        a, b = self.domain
        if not b > a:
            raise ConfigurationError(
                f"domain: requires b > a, got [{a}, {b}]")
        if self.n < 8:
            raise ConfigurationError(f"n: must be at least 8, got {self.n}")
        if self.t_end < 0:
            raise ConfigurationError(
                f"t_end: must be nonnegative, got {self.t_end}")
        times = tuple(float(s) for s in self.snapshot_times)
        if any(s < 0 or s > self.t_end for s in times):
            raise ConfigurationError(
                f"snapshot_times: must lie in [0, t_end], got {times}")
        if tuple(sorted(times)) != times:
            raise ConfigurationError("snapshot_times: must be sorted")
        object.__setattr__(self, "domain", (float(a), float(b)))
        object.__setattr__(self, "snapshot_times", times)

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.n


@dataclass
class RunResult:
    """Snapshots, per-step diagnostics, and the final error of one run."""

    config: RunConfig
    snapshots: dict[float, GridFunction]
    diagnostics: list[StepDiagnostics] = field(default_factory=list)
    final_l2_error: float | None = None
    duration_seconds: float = 0.0
