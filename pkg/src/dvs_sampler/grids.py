"""Time-stepping schedule taxonomy: fixed, quadratic, and adaptive."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import ControllerConfig
from .errors import ConfigError

SCHEDULE_KINDS = ("fixed", "quadratic", "dvs")
SOLVER_KINDS = ("euler", "heun")


def fixed_grid(T: float, n: int) -> np.ndarray:
    """Uniform grid t_k = k*T/n, k = 0..n (exact endpoints)."""
    if n < 1:
        raise ConfigError(f"need n >= 1 steps, got {n}")
    return np.linspace(0.0, T, n + 1)


def quadratic_grid(T: float, n: int) -> np.ndarray:
    """Grid t_k = T*(1 - ((n-k)/n)^2): steps shrink monotonically toward t=T.

    Front-loads large steps in the high-noise regime and refines near the
    data end, the standard heuristic redistribution of a fixed budget.
    """
    if n < 1:
        raise ConfigError(f"need n >= 1 steps, got {n}")
    k = np.arange(n + 1)
    return T * (1.0 - ((n - k) / n) ** 2)


@dataclass(frozen=True)
class ScheduleSpec:
    """Which stepping scheme to run.

    ``fixed`` and ``quadratic`` take ``n_steps``; ``dvs`` takes a controller
    config instead — its step count is an outcome, not a setting, so passing
    ``n_steps`` with ``dvs`` is rejected.
    """

    kind: str
    n_steps: int | None = None
    controller: ControllerConfig | None = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(
                f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}"
            )
        if self.kind == "dvs":
            if self.n_steps is not None:
                raise ConfigError("n_steps is not configurable for the dvs schedule")
            if self.controller is None:
                object.__setattr__(self, "controller", ControllerConfig())
        else:
            if self.controller is not None:
                raise ConfigError(f"{self.kind} schedule takes no controller config")
            if self.n_steps is None or self.n_steps < 1:
                raise ConfigError(f"{self.kind} schedule needs n_steps >= 1, got {self.n_steps}")

    def grid(self, T: float) -> np.ndarray:
        if self.kind == "fixed":
            return fixed_grid(T, self.n_steps)
        if self.kind == "quadratic":
            return quadratic_grid(T, self.n_steps)
        raise ConfigError("the dvs schedule has no predefined grid")
