"""Drift-variation-score (DVS) adaptive step-size controller.

The controller watches how fast the drift field changes between consecutive
solver steps, smooths that signal with an EMA, and maps it through a power
law to a step size.  Two-component (node/edge) systems take the minimum of
the per-component steps; after each step the smoothed memory is re-coupled
through the aggregation gain ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, HorizonViolationError, StructuralError


@dataclass(frozen=True)
class ControllerConfig:
    """Hyperparameters of the adaptive controller.

    Defaults are the common settings used throughout: EMA smoothing 0.2,
    square-root sensitivity, base step 1e-3 bounded to [2e-4, 5e-3].
    ``active_ranges`` lists closed [lo, hi] intervals where adaptation is on;
    an empty tuple means the whole horizon.
    """

    alpha: float = 0.2
    beta: float = 0.5
    kappa_ref: float = 1.0
    gamma: float = 0.2
    dt_base: float = 1e-3
    dt_min: float = 2e-4
    dt_max: float = 5e-3
    active_ranges: tuple[tuple[float, float], ...] = ()
    eps_num: float = 1e-12
    eps_bound: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.kappa_ref <= 0:
            raise ConfigError(f"kappa_ref must be positive, got {self.kappa_ref}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be nonnegative, got {self.gamma}")
        if not 0.0 < self.dt_min <= self.dt_base <= self.dt_max:
            raise ConfigError(
                f"need 0 < dt_min <= dt_base <= dt_max, got "
                f"({self.dt_min}, {self.dt_base}, {self.dt_max})"
            )
        if self.eps_num <= 0:
            raise ConfigError(f"eps_num must be positive, got {self.eps_num}")
        if self.eps_bound <= 0:
            raise ConfigError(f"eps_bound must be positive, got {self.eps_bound}")
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.active_ranges)
        object.__setattr__(self, "active_ranges", ranges)
        for lo, hi in ranges:
            if not 0.0 <= lo <= hi:
                raise ConfigError(f"bad active range [{lo}, {hi}]")
        for (lo1, hi1), (lo2, hi2) in zip(ranges, ranges[1:]):
            if lo2 <= hi1:
                raise ConfigError("active ranges must be sorted and pairwise disjoint")

    def is_active(self, t: float) -> bool:
        """True when the controller may adapt at time ``t``."""
        if not self.active_ranges:
            return True
        return any(lo <= t <= hi for lo, hi in self.active_ranges)


@dataclass(frozen=True)
class ControllerState:
    """Running controller memory: smoothed scores plus cached drifts.

    ``prev_drift_x``/``prev_drift_a`` hold the component drifts from the
    previous step (absent before the first step has been seen).
    """

    vbar_x: float = 0.0
    vbar_a: float = 0.0
    prev_drift_x: np.ndarray | None = None
    prev_drift_a: np.ndarray | None = None
    step_index: int = 1


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step controller readouts surfaced into trajectory records."""

    v_x: float
    v_a: float
    dt_x: float
    dt_a: float


def drift_variation_score(f_curr: np.ndarray, f_prev: np.ndarray, g: float,
                          eps_num: float = 1e-12) -> float:
    """Squared drift change per unit noise power: ||f_curr - f_prev||^2 / g^2.

    The denominator is guarded with ``max(g^2, eps_num)`` so a vanishing
    diffusion coefficient cannot blow up the score.
    """
    f_curr = np.asarray(f_curr, dtype=np.float64)
    f_prev = np.asarray(f_prev, dtype=np.float64)
    if f_curr.shape != f_prev.shape:
        raise StructuralError(
            f"drift shapes differ: {f_curr.shape} vs {f_prev.shape}"
        )
    diff = f_curr - f_prev
    return float(diff @ diff) / max(g * g, eps_num)


def ema_update(vbar: float, v: float, alpha: float) -> float:
    """Exponential moving average: (1 - alpha) * vbar + alpha * v."""
    return (1.0 - alpha) * vbar + alpha * v


def raw_step_size(vbar: float, cfg: ControllerConfig) -> float:
    """Unclipped power-law step: dt_base * (kappa_ref / max(vbar, eps_num))^beta."""
    return cfg.dt_base * (cfg.kappa_ref / max(vbar, cfg.eps_num)) ** cfg.beta


def adaptive_step_size(vbar: float, cfg: ControllerConfig) -> float:
    """Power-law step clipped to [dt_min, dt_max]."""
    return min(max(raw_step_size(vbar, cfg), cfg.dt_min), cfg.dt_max)


def bottleneck(dt_x: float, dt_a: float | None = None) -> float:
    """Limiting component step: min of the two, or dt_x when there is no edge."""
    if dt_a is None:
        return dt_x
    return min(dt_x, dt_a)


def aggregate(vbar_x: float, vbar_a: float, gamma: float,
              single_component: bool = False) -> tuple[float, float]:
    """Post-step feedback: both memories become gamma * (vbar_x + vbar_a).

    Single-component systems keep the edge slot identically zero.
    """
    total = gamma * (vbar_x + vbar_a)
    if single_component:
        return total, 0.0
    return total, total


def controller_step(ctrl: ControllerState, cfg: ControllerConfig, f_x: np.ndarray,
                    f_a: np.ndarray | None, g: float, t: float, T: float,
                    ) -> tuple[float, ControllerState, StepDiagnostics]:
    """Select the next step size and advance the controller memory.

    On the first step, or at times outside every active range, the step is
    ``dt_base`` and the EMA memory is left untouched (frozen), so re-entry
    into an active range resumes from the last adapted values.  Otherwise the
    per-component scores update the EMA, the power law yields per-component
    steps, the bottleneck takes their minimum, and the memory is re-coupled
    with ``gamma``.  The returned step is always clamped to the remaining
    horizon, and the current drifts are cached for the next call.

    Variation scores are computed (and reported in the diagnostics) on every
    step that has cached drifts, including frozen ones; only the EMA/step-size
    machinery is gated by the active ranges.
    """
    if t >= T - cfg.eps_bound:
        raise HorizonViolationError(
            f"controller called at t={t} with horizon T={T} (eps_bound={cfg.eps_bound})"
        )
    single = f_a is None
    first = ctrl.prev_drift_x is None

    v_x = v_a = 0.0
    if not first:
        v_x = drift_variation_score(f_x, ctrl.prev_drift_x, g, cfg.eps_num)
        if not single:
            v_a = drift_variation_score(f_a, ctrl.prev_drift_a, g, cfg.eps_num)

    if first or not cfg.is_active(t):
        dt = cfg.dt_base
        dt_x = dt_a = dt
        vbar_x, vbar_a = ctrl.vbar_x, ctrl.vbar_a
    else:
        vbar_x = ema_update(ctrl.vbar_x, v_x, cfg.alpha)
        vbar_a = ema_update(ctrl.vbar_a, v_a, cfg.alpha) if not single else 0.0
        dt_x = adaptive_step_size(vbar_x, cfg)
        dt_a = adaptive_step_size(vbar_a, cfg) if not single else None
        dt = bottleneck(dt_x, dt_a)
        if dt_a is None:
            dt_a = dt_x
        vbar_x, vbar_a = aggregate(vbar_x, vbar_a, cfg.gamma, single_component=single)

    dt = min(dt, T - t)
    new_ctrl = replace(
        ctrl,
        vbar_x=vbar_x,
        vbar_a=vbar_a,
        prev_drift_x=np.array(f_x, dtype=np.float64, copy=True),
        prev_drift_a=None if single else np.array(f_a, dtype=np.float64, copy=True),
        step_index=ctrl.step_index + 1,
    )
    return dt, new_ctrl, StepDiagnostics(v_x=v_x, v_a=v_a, dt_x=dt_x, dt_a=dt_a)


def max_adaptive_steps(cfg: ControllerConfig, T: float, n_warmup: int = 64) -> int:
    """Runaway guard: generous upper bound on adaptive iterations to reach T."""
    return math.ceil(T / cfg.dt_min) + n_warmup
