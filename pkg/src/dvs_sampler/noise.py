"""Diffusion coefficient schedules g(t) with closed-form derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import ConfigError

SCHEDULE_KINDS = ("constant", "linear", "cosine")


@dataclass(frozen=True)
class NoiseSchedule:
    """Diffusion coefficient ``g(t)`` and its time derivative over [0, T].

    ``g`` must stay strictly positive on [0, T] for controller use (the
    factory below enforces this); ``g_dot`` must be the exact derivative.
    ``params`` echoes the construction arguments for run metadata.
    """

    g: Callable[[float], float]
    g_dot: Callable[[float], float]
    kind: str
    params: dict = field(default_factory=dict)


def make_schedule(kind: str, T: float, **params) -> NoiseSchedule:
    """Build one of the supported schedules.

    constant: g(t) = g0
    linear:   g(t) = g0 + (g1 - g0) * t / T
    cosine:   g(t) = g_min + (g_max - g_min) * (1 + cos(pi t / T)) / 2

    Raises ``ConfigError`` for unknown kinds, nonpositive parameters, or
    unexpected parameter names.
    """
    if T <= 0:
        raise ConfigError(f"horizon must be positive, got T={T}")
    if kind == "constant":
        expected = {"g0"}
    elif kind == "linear":
        expected = {"g0", "g1"}
    elif kind == "cosine":
        expected = {"g_min", "g_max"}
    else:
        raise ConfigError(f"unknown schedule kind {kind!r}; expected one of {SCHEDULE_KINDS}")
    if set(params) != expected:
        raise ConfigError(
            f"schedule kind {kind!r} takes parameters {sorted(expected)}, got {sorted(params)}"
        )
    bad = {k: v for k, v in params.items() if v <= 0}
    if bad:
        raise ConfigError(f"schedule parameters must be positive, got {bad}")

    if kind == "constant":
        g0 = float(params["g0"])
        return NoiseSchedule(
            g=lambda t: g0, g_dot=lambda t: 0.0, kind=kind, params={"g0": g0, "T": T}
        )
    if kind == "linear":
        g0, g1 = float(params["g0"]), float(params["g1"])
        slope = (g1 - g0) / T
        return NoiseSchedule(
            g=lambda t: g0 + slope * t,
            g_dot=lambda t: slope,
            kind=kind,
            params={"g0": g0, "g1": g1, "T": T},
        )
    g_min, g_max = float(params["g_min"]), float(params["g_max"])
    amp = g_max - g_min
    return NoiseSchedule(
        g=lambda t: g_min + amp * 0.5 * (1.0 + math.cos(math.pi * t / T)),
        g_dot=lambda t: -amp * 0.5 * (math.pi / T) * math.sin(math.pi * t / T),
        kind=kind,
        params={"g_min": g_min, "g_max": g_max, "T": T},
    )


def derivative_consistency_error(schedule: NoiseSchedule, T: float, n_probe: int = 101) -> float:
    """Worst relative mismatch between ``g_dot`` and a central finite difference.

    Probes an interior grid of ``n_probe`` points; useful as a self-check for
    hand-written schedules.  Points where the derivative is essentially zero
    are compared absolutely against the schedule's scale.
    """
    h = T * 1e-6
    worst = 0.0
    scale = max(abs(schedule.g(i * T / (n_probe - 1))) for i in range(n_probe))
    for i in range(1, n_probe - 1):
        t = i * T / (n_probe - 1)
        fd = (schedule.g(t + h) - schedule.g(t - h)) / (2 * h)
        an = schedule.g_dot(t)
        denom = max(abs(an), scale)
        worst = max(worst, abs(fd - an) / denom)
    return worst
