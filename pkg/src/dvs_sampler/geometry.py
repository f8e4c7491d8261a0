"""Statistical line elements, a Monte-Carlo Fisher-information oracle, and
arc-length diagnostics for sampled trajectories.

Per step, the squared statistical distance between consecutive transition
kernels splits into a drift contribution (dt/g^2)*||df||^2 and a noise
contribution (2*D/g^2)*dg^2; the former equals the drift variation score
times the step size, which is the identity the controller enforces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drift import DriftField
from .errors import DegenerateProbeError, StructuralError
from .noise import NoiseSchedule
from .rng import RandomStream
from .state import SystemState
from .stepping import euler_step


@dataclass(frozen=True)
class LineElementSample:
    """One step's contributions to the squared statistical arc length."""

    t: float
    ds2_drift: float
    ds2_noise: float
    dt: float


def drift_line_element(df: np.ndarray, g: float, dt: float) -> float:
    """Drift contribution (dt / g^2) * ||df||^2 of a step's line element."""
    df = np.asarray(df, dtype=np.float64).reshape(-1)
    return (dt / (g * g)) * float(df @ df)


def noise_line_element(dg: float, g: float, dim: int) -> float:
    """Noise contribution (2 * dim / g^2) * dg^2 of a step's line element."""
    return (2.0 * dim / (g * g)) * dg * dg


def fim_monte_carlo_oracle(g: float, dt: float, dim: int, n_samples: int,
                           stream: RandomStream) -> np.ndarray:
    """Empirical joint Fisher information of the Gaussian transition kernel.

    Samples residuals r ~ N(0, g^2 dt I_dim), forms the joint score vector
    [r / g^2, ||r||^2 / (g^3 dt) - dim / g] with respect to the drift vector
    and the diffusion coefficient, and averages its outer product.  The
    closed forms this estimates are (dt/g^2) I for the drift block, zero for
    the cross block, and 2*dim/g^2 for the diffusion entry.

    Returns the (dim+1) x (dim+1) averaged outer-product matrix.
    """
    if n_samples < 1:
        raise ValueError(f"need n_samples >= 1, got {n_samples}")
    sigma = g * math.sqrt(dt)
    r = stream.gaussian(n_samples * dim).reshape(n_samples, dim) * sigma
    scores = np.empty((n_samples, dim + 1))
    scores[:, :dim] = r / (g * g)
    scores[:, dim] = np.einsum("ij,ij->i", r, r) / (g**3 * dt) - dim / g
    return scores.T @ scores / n_samples


def scaling_ratio_probe(field: DriftField, schedule: NoiseSchedule, state: SystemState,
                        t: float, dt_grid, n_reps: int, stream: RandomStream,
                        ) -> list[tuple[float, float]]:
    """Mean ratio ||f(x', t+dt) - f(x, t)|| / |g(t+dt) - g(t)| per probe step.

    For each dt in ``dt_grid``, simulates ``n_reps`` one-step Euler transitions
    from ``(state, t)`` and averages the drift-change-to-noise-change ratio.
    For state-sensitive drifts the ratio grows like dt^(-1/2); the fitted
    log-log slope is what callers should test.

    Raises ``DegenerateProbeError`` when the schedule does not vary at the
    probe point (the ratio is undefined there).
    """
    if schedule.g_dot(t) == 0.0:
        raise DegenerateProbeError(f"schedule has zero derivative at probe point t={t}")
    g0 = schedule.g(t)
    f0 = field.eval(state, t)
    results = []
    for dt in dt_grid:
        dg = schedule.g(t + dt) - g0
        if dg == 0.0:
            raise DegenerateProbeError(f"schedule does not vary over [{t}, {t + dt}]")
        node_draws = stream.gaussian(n_reps * state.node_dim).reshape(n_reps, -1)
        edge_draws = None
        if state.has_edge:
            edge_draws = stream.gaussian(n_reps * state.edge_dim).reshape(n_reps, -1)
        total = 0.0
        for i in range(n_reps):
            noise = SystemState(
                node_draws[i], None if edge_draws is None else edge_draws[i]
            )
            moved = euler_step(state, f0, g0, dt, noise)
            f1 = field.eval(moved, t + dt)
            df = f1.as_vector() - f0.as_vector()
            total += math.sqrt(float(df @ df)) / abs(dg)
        results.append((float(dt), total / n_reps))
    return results


def fit_loglog_slope(pairs) -> float:
    """Least-squares slope of log(y) against log(x) for (x, y) pairs."""
    xs = np.log([p[0] for p in pairs])
    ys = np.log([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])


@dataclass(frozen=True)
class ArcLengthProfile:
    """Summary statistics of the per-step drift line elements."""

    mean: float
    std: float
    cv: float
    cumulative_arc_length: float
    n_steps: int


def arc_length_profile(samples, drop_tail_fraction: float = 0.0) -> ArcLengthProfile:
    """Mean / std / coefficient of variation of ds2_drift plus total arc length.

    ``drop_tail_fraction`` optionally discards that fraction of trailing steps
    before computing statistics (a presentation choice for end-of-horizon
    spikes; default keeps everything).  The cumulative arc length sums
    sqrt(ds2_drift + ds2_noise) over the retained steps.  Raises
    ``StructuralError`` on empty input.
    """
    samples = list(samples)
    if not samples:
        raise StructuralError("arc_length_profile needs at least one sample")
    if not 0.0 <= drop_tail_fraction < 1.0:
        raise ValueError(f"drop_tail_fraction must be in [0, 1), got {drop_tail_fraction}")
    keep = len(samples) - int(drop_tail_fraction * len(samples))
    keep = max(keep, 1)
    samples = samples[:keep]
    ds2 = np.array([s.ds2_drift for s in samples])
    mean = float(ds2.mean())
    std = float(ds2.std())
    cv = 0.0 if mean == 0.0 else std / mean
    arc = float(np.sum(np.sqrt([s.ds2_drift + s.ds2_noise for s in samples])))
    return ArcLengthProfile(mean=mean, std=std, cv=cv, cumulative_arc_length=arc,
                            n_steps=len(samples))
