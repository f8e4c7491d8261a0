"""Raw Euler-Maruyama and Heun step kernels.

Both kernels are pure: inputs are never mutated, and identical arguments give
identical outputs.  ``g`` may be zero for deterministic (ODE) use.
"""

from __future__ import annotations

import math

import numpy as np

from .drift import DriftField
from .errors import NumericOverflowError
from .state import SystemState, check_same_shape


def _at_step(step_index) -> str:
    return "" if step_index is None else f" at step {step_index}"


def _advance(state: SystemState, drift: SystemState, g: float, dt: float,
             noise: SystemState) -> SystemState:
    amp = g * math.sqrt(dt)
    node = state.node_part + drift.node_part * dt + amp * noise.node_part
    if state.edge_part is None:
        return SystemState(node)
    edge = state.edge_part + drift.edge_part * dt + amp * noise.edge_part
    return SystemState(node, edge)


def euler_step(state: SystemState, drift: SystemState, g: float, dt: float,
               noise: SystemState, *, step_index: int | None = None) -> SystemState:
    """One Euler-Maruyama update: state + drift*dt + g*sqrt(dt)*noise.

    Parameters
    ----------
    state, drift, noise : SystemState
        Current sample, its drift, and a state-shaped standard-normal draw.
    g : float
        Diffusion coefficient for this step.
    dt : float
        Step size, > 0.
    step_index : int, optional
        Used only to name the step in overflow errors.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    check_same_shape(state, drift, "euler_step drift")
    check_same_shape(state, noise, "euler_step noise")
    out = _advance(state, drift, g, dt, noise)
    if not out.all_finite():
        raise NumericOverflowError(f"euler update produced non-finite values{_at_step(step_index)}")
    return out


def heun_step(state: SystemState, field: DriftField, g: float, dt: float, t: float,
              noise: SystemState, *, first_drift: SystemState | None = None,
              step_index: int | None = None) -> tuple[SystemState, SystemState]:
    """One stochastic Heun update; returns ``(new_state, first_drift)``.

    Evaluates the drift at ``(state, t)``, forms the Euler predictor, re-evaluates
    at ``(predictor, t + dt)``, and corrects with the averaged drift.  The same
    noise draw enters predictor and corrector.  Exactly two drift evaluations
    per component per step; passing a precomputed ``first_drift`` (as the
    adaptive sampler does, reusing the evaluation that fed the controller)
    skips the first one so the total stays two.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    check_same_shape(state, noise, "heun_step noise")
    if first_drift is None:
        first_drift = field.eval(state, t)
    else:
        check_same_shape(state, first_drift, "heun_step first_drift")
    predictor = _advance(state, first_drift, g, dt, noise)
    if not predictor.all_finite():
        raise NumericOverflowError(f"heun predictor produced non-finite values{_at_step(step_index)}")
    second_drift = field.eval(predictor, t + dt)
    avg_node = 0.5 * (first_drift.node_part + second_drift.node_part)
    if state.edge_part is None:
        avg = SystemState(avg_node)
    else:
        avg = SystemState(avg_node, 0.5 * (first_drift.edge_part + second_drift.edge_part))
    out = _advance(state, avg, g, dt, noise)
    if not out.all_finite():
        raise NumericOverflowError(f"heun update produced non-finite values{_at_step(step_index)}")
    return out, first_drift
