"""Trajectory runner: integrates a toy problem under any stepping schedule.

One drift evaluation per step drives both the controller and the Euler
update; with Heun, the first of the two evaluations plays that role.  Every
step is logged with its variation scores and line-element contributions, so
fixed and adaptive runs are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import (
    ControllerState,
    controller_step,
    drift_variation_score,
    max_adaptive_steps,
)
from .errors import ConfigError, NumericOverflowError, RunawayLoopError
from .geometry import LineElementSample, drift_line_element, noise_line_element
from .grids import SOLVER_KINDS, ScheduleSpec
from .rng import RandomStream
from .state import SystemState
from .stepping import euler_step, heun_step
from .toys import ToyProblem


@dataclass(frozen=True)
class TrajectoryRecord:
    """One accepted step: timing, controller readouts, and geometry terms.

    ``t`` is the time reached by step ``k``; ``v_x``/``v_a`` are the
    per-component variation scores (zero on the first step and for missing
    edges); ``vbar_x``/``vbar_a`` are the controller memories after the step
    (zero for non-adaptive runs); ``ds2_drift``/``ds2_noise`` are the step's
    line-element contributions over all components; ``nfe_cum`` counts drift
    component evaluations so far.
    """

    k: int
    t: float
    dt: float
    v_x: float
    v_a: float
    vbar_x: float
    vbar_a: float
    ds2_drift: float
    ds2_noise: float
    nfe_cum: int
    state_norm: float


def line_element_samples(records) -> list[LineElementSample]:
    """View trajectory records as line-element samples for arc-length analysis."""
    return [
        LineElementSample(t=r.t, ds2_drift=r.ds2_drift, ds2_noise=r.ds2_noise, dt=r.dt)
        for r in records
    ]


def _delta_drift(curr: SystemState, prev: SystemState | None) -> np.ndarray | None:
    if prev is None:
        return None
    return curr.as_vector() - prev.as_vector()


def run_sampler(problem: ToyProblem, spec: ScheduleSpec, solver: str,
                stream: RandomStream) -> tuple[SystemState, list[TrajectoryRecord]]:
    """Integrate ``problem`` from t=0 to its horizon; returns (final state, records).

    ``solver`` is ``"euler"`` or ``"heun"``.  For the adaptive schedule the
    step sizes come from the controller, fed by the same drift evaluation the
    update uses (drift caching), and the loop stops within the controller's
    boundary tolerance of T.  Non-finite states abort with the offending step
    index; an adaptive loop that cannot reach the horizon within its step
    budget raises ``RunawayLoopError``.
    """
    if solver not in SOLVER_KINDS:
        raise ConfigError(f"unknown solver {solver!r}; expected one of {SOLVER_KINDS}")

    field = problem.field.fresh()
    schedule = problem.schedule
    T = problem.T
    state = problem.init_sampler(stream)
    if not state.all_finite():
        raise NumericOverflowError("initial state contains non-finite values")

    records: list[TrajectoryRecord] = []
    prev_first_drift: SystemState | None = None

    def log_step(k, t_prev, dt, g_prev, first_drift, new_state, v_x, v_a,
                 vbar_x, vbar_a):
        df = _delta_drift(first_drift, prev_first_drift)
        ds2_d = 0.0 if df is None else drift_line_element(df, g_prev, dt)
        dg = schedule.g(t_prev + dt) - g_prev
        ds2_n = noise_line_element(dg, g_prev, state.total_dim)
        records.append(TrajectoryRecord(
            k=k, t=t_prev + dt, dt=dt, v_x=v_x, v_a=v_a, vbar_x=vbar_x,
            vbar_a=vbar_a, ds2_drift=ds2_d, ds2_noise=ds2_n,
            nfe_cum=field.eval_count, state_norm=new_state.norm(),
        ))

    if spec.kind in ("fixed", "quadratic"):
        times = spec.grid(T)
        for k in range(1, len(times)):
            t_prev = float(times[k - 1])
            dt = float(times[k] - times[k - 1])
            g = schedule.g(t_prev)
            noise = problem.noise_sampler(stream)
            if solver == "euler":
                first_drift = field.eval(state, t_prev)
                new_state = euler_step(state, first_drift, g, dt, noise, step_index=k)
            else:
                new_state, first_drift = heun_step(
                    state, field, g, dt, t_prev, noise, step_index=k
                )
            v_x = v_a = 0.0
            if prev_first_drift is not None:
                v_x = drift_variation_score(
                    first_drift.node_part, prev_first_drift.node_part, g
                )
                if first_drift.edge_part is not None:
                    v_a = drift_variation_score(
                        first_drift.edge_part, prev_first_drift.edge_part, g
                    )
            log_step(k, t_prev, dt, g, first_drift, new_state, v_x, v_a, 0.0, 0.0)
            prev_first_drift = first_drift
            state = new_state
        return state, records

    cfg = spec.controller
    ctrl = ControllerState()
    budget = max_adaptive_steps(cfg, T)
    t = 0.0
    k = 1
    while t < T - cfg.eps_bound:
        if k > budget:
            raise RunawayLoopError(
                f"adaptive run did not reach T={T} within {budget} steps (t={t})"
            )
        g = schedule.g(t)
        first_drift = field.eval(state, t)
        dt, ctrl, diag = controller_step(
            ctrl, cfg, first_drift.node_part, first_drift.edge_part, g, t, T
        )
        noise = problem.noise_sampler(stream)
        if solver == "euler":
            new_state = euler_step(state, first_drift, g, dt, noise, step_index=k)
        else:
            new_state, _ = heun_step(
                state, field, g, dt, t, noise, first_drift=first_drift, step_index=k
            )
        log_step(k, t, dt, g, first_drift, new_state, diag.v_x, diag.v_a,
                 ctrl.vbar_x, ctrl.vbar_a)
        prev_first_drift = first_drift
        state = new_state
        t += dt
        k += 1
    return state, records
