"""Analytic drift fields and ready-made toy problems with known ground truth.

Generative time convention: t=0 is prior noise, t=T is data.  All toys are
built from three drift families: an endpoint-pinning bridge, the exact
reverse drift of a variance-preserving process with Gaussian data, and a
coupled node/edge bridge whose edge component stiffens near the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .drift import DriftField
from .errors import SingularityError, StructuralError
from .noise import NoiseSchedule, make_schedule
from .rng import RandomStream
from .state import SystemState


@dataclass(frozen=True)
class TerminalLaw:
    """Analytic first two moments of the node part at t=T (diagonal covariance)."""

    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "var", np.asarray(self.var, dtype=np.float64).reshape(-1))


@dataclass(frozen=True)
class ToyProblem:
    """A named, fully specified sampling problem.

    ``init_sampler`` draws the t=0 state; ``noise_sampler`` draws one
    state-shaped standard-normal increment (graph toys symmetrize the edge
    block here so adjacency symmetry is preserved).  ``analytic_terminal``,
    when present, describes the node part's law at t=T; ``edge_target`` is
    the reference adjacency for graph metrics.
    """

    name: str
    field: DriftField
    schedule: NoiseSchedule
    T: float
    init_sampler: Callable[[RandomStream], SystemState]
    noise_sampler: Callable[[RandomStream], SystemState]
    analytic_terminal: TerminalLaw | None = None
    edge_target: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Drift families
# ---------------------------------------------------------------------------

def bridge_drift(state: SystemState, t: float, target: SystemState, T: float,
                 eps_bound: float = 1e-6) -> SystemState:
    """Endpoint-pinning drift (target - state) / (T - t), per component.

    Singular at t=T; callers must keep ``T - t >= eps_bound`` (the sampling
    loop's boundary guard does), otherwise ``SingularityError`` is raised.
    """
    remaining = T - t
    if remaining < eps_bound:
        raise SingularityError(
            f"bridge drift evaluated at t={t} within {eps_bound} of the pin time T={T}"
        )
    node = (target.node_part - state.node_part) / remaining
    if state.edge_part is None:
        return SystemState(node)
    if target.edge_part is None:
        raise StructuralError("bridge target lacks the edge part the state carries")
    edge = (target.edge_part - state.edge_part) / remaining
    return SystemState(node, edge)


def vp_marginal_mean(t: float, data_mean: np.ndarray, beta0: float, T: float) -> np.ndarray:
    """Mean of the time-t marginal of the variance-preserving process."""
    return np.asarray(data_mean, dtype=np.float64) * math.exp(-0.5 * beta0 * (T - t))


def vp_marginal_var(t: float, data_var: float, beta0: float, T: float) -> float:
    """Per-dimension variance of the time-t marginal (unit stationary variance)."""
    decay = math.exp(-beta0 * (T - t))
    return data_var * decay + (1.0 - decay)


def vp_gaussian_drift(state: SystemState, t: float, data_mean, data_var: float,
                      beta0: float, T: float = 1.0) -> SystemState:
    """Exact reverse drift of the VP process with Gaussian data.

    f(x, t) = beta0/2 * x + beta0 * (m(t) - x) / s(t), with m(t) and s(t) the
    marginal mean and variance; the second term is beta0 times the score of
    the Gaussian marginal.
    """
    m = vp_marginal_mean(t, data_mean, beta0, T)
    s = vp_marginal_var(t, float(data_var), beta0, T)
    assert s > 0.0, f"marginal variance must be positive, got s({t})={s}"
    x = state.node_part
    return SystemState(0.5 * beta0 * x + beta0 * (m - x) / s)


def coupled_graph_drift(state: SystemState, t: float, stiffness_x: float,
                        stiffness_a: float, targets: SystemState, T: float,
                        sharpen_c: float = 4.0, sharpen_delta: float = 0.05,
                        eps_bound: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Node/edge bridge drifts with divergent stiffness.

    The node part is a plain bridge scaled by ``stiffness_x``; the edge part
    is a bridge scaled by ``stiffness_a`` times a late-time sharpening factor
    ``1 + sharpen_c / (T - t + sharpen_delta)``, so edges crystallize much
    faster than nodes near the horizon.  Returns ``(node_drift, edge_drift)``.
    """
    if state.edge_part is None or targets.edge_part is None:
        raise StructuralError("coupled graph drift needs both node and edge parts")
    base = bridge_drift(state, t, targets, T, eps_bound=eps_bound)
    sharpen = 1.0 + sharpen_c / (T - t + sharpen_delta)
    return stiffness_x * base.node_part, stiffness_a * sharpen * base.edge_part


# ---------------------------------------------------------------------------
# Noise helpers
# ---------------------------------------------------------------------------

def _iid_noise_sampler(node_dim: int, edge_dim: int | None):
    def sample(stream: RandomStream) -> SystemState:
        node = stream.gaussian(node_dim)
        if edge_dim is None:
            return SystemState(node)
        return SystemState(node, stream.gaussian(edge_dim))

    return sample


def symmetric_edge_noise(stream: RandomStream, n_nodes: int) -> np.ndarray:
    """Standard-normal noise on the strict upper triangle, mirrored; zero diagonal.

    Returned flattened to length ``n_nodes**2``, matching the edge-part layout.
    """
    tri = stream.gaussian(n_nodes * (n_nodes - 1) // 2)
    mat = np.zeros((n_nodes, n_nodes))
    mat[np.triu_indices(n_nodes, k=1)] = tri
    return (mat + mat.T).reshape(-1)


# ---------------------------------------------------------------------------
# Problem factories
# ---------------------------------------------------------------------------

def make_vp_problem(name: str = "vp-gaussian", data_mean: float = 1.0,
                    data_var: float = 0.25, beta0: float = 2.0, T: float = 1.0,
                    dim: int = 1) -> ToyProblem:
    """VP toy with Gaussian data: constant schedule g = sqrt(beta0).

    The initial sampler draws from the exact t=0 marginal, so the continuous
    process terminates exactly at N(data_mean, data_var) per dimension.
    """
    mean_vec = np.full(dim, float(data_mean))
    field = DriftField(
        lambda s, t: vp_gaussian_drift(s, t, mean_vec, data_var, beta0, T).node_part,
        name=name,
    )
    m0 = vp_marginal_mean(0.0, mean_vec, beta0, T)
    s0 = vp_marginal_var(0.0, data_var, beta0, T)

    def init(stream: RandomStream) -> SystemState:
        return SystemState(m0 + math.sqrt(s0) * stream.gaussian(dim))

    return ToyProblem(
        name=name,
        field=field,
        schedule=make_schedule("constant", T, g0=math.sqrt(beta0)),
        T=T,
        init_sampler=init,
        noise_sampler=_iid_noise_sampler(dim, None),
        analytic_terminal=TerminalLaw(mean=mean_vec, var=np.full(dim, float(data_var))),
    )


def make_bridge_problem(name: str = "bridge-1d", target: float = 1.0,
                        g0: float = 0.5, T: float = 1.0, dim: int = 1) -> ToyProblem:
    """1-D (or dim-D) endpoint-pinning bridge with constant noise."""
    target_state = SystemState(np.full(dim, float(target)))
    field = DriftField(
        lambda s, t: bridge_drift(s, t, target_state, T).node_part, name=name
    )

    def init(stream: RandomStream) -> SystemState:
        return SystemState(stream.gaussian(dim))

    return ToyProblem(
        name=name,
        field=field,
        schedule=make_schedule("constant", T, g0=g0),
        T=T,
        init_sampler=init,
        noise_sampler=_iid_noise_sampler(dim, None),
        analytic_terminal=TerminalLaw(
            mean=target_state.node_part, var=np.zeros(dim)
        ),
    )


def ring_adjacency(n_nodes: int) -> np.ndarray:
    """0/1 adjacency of the n-cycle."""
    adj = np.zeros((n_nodes, n_nodes))
    for i in range(n_nodes):
        adj[i, (i + 1) % n_nodes] = 1.0
        adj[(i + 1) % n_nodes, i] = 1.0
    return adj


def make_coupled_graph_problem(name: str = "coupled-graph", n_nodes: int = 6,
                               stiffness_x: float = 1.0, stiffness_a: float = 1.0,
                               sharpen_c: float = 0.045, sharpen_delta: float = 0.05,
                               T: float = 1.0) -> ToyProblem:
    """Stiff node/edge toy: nodes bridge to a +/-1 pattern, edges to a ring.

    The edge component's late-time sharpening makes it the step-size
    bottleneck near t=T.  The sharpening saturates at 1 + c/delta, chosen so
    the effective edge rate times the smallest admissible step stays inside
    the Euler stability region even at the horizon.  Edge noise is
    symmetrized, so symmetric states stay symmetric for the whole trajectory.
    """
    node_target = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(n_nodes)])
    adj = ring_adjacency(n_nodes)
    targets = SystemState(node_target, adj.reshape(-1))

    def node_fn(s: SystemState, t: float) -> np.ndarray:
        return coupled_graph_drift(s, t, stiffness_x, stiffness_a, targets, T,
                                   sharpen_c, sharpen_delta)[0]

    def edge_fn(s: SystemState, t: float) -> np.ndarray:
        return coupled_graph_drift(s, t, stiffness_x, stiffness_a, targets, T,
                                   sharpen_c, sharpen_delta)[1]

    def init(stream: RandomStream) -> SystemState:
        return SystemState(
            stream.gaussian(n_nodes), symmetric_edge_noise(stream, n_nodes)
        )

    def noise(stream: RandomStream) -> SystemState:
        return SystemState(
            stream.gaussian(n_nodes), symmetric_edge_noise(stream, n_nodes)
        )

    return ToyProblem(
        name=name,
        field=DriftField(node_fn, edge_fn, name=name),
        schedule=make_schedule("linear", T, g0=1.0, g1=0.3),
        T=T,
        init_sampler=init,
        noise_sampler=noise,
        analytic_terminal=TerminalLaw(mean=node_target, var=np.zeros(n_nodes)),
        edge_target=adj,
    )


def make_ou_linear_problem(name: str = "ou-linear", rate: float = 1.0,
                           g0: float = 1.0, g1: float = 0.2, T: float = 1.0,
                           dim: int = 1) -> ToyProblem:
    """Mean-reverting drift f(x) = -rate*x under a linearly decaying schedule.

    This is the scaling-probe workhorse (state-sensitive drift, nonzero
    schedule derivative).  The terminal law is Gaussian with variance given
    by the variation-of-constants integral, evaluated here by quadrature.
    """
    field = DriftField(lambda s, t: -rate * s.node_part, name=name)
    schedule = make_schedule("linear", T, g0=g0, g1=g1)

    def init(stream: RandomStream) -> SystemState:
        return SystemState(stream.gaussian(dim))

    var_integral, _ = quad(
        lambda s: math.exp(-2.0 * rate * (T - s)) * schedule.g(s) ** 2, 0.0, T
    )
    terminal_var = math.exp(-2.0 * rate * T) + var_integral

    return ToyProblem(
        name=name,
        field=field,
        schedule=schedule,
        T=T,
        init_sampler=init,
        noise_sampler=_iid_noise_sampler(dim, None),
        analytic_terminal=TerminalLaw(
            mean=np.zeros(dim), var=np.full(dim, terminal_var)
        ),
    )


def make_const_drift_problem(name: str = "const-drift", c: float = 0.5,
                             g0: float = 1.0, T: float = 1.0, dim: int = 1) -> ToyProblem:
    """Constant drift f = c: zero drift variation, exact Gaussian terminal law."""
    field = DriftField(lambda s, t: np.full(s.node_dim, c), name=name)

    def init(stream: RandomStream) -> SystemState:
        return SystemState(stream.gaussian(dim))

    return ToyProblem(
        name=name,
        field=field,
        schedule=make_schedule("constant", T, g0=g0),
        T=T,
        init_sampler=init,
        noise_sampler=_iid_noise_sampler(dim, None),
        analytic_terminal=TerminalLaw(
            mean=np.full(dim, c * T), var=np.full(dim, 1.0 + g0 * g0 * T)
        ),
    )


def make_stiff_vp_problem(name: str = "vp-stiff") -> ToyProblem:
    """VP toy tuned for a hard low-noise tail (tiny data variance, fast mixing)."""
    return make_vp_problem(name=name, data_mean=1.0, data_var=0.005, beta0=6.0)


_REGISTRY: dict[str, Callable[[], ToyProblem]] = {
    "vp-gaussian": make_vp_problem,
    "vp-stiff": make_stiff_vp_problem,
    "bridge-1d": make_bridge_problem,
    "coupled-graph": make_coupled_graph_problem,
    "ou-linear": make_ou_linear_problem,
    "const-drift": make_const_drift_problem,
}


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> ToyProblem:
    """Fresh instance of a registered toy (own drift-eval counter)."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown toy problem {name!r}; available: {problem_names()}"
        ) from None
    return factory()
