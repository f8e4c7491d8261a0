"""Information-geometric adaptive step-size control for reverse-time SDE sampling."""

from .controller import (
    ControllerConfig,
    ControllerState,
    StepDiagnostics,
    adaptive_step_size,
    aggregate,
    bottleneck,
    controller_step,
    drift_variation_score,
    ema_update,
    raw_step_size,
)
from .drift import DriftField
from .errors import (
    ConfigError,
    DegenerateProbeError,
    DvsSamplerError,
    HorizonViolationError,
    NumericOverflowError,
    RunawayLoopError,
    SingularityError,
    StructuralError,
)
from .geometry import (
    ArcLengthProfile,
    LineElementSample,
    arc_length_profile,
    drift_line_element,
    fim_monte_carlo_oracle,
    fit_loglog_slope,
    noise_line_element,
    scaling_ratio_probe,
)
from .grids import ScheduleSpec, fixed_grid, quadratic_grid
from .harness import (
    RunConfig,
    SummaryReport,
    probe_scaling,
    run_experiment,
    sweep_experiment,
)
from .metrics import (
    gaussian_w2,
    graph_summary_mmd,
    median_pairwise_bandwidth,
    mmd_rbf,
    threshold_adjacency,
)
from .noise import NoiseSchedule, make_schedule
from .rng import RNG_ALGORITHM, RandomStream, gaussian_draw
from .sampler import TrajectoryRecord, line_element_samples, run_sampler
from .state import SystemState
from .stepping import euler_step, heun_step
from .toys import (
    TerminalLaw,
    ToyProblem,
    bridge_drift,
    coupled_graph_drift,
    get_problem,
    problem_names,
    vp_gaussian_drift,
)
from .verify import verify_fim

__version__ = "0.1.0"

__all__ = [
    "ArcLengthProfile",
    "ConfigError",
    "ControllerConfig",
    "ControllerState",
    "DegenerateProbeError",
    "DriftField",
    "DvsSamplerError",
    "HorizonViolationError",
    "LineElementSample",
    "NoiseSchedule",
    "NumericOverflowError",
    "RNG_ALGORITHM",
    "RandomStream",
    "RunConfig",
    "RunawayLoopError",
    "ScheduleSpec",
    "SingularityError",
    "StepDiagnostics",
    "StructuralError",
    "SummaryReport",
    "SystemState",
    "TerminalLaw",
    "ToyProblem",
    "TrajectoryRecord",
    "adaptive_step_size",
    "aggregate",
    "arc_length_profile",
    "bottleneck",
    "bridge_drift",
    "controller_step",
    "coupled_graph_drift",
    "drift_line_element",
    "drift_variation_score",
    "ema_update",
    "euler_step",
    "fim_monte_carlo_oracle",
    "fit_loglog_slope",
    "fixed_grid",
    "gaussian_draw",
    "gaussian_w2",
    "get_problem",
    "graph_summary_mmd",
    "heun_step",
    "line_element_samples",
    "make_schedule",
    "median_pairwise_bandwidth",
    "mmd_rbf",
    "noise_line_element",
    "probe_scaling",
    "problem_names",
    "quadratic_grid",
    "raw_step_size",
    "run_experiment",
    "run_sampler",
    "scaling_ratio_probe",
    "sweep_experiment",
    "threshold_adjacency",
    "verify_fim",
    "vp_gaussian_drift",
]
