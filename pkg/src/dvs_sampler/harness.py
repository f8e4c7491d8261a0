"""Experiment runner: config parsing, multi-chain execution, file emission.

Each chain owns an independent random stream keyed by ``(seed, chain_id)``,
so results are reproducible bit for bit regardless of worker count.  All
CSV output is deterministic (17-significant-digit floats, rows ordered by
chain and step); wall-clock timing appears only in ``summary.json``.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .controller import ControllerConfig
from .errors import ConfigError
from .geometry import arc_length_profile, fit_loglog_slope, scaling_ratio_probe
from .grids import SOLVER_KINDS, ScheduleSpec
from .metrics import gaussian_w2, graph_summary_mmd, threshold_adjacency
from .rng import RNG_ALGORITHM, RandomStream
from .sampler import TrajectoryRecord, line_element_samples, run_sampler
from .toys import get_problem

EMIT_MODES = ("trajectory", "summary", "arc_profile", "gamma_sweep", "scaling_probe")

TRAJECTORY_COLUMNS = (
    "k", "t", "dt", "v_x", "v_a", "vbar_x", "vbar_a",
    "ds2_drift", "ds2_noise", "nfe_cum", "state_norm",
)

DEFAULT_PROBE_DT_GRID = (1e-2, 1e-3, 1e-4, 1e-5)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    """One experiment: a toy problem, a solver, a stepping schedule, chains."""

    problem: str
    solver: str
    schedule: ScheduleSpec
    seed: int
    output_dir: str
    n_chains: int = 1
    T: float = 1.0
    emit: tuple[str, ...] = ("trajectory", "summary")

    def __post_init__(self):
        if self.solver not in SOLVER_KINDS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.n_chains < 1:
            raise ConfigError(f"n_chains must be >= 1, got {self.n_chains}")
        bad = [m for m in self.emit if m not in EMIT_MODES]
        if bad:
            raise ConfigError(f"unknown emit mode(s) {bad}; expected subset of {EMIT_MODES}")
        object.__setattr__(self, "emit", tuple(self.emit))

    @staticmethod
    def from_dict(data: dict) -> "RunConfig":
        """Parse the flat JSON config layout; unknown keys are errors."""
        allowed = {"problem", "solver", "schedule", "seed", "output_dir",
                   "n_chains", "T", "emit"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        missing = {"problem", "solver", "schedule", "seed", "output_dir"} - set(data)
        if missing:
            raise ConfigError(f"missing config key(s): {sorted(missing)}")
        spec = _schedule_from_dict(data["schedule"])
        kwargs = {k: v for k, v in data.items() if k != "schedule"}
        if "emit" in kwargs:
            kwargs["emit"] = tuple(kwargs["emit"])
        return RunConfig(schedule=spec, **kwargs)

    @staticmethod
    def from_json(path) -> "RunConfig":
        with open(path) as fh:
            return RunConfig.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["emit"] = list(self.emit)
        sched = {"kind": self.schedule.kind}
        if self.schedule.n_steps is not None:
            sched["n_steps"] = self.schedule.n_steps
        if self.schedule.controller is not None:
            ctrl = dataclasses.asdict(self.schedule.controller)
            ctrl["active_ranges"] = [list(r) for r in self.schedule.controller.active_ranges]
            sched["controller"] = ctrl
        out["schedule"] = sched
        return out


def _schedule_from_dict(data: dict) -> ScheduleSpec:
    if not isinstance(data, dict):
        raise ConfigError(f"schedule must be an object, got {type(data).__name__}")
    allowed = {"kind", "n_steps", "controller"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown schedule key(s): {sorted(unknown)}")
    if "kind" not in data:
        raise ConfigError("schedule needs a 'kind'")
    controller = None
    if data.get("controller") is not None:
        controller = _controller_from_dict(data["controller"])
    return ScheduleSpec(kind=data["kind"], n_steps=data.get("n_steps"),
                        controller=controller)


def _controller_from_dict(data: dict) -> ControllerConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"controller must be an object, got {type(data).__name__}")
    allowed = {f.name for f in dataclasses.fields(ControllerConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown controller key(s): {sorted(unknown)}")
    kwargs = dict(data)
    if "active_ranges" in kwargs:
        kwargs["active_ranges"] = tuple(tuple(r) for r in kwargs["active_ranges"])
    return ControllerConfig(**kwargs)


@dataclass
class SummaryReport:
    """Aggregated metrics for one experiment (fields null when inapplicable)."""

    total_steps: int
    total_nfe: int
    terminal_error_w2: float | None
    mmd_degree: float | None
    mmd_spectral: float | None
    arc_cv: float
    wall_time_per_step: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class _ChainResult:
    chain_id: int
    records: list[TrajectoryRecord]
    terminal_node: np.ndarray
    terminal_edge: np.ndarray | None


def _run_chain(config_dict: dict, chain_id: int) -> _ChainResult:
    config = RunConfig.from_dict(config_dict)
    problem = get_problem(config.problem)
    stream = RandomStream(config.seed, chain_id)
    final_state, records = run_sampler(problem, config.schedule, config.solver, stream)
    return _ChainResult(
        chain_id=chain_id,
        records=records,
        terminal_node=final_state.node_part.copy(),
        terminal_edge=None if final_state.edge_part is None else final_state.edge_part.copy(),
    )


def worker_count() -> int:
    """Worker pool size: DVS_WORKERS env override, else available parallelism."""
    env = os.environ.get("DVS_WORKERS")
    if env is not None:
        n = int(env)
        if n < 1:
            raise ConfigError(f"DVS_WORKERS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _execute_chains(config: RunConfig) -> list[_ChainResult]:
    config_dict = config.to_dict()
    ids = range(config.n_chains)
    workers = min(worker_count(), config.n_chains)
    if workers <= 1:
        return [_run_chain(config_dict, i) for i in ids]
    chunk = max(1, config.n_chains // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chain, [config_dict] * config.n_chains, ids,
                             chunksize=chunk))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _trajectory_csv(records) -> str:
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, c)) for c in TRAJECTORY_COLUMNS))
    return "\n".join(lines) + "\n"


def _arc_profile_csv(results) -> str:
    lines = ["chain,k,t,dt,ds2_drift,ds2_noise,arc_cum"]
    for res in results:
        arc = 0.0
        for r in res.records:
            arc += float(np.sqrt(r.ds2_drift + r.ds2_noise))
            lines.append(",".join(
                [str(res.chain_id), str(r.k)]
                + [_fmt(v) for v in (r.t, r.dt, r.ds2_drift, r.ds2_noise, arc)]
            ))
    return "\n".join(lines) + "\n"


def summarize(config: RunConfig, results: list[_ChainResult],
              wall_time: float) -> tuple[SummaryReport, dict]:
    """Aggregate chain results into a report plus metric metadata."""
    problem = get_problem(config.problem)
    total_steps = sum(len(res.records) for res in results)
    total_nfe = sum(res.records[-1].nfe_cum for res in results)

    meta: dict = {}
    w2 = None
    if problem.analytic_terminal is not None:
        pool = np.vstack([res.terminal_node for res in results])
        w2 = gaussian_w2(
            pool.mean(axis=0), pool.var(axis=0),
            problem.analytic_terminal.mean, problem.analytic_terminal.var,
        )

    mmd_degree = mmd_spectral = None
    if problem.edge_target is not None:
        n_nodes = problem.edge_target.shape[0]
        generated = [
            threshold_adjacency(res.terminal_edge, n_nodes) for res in results
        ]
        mmd = graph_summary_mmd(generated, [problem.edge_target])
        mmd_degree = mmd["mmd_degree"]
        mmd_spectral = mmd["mmd_spectral"]
        meta["mmd_bandwidth_degree"] = mmd["bandwidth_degree"]
        meta["mmd_bandwidth_spectral"] = mmd["bandwidth_spectral"]

    cvs = [
        arc_length_profile(line_element_samples(res.records)).cv for res in results
    ]
    report = SummaryReport(
        total_steps=total_steps,
        total_nfe=total_nfe,
        terminal_error_w2=w2,
        mmd_degree=mmd_degree,
        mmd_spectral=mmd_spectral,
        arc_cv=float(np.mean(cvs)),
        wall_time_per_step=wall_time / total_steps,
    )
    return report, meta


def run_experiment(config: RunConfig, quiet: bool = False) -> SummaryReport:
    """Run all chains, aggregate, emit the configured files, print a summary."""
    problem = get_problem(config.problem)
    if abs(problem.T - config.T) > 1e-12:
        raise ConfigError(
            f"config horizon T={config.T} disagrees with problem {config.problem!r} "
            f"(T={problem.T})"
        )
    start = time.perf_counter()
    results = _execute_chains(config)
    wall = time.perf_counter() - start
    report, meta = summarize(config, results, wall)

    out = Path(config.output_dir)
    if "trajectory" in config.emit:
        for res in results:
            _atomic_write(out / f"trajectory_{res.chain_id}.csv",
                          _trajectory_csv(res.records))
    if "arc_profile" in config.emit:
        _atomic_write(out / "arc_profile.csv", _arc_profile_csv(results))
    if "summary" in config.emit:
        payload = report.to_dict()
        payload["config"] = config.to_dict()
        payload["rng_algorithm"] = RNG_ALGORITHM
        payload["metric_metadata"] = meta
        _atomic_write(out / "summary.json", json.dumps(payload, indent=2) + "\n")

    if not quiet:
        print(format_summary(config, report))
    return report


def format_summary(config: RunConfig, report: SummaryReport) -> str:
    rows = [
        ("problem", config.problem),
        ("solver", config.solver),
        ("schedule", config.schedule.kind),
        ("chains", config.n_chains),
        ("total_steps", report.total_steps),
        ("total_nfe", report.total_nfe),
        ("terminal_error_w2", report.terminal_error_w2),
        ("mmd_degree", report.mmd_degree),
        ("mmd_spectral", report.mmd_spectral),
        ("arc_cv", report.arc_cv),
        ("wall_time_per_step", report.wall_time_per_step),
    ]
    width = max(len(k) for k, _ in rows)
    lines = []
    for key, value in rows:
        if value is None:
            value = "n/a"
        elif isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines)


def sweep_experiment(config: RunConfig, param: str, values,
                     quiet: bool = False) -> list[tuple[float, SummaryReport]]:
    """Re-run the experiment for each controller ``param`` value.

    Requires a dvs schedule.  Per-run file emission is suppressed; the sweep
    table goes to ``gamma_sweep.csv`` (or ``sweep_<param>.csv`` for other
    parameters) when the corresponding emit mode is on.
    """
    if config.schedule.kind != "dvs":
        raise ConfigError("parameter sweeps need a dvs schedule")
    fields = {f.name for f in dataclasses.fields(ControllerConfig)}
    if param not in fields:
        raise ConfigError(f"unknown controller parameter {param!r}")

    rows = []
    for value in values:
        ctrl = dataclasses.replace(config.schedule.controller, **{param: value})
        spec = ScheduleSpec(kind="dvs", controller=ctrl)
        sub = dataclasses.replace(config, schedule=spec, emit=())
        start = time.perf_counter()
        results = _execute_chains(sub)
        wall = time.perf_counter() - start
        report, _ = summarize(sub, results, wall)
        rows.append((float(value), report))
        if not quiet:
            print(f"{param}={value:g}: steps={report.total_steps} nfe={report.total_nfe}")

    if "gamma_sweep" in config.emit:
        name = "gamma_sweep.csv" if param == "gamma" else f"sweep_{param}.csv"
        lines = [f"{param},total_steps,total_nfe,terminal_error_w2,arc_cv,mmd_degree,mmd_spectral"]
        for value, report in rows:
            cells = [
                _fmt(value), str(report.total_steps), str(report.total_nfe),
                _fmt(report.terminal_error_w2) if report.terminal_error_w2 is not None else "nan",
                _fmt(report.arc_cv),
                _fmt(report.mmd_degree) if report.mmd_degree is not None else "nan",
                _fmt(report.mmd_spectral) if report.mmd_spectral is not None else "nan",
            ]
            lines.append(",".join(cells))
        _atomic_write(Path(config.output_dir) / name, "\n".join(lines) + "\n")
    return rows


def probe_scaling(config: RunConfig, t: float | None = None,
                  dt_grid=DEFAULT_PROBE_DT_GRID, n_reps: int = 10_000,
                  quiet: bool = False) -> tuple[list[tuple[float, float]], float]:
    """Run the drift/noise scaling probe on the config's problem.

    Probes at ``t`` (default mid-horizon) from a state drawn with the config
    seed; returns the (dt, mean ratio) pairs and the fitted log-log slope.
    """
    problem = get_problem(config.problem)
    if t is None:
        t = 0.5 * problem.T
    state = problem.init_sampler(RandomStream(config.seed, 0))
    pairs = scaling_ratio_probe(
        problem.field.fresh(), problem.schedule, state, t, dt_grid, n_reps,
        RandomStream(config.seed, 1),
    )
    slope = fit_loglog_slope(pairs)
    if "scaling_probe" in config.emit:
        lines = ["dt,mean_ratio"]
        lines += [f"{_fmt(dt)},{_fmt(ratio)}" for dt, ratio in pairs]
        _atomic_write(Path(config.output_dir) / "scaling_probe.csv",
                      "\n".join(lines) + "\n")
    if not quiet:
        for dt, ratio in pairs:
            print(f"dt={dt:g}: mean ratio {ratio:.6g}")
        print(f"fitted log-log slope: {slope:.4f}")
    return pairs, slope
