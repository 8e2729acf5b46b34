"""Scenario files, experiment orchestration, and report emission.

A scenario JSON file describes one reproducible experiment: the model
profile, the true node and hop characteristics of the simulated three-tier
deployment, optional measurement noise, the scheduler configuration, and the
experiment mode. Loading is strict: unknown keys, missing keys, and
out-of-range values fail with the offending field path in the message.

Strategies:

  static      the configured initial split for the whole budget
  adaptive    the two-phase scheduler
  edge-only / fog-only / cloud-only
              the entire model on one device, no transfers

Each strategy and each repetition gets its own deterministic seed so runs
are reproducible and strategies never share random streams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean

from .errors import (
    BudgetError,
    InvalidSplitError,
    ScenarioError,
)
from .estimator import InferenceSample, Split, validate_split
from .profiling import ModelProfile, load_profile, profile_from_dict
from .scheduler import SchedulerConfig, WindowReport
from .scheduler import run as run_scheduler
from .simenv import (
    HOP_NAMES,
    TIERS,
    HopSpec,
    NodeSpec,
    NoiseSpec,
    SimEnvironment,
)

MODES = ("adaptive", "static", "compare")
STRATEGY_SEED_OFFSETS = {
    "static": 0,
    "adaptive": 1_000_000,
    "edge-only": 2_000_000,
    "fog-only": 3_000_000,
    "cloud-only": 4_000_000,
}
EXPECTATION_NAMES = ("adaptive-energy-below-static", "adaptive-latency-within-5pct")
LATENCY_PARITY_FACTOR = 1.05

WINDOWS_CSV_HEADER = (
    "window_index,split_i,split_j,mean_latency_ms,edge_energy_j,"
    "fog_energy_j,cloud_energy_j,total_energy_j,score,decision"
)
SUMMARY_CSV_HEADER = (
    "strategy,mean_latency_ms,edge_energy_j,fog_energy_j,cloud_energy_j,total_energy_j"
)
COMPARISON_NOTE = (
    "note: reductions are relative to the static baseline; "
    "positive values favor the adaptive schedule."
)


@dataclass(frozen=True)
class ExperimentSpec:
    mode: str = "compare"
    budget: int = 500
    repetitions: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    profile: ModelProfile
    nodes: dict[str, NodeSpec]
    hops: dict[str, HopSpec]
    noise_sigma: float
    scheduler: SchedulerConfig
    experiment: ExperimentSpec
    expect: tuple[str, ...] = ()


@dataclass(frozen=True)
class StrategyStats:
    strategy: str
    mean_latency_s: float
    energy_edge_j: float
    energy_fog_j: float
    energy_cloud_j: float
    energy_total_j: float
    samples: int


@dataclass(frozen=True)
class ComparisonReport:
    scenario: str
    strategies: tuple[StrategyStats, ...]
    latency_reduction: float | None
    energy_reduction: float | None
    windows: tuple[WindowReport, ...]
    expectations: tuple[tuple[str, bool], ...] = ()
    note: str = COMPARISON_NOTE

    def strategy(self, name: str) -> StrategyStats:
        for row in self.strategies:
            if row.strategy == name:
                return row
        raise KeyError(name)


# ---------------------------------------------------------------- loading

def _mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}: expected an object")
    return value


def _check_keys(doc: dict, path: str, allowed, required=()):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ScenarioError(
            f"{path}: unknown key(s) {', '.join(unknown)}; "
            f"accepted: {', '.join(sorted(allowed))}"
        )
    missing = sorted(set(required) - set(doc))
    if missing:
        raise ScenarioError(f"{path}: missing required key(s) {', '.join(missing)}")


def _number(value, path: str, *, minimum: float | None = None, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a number")
    value = float(value)
    if positive and value <= 0.0:
        raise ScenarioError(f"{path}: must be > 0")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"{path}: must be >= {minimum}")
    return value


def _integer(value, path: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}: expected an integer")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"{path}: must be >= {minimum}")
    return value


def _parse_trace(value, path: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list):
        raise ScenarioError(f"{path}: expected a list of [time, multiplier] pairs")
    events = []
    for k, pair in enumerate(value):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ScenarioError(f"{path}[{k}]: expected a [time, multiplier] pair")
        t = _number(pair[0], f"{path}[{k}][0]", minimum=0.0)
        m = _number(pair[1], f"{path}[{k}][1]", positive=True)
        events.append((t, m))
    for (a, _), (b, _) in zip(events, events[1:]):
        if b <= a:
            raise ScenarioError(f"{path}: event times must be strictly increasing")
    return tuple(events)


def _parse_profile(value, scenario_dir: Path) -> ModelProfile:
    if isinstance(value, str):
        target = (scenario_dir / value).resolve()
        try:
            return load_profile(target)
        except OSError as exc:
            raise ScenarioError(f"scenario.profile: cannot read {target}: {exc}") from exc
    if isinstance(value, dict):
        return profile_from_dict(value, where="scenario.profile")
    raise ScenarioError("scenario.profile: expected a file path or an inline profile object")


def _parse_nodes(doc, path: str) -> dict[str, NodeSpec]:
    nodes_doc = _mapping(doc, path)
    _check_keys(nodes_doc, path, allowed=TIERS, required=TIERS)
    nodes = {}
    for tier in TIERS:
        nd = _mapping(nodes_doc[tier], f"{path}.{tier}")
        _check_keys(
            nd,
            f"{path}.{tier}",
            allowed={"sigma_s_per_share", "power_w", "trace", "note"},
            required={"sigma_s_per_share", "power_w"},
        )
        sigma = _number(nd["sigma_s_per_share"], f"{path}.{tier}.sigma_s_per_share", positive=True)
        power = _number(nd["power_w"], f"{path}.{tier}.power_w", positive=True)
        trace = _parse_trace(nd.get("trace", []), f"{path}.{tier}.trace")
        try:
            nodes[tier] = NodeSpec(tier=tier, true_sigma=sigma, true_power=power, trace=trace)
        except ValueError as exc:
            raise ScenarioError(f"{path}.{tier}: {exc}") from exc
    return nodes


def _parse_hops(doc, path: str) -> dict[str, HopSpec]:
    hops_doc = _mapping(doc, path)
    _check_keys(hops_doc, path, allowed=HOP_NAMES, required=HOP_NAMES)
    hops = {}
    for name in HOP_NAMES:
        hd = _mapping(hops_doc[name], f"{path}.{name}")
        _check_keys(
            hd,
            f"{path}.{name}",
            allowed={"omega_s", "beta_bytes_per_s", "trace", "note"},
            required={"omega_s", "beta_bytes_per_s"},
        )
        omega = _number(hd["omega_s"], f"{path}.{name}.omega_s", minimum=0.0)
        beta = _number(hd["beta_bytes_per_s"], f"{path}.{name}.beta_bytes_per_s", positive=True)
        trace = _parse_trace(hd.get("trace", []), f"{path}.{name}.trace")
        try:
            hops[name] = HopSpec(name=name, true_omega=omega, true_beta=beta, trace=trace)
        except ValueError as exc:
            raise ScenarioError(f"{path}.{name}: {exc}") from exc
    return hops


def _parse_experiment(doc, path: str) -> ExperimentSpec:
    ed = _mapping(doc, path)
    _check_keys(
        ed, path,
        allowed={"mode", "budget", "repetitions", "seed", "note"},
    )
    kwargs = {}
    if "mode" in ed:
        if not isinstance(ed["mode"], str):
            raise ScenarioError(f"{path}.mode: expected a string")
        kwargs["mode"] = ed["mode"]
    if "budget" in ed:
        kwargs["budget"] = _integer(ed["budget"], f"{path}.budget", minimum=1)
    if "repetitions" in ed:
        kwargs["repetitions"] = _integer(ed["repetitions"], f"{path}.repetitions", minimum=1)
    if "seed" in ed:
        kwargs["seed"] = _integer(ed["seed"], f"{path}.seed")
    try:
        return ExperimentSpec(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_scheduler(doc, path: str, budget: int, profile: ModelProfile) -> SchedulerConfig:
    sd = _mapping(doc, path)
    _check_keys(
        sd, path,
        allowed={
            "initial_split", "weights", "deadline_s", "baseline_runs",
            "probe_runs", "steady_runs", "warmup_runs", "switch_threshold",
            "min_edge_layers", "note",
        },
        required={"initial_split"},
    )
    raw_split = sd["initial_split"]
    if (
        not isinstance(raw_split, (list, tuple))
        or len(raw_split) != 2
        or any(isinstance(v, bool) or not isinstance(v, int) for v in raw_split)
    ):
        raise ScenarioError(f"{path}.initial_split: expected a pair of integers [i, j]")
    weights = (0.7, 0.2, 0.1)
    if "weights" in sd:
        raw_w = sd["weights"]
        if not isinstance(raw_w, (list, tuple)) or len(raw_w) != 3:
            raise ScenarioError(f"{path}.weights: expected three numbers")
        weights = tuple(
            _number(w, f"{path}.weights[{k}]", minimum=0.0) for k, w in enumerate(raw_w)
        )
        if sum(weights) <= 0.0:
            raise ScenarioError(f"{path}.weights: at least one weight must be positive")
    kwargs = dict(
        w_edge=weights[0], w_total=weights[1], w_latency=weights[2],
        total_budget=budget,
    )
    if "deadline_s" in sd:
        kwargs["deadline_s"] = _number(sd["deadline_s"], f"{path}.deadline_s", minimum=0.0)
    for key in ("baseline_runs", "probe_runs", "steady_runs", "warmup_runs"):
        if key in sd:
            kwargs[key] = _integer(sd[key], f"{path}.{key}", minimum=0)
    if "switch_threshold" in sd:
        kwargs["switch_threshold"] = _number(
            sd["switch_threshold"], f"{path}.switch_threshold", minimum=0.0
        )
    if "min_edge_layers" in sd:
        kwargs["min_edge_layers"] = _integer(sd["min_edge_layers"], f"{path}.min_edge_layers", minimum=1)
    try:
        split = Split(raw_split[0], raw_split[1])
        config = SchedulerConfig(initial_split=split, **kwargs)
        validate_split(split, profile.n_features, config.min_edge_layers)
    except (ValueError, InvalidSplitError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario file; see the module docstring.

    Raises ScenarioError for structural problems, ProfileFormatError for a
    broken profile, and BudgetError when the inference budget cannot cover
    startup plus one steady window.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    doc = _mapping(doc, "scenario")
    _check_keys(
        doc, "scenario",
        allowed={
            "name", "note", "notes", "profile", "nodes", "hops", "noise",
            "scheduler", "experiment", "expect",
        },
        required={"name", "profile", "nodes", "hops", "scheduler"},
    )
    if not isinstance(doc["name"], str) or not doc["name"]:
        raise ScenarioError("scenario.name: expected a non-empty string")

    profile = _parse_profile(doc["profile"], path.parent)
    nodes = _parse_nodes(doc["nodes"], "scenario.nodes")
    hops = _parse_hops(doc["hops"], "scenario.hops")

    noise_sigma = 0.0
    if "noise" in doc:
        nd = _mapping(doc["noise"], "scenario.noise")
        _check_keys(nd, "scenario.noise", allowed={"sigma", "note"})
        if "sigma" in nd:
            noise_sigma = _number(nd["sigma"], "scenario.noise.sigma", minimum=0.0)

    experiment = _parse_experiment(doc.get("experiment", {}), "scenario.experiment")
    scheduler = _parse_scheduler(
        doc["scheduler"], "scenario.scheduler", experiment.budget, profile
    )
    if experiment.budget < scheduler.phase1_minimum:
        raise BudgetError(
            f"budget {experiment.budget} is below the phase-1 minimum "
            f"{scheduler.phase1_minimum} (baseline {scheduler.baseline_runs} + 3 x "
            f"probe {scheduler.probe_runs} + steady {scheduler.steady_runs})"
        )

    expect: tuple[str, ...] = ()
    if "expect" in doc:
        raw = doc["expect"]
        if not isinstance(raw, list) or not all(isinstance(e, str) for e in raw):
            raise ScenarioError("scenario.expect: expected a list of expectation names")
        for name in raw:
            if name not in EXPECTATION_NAMES:
                raise ScenarioError(
                    f"scenario.expect: unknown expectation {name!r}; "
                    f"accepted: {', '.join(EXPECTATION_NAMES)}"
                )
        expect = tuple(raw)

    return ScenarioConfig(
        name=doc["name"],
        profile=profile,
        nodes=nodes,
        hops=hops,
        noise_sigma=noise_sigma,
        scheduler=scheduler,
        experiment=experiment,
        expect=expect,
    )


# ------------------------------------------------------------- execution

def build_environment(config: ScenarioConfig, seed: int) -> SimEnvironment:
    return SimEnvironment(
        nodes=config.nodes,
        hops=config.hops,
        noise=NoiseSpec(sigma=config.noise_sigma, seed=seed),
    )


def reduction_fraction(baseline: float, improved: float) -> float:
    """Relative reduction of `improved` against `baseline`; positive when
    the improved quantity is smaller."""
    if baseline <= 0.0:
        raise ValueError("baseline must be positive")
    return (baseline - improved) / baseline


def _stats(name: str, samples: list[InferenceSample]) -> StrategyStats:
    return StrategyStats(
        strategy=name,
        mean_latency_s=fmean(s.latency_s for s in samples),
        energy_edge_j=fmean(s.energy_edge_j for s in samples),
        energy_fog_j=fmean(s.energy_fog_j for s in samples),
        energy_cloud_j=fmean(s.energy_cloud_j for s in samples),
        energy_total_j=fmean(s.energy_total_j for s in samples),
        samples=len(samples),
    )


def _seed_for(config: ScenarioConfig, strategy: str, repetition: int) -> int:
    return config.experiment.seed + STRATEGY_SEED_OFFSETS[strategy] + repetition


def _run_static(config: ScenarioConfig) -> StrategyStats:
    pooled: list[InferenceSample] = []
    split = config.scheduler.initial_split
    warmup = config.scheduler.warmup_runs
    for k in range(config.experiment.repetitions):
        env = build_environment(config, _seed_for(config, "static", k))
        for r in range(config.experiment.budget):
            sample = env.run_inference(split, config.profile)
            if r >= warmup:
                pooled.append(sample)
    return _stats("static", pooled)


def _run_single_device(config: ScenarioConfig, tier: str) -> StrategyStats:
    name = f"{tier}-only"
    pooled: list[InferenceSample] = []
    warmup = config.scheduler.warmup_runs
    for k in range(config.experiment.repetitions):
        env = build_environment(config, _seed_for(config, name, k))
        for r in range(config.experiment.budget):
            sample = env.run_single_device(tier, config.profile)
            if r >= warmup:
                pooled.append(sample)
    return _stats(name, pooled)


def _run_adaptive(config: ScenarioConfig) -> tuple[StrategyStats, tuple[WindowReport, ...]]:
    pooled: list[InferenceSample] = []
    first_windows: tuple[WindowReport, ...] = ()
    for k in range(config.experiment.repetitions):
        env = build_environment(config, _seed_for(config, "adaptive", k))
        report = run_scheduler(config.scheduler, config.profile, env)
        pooled.extend(report.state.steady_samples)
        if k == 0:
            first_windows = report.windows
    return _stats("adaptive", pooled), first_windows


def evaluate_expectations(
    static: StrategyStats, adaptive: StrategyStats, expect: tuple[str, ...]
) -> tuple[tuple[str, bool], ...]:
    results = []
    for name in expect:
        if name == "adaptive-energy-below-static":
            ok = adaptive.energy_total_j < static.energy_total_j
        elif name == "adaptive-latency-within-5pct":
            ok = adaptive.mean_latency_s <= LATENCY_PARITY_FACTOR * static.mean_latency_s
        else:
            raise ValueError(f"unknown expectation {name!r}")
        results.append((name, ok))
    return tuple(results)


def run_experiment(config: ScenarioConfig) -> ComparisonReport:
    """Execute the scenario in its configured mode and return the report."""
    mode = config.experiment.mode
    if mode == "static":
        return ComparisonReport(
            scenario=config.name,
            strategies=(_run_static(config),),
            latency_reduction=None,
            energy_reduction=None,
            windows=(),
        )
    if mode == "adaptive":
        adaptive, windows = _run_adaptive(config)
        return ComparisonReport(
            scenario=config.name,
            strategies=(adaptive,),
            latency_reduction=None,
            energy_reduction=None,
            windows=windows,
        )
    static = _run_static(config)
    adaptive, windows = _run_adaptive(config)
    singles = tuple(_run_single_device(config, tier) for tier in TIERS)
    return ComparisonReport(
        scenario=config.name,
        strategies=(static, adaptive) + singles,
        latency_reduction=reduction_fraction(static.mean_latency_s, adaptive.mean_latency_s),
        energy_reduction=reduction_fraction(static.energy_total_j, adaptive.energy_total_j),
        windows=windows,
        expectations=evaluate_expectations(static, adaptive, config.expect),
    )


# -------------------------------------------------------------- emission

def _fmt(value: float) -> str:
    return f"{value:.6g}"


def format_comparison(report: ComparisonReport) -> str:
    lines = [f"scenario: {report.scenario}"]
    header = SUMMARY_CSV_HEADER.split(",")
    widths = [14, 16, 14, 13, 15, 15]
    lines.append("".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in report.strategies:
        cells = [
            row.strategy,
            _fmt(row.mean_latency_s * 1000.0),
            _fmt(row.energy_edge_j),
            _fmt(row.energy_fog_j),
            _fmt(row.energy_cloud_j),
            _fmt(row.energy_total_j),
        ]
        lines.append("".join(c.ljust(w) for c, w in zip(cells, widths)))
    if report.latency_reduction is not None:
        lines.append(
            f"latency reduction: {report.latency_reduction * 100.0:.2f}% (adaptive vs static)"
        )
        lines.append(
            f"energy reduction: {report.energy_reduction * 100.0:.2f}% (adaptive vs static)"
        )
        for name, ok in report.expectations:
            lines.append(f"expect {name}: {'ok' if ok else 'NOT MET'}")
        lines.append(report.note)
    return "\n".join(lines) + "\n"


def emit_reports(report: ComparisonReport, out_dir: str | Path) -> list[Path]:
    """Write summary.csv, plus windows.csv and comparison.txt when the run
    produced them. Returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    summary_lines = [SUMMARY_CSV_HEADER]
    for row in report.strategies:
        summary_lines.append(
            ",".join(
                [
                    row.strategy,
                    _fmt(row.mean_latency_s * 1000.0),
                    _fmt(row.energy_edge_j),
                    _fmt(row.energy_fog_j),
                    _fmt(row.energy_cloud_j),
                    _fmt(row.energy_total_j),
                ]
            )
        )
    summary_path = out_dir / "summary.csv"
    summary_path.write_text("\n".join(summary_lines) + "\n", newline="\n")
    written.append(summary_path)

    if report.windows:
        window_lines = [WINDOWS_CSV_HEADER]
        for w in report.windows:
            window_lines.append(
                ",".join(
                    [
                        str(w.window_index),
                        str(w.split.i),
                        str(w.split.j),
                        _fmt(w.mean_latency_s * 1000.0),
                        _fmt(w.mean_energy_edge_j),
                        _fmt(w.mean_energy_fog_j),
                        _fmt(w.mean_energy_cloud_j),
                        _fmt(w.mean_energy_total_j),
                        _fmt(w.score_current),
                        w.decision.value,
                    ]
                )
            )
        windows_path = out_dir / "windows.csv"
        windows_path.write_text("\n".join(window_lines) + "\n", newline="\n")
        written.append(windows_path)

    if report.latency_reduction is not None:
        comparison_path = out_dir / "comparison.txt"
        comparison_path.write_text(format_comparison(report), newline="\n")
        written.append(comparison_path)
    return written
