"""Two-phase adaptive split scheduler.

Phase 1 (startup) measures a baseline at the configured static split, runs a
small set of automatically placed probe splits to anchor the objective's
normalization, fits initial rates, and probes both links. Phase 2 then runs
steady-state windows: a batch of inferences at the current split, a refit
and re-probe, a candidate search, and a switch decision.

Decision policy per window, in priority order: a measured deadline violation
forces a switch to the best candidate when one exists; otherwise a candidate
that improves the score by at least the switch threshold is adopted;
otherwise a deadline violation with no candidate falls back to the baseline
split; otherwise stay.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from statistics import fmean

from .errors import (
    BudgetError,
    InitializationError,
    InvalidSplitError,
    ProbeSpaceError,
    WindowAbortedError,
)
from .estimator import (
    InferenceSample,
    NodeRates,
    Split,
    estimate_split,
    fit_rates,
    validate_split,
)
from .link import DEFAULT_PROBE_CONFIG, LinkModel, ProbeConfig, initial_link_model, probe_link
from .profiling import ModelProfile
from .search import ObjectiveSpec, find_best, score


class Decision(enum.Enum):
    STAY = "stay"
    NORMAL_SWITCH = "normal-switch"
    FORCED_SWITCH = "forced-switch"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class SchedulerConfig:
    initial_split: Split
    w_edge: float = 0.7
    w_total: float = 0.2
    w_latency: float = 0.1
    deadline_s: float = 0.0
    baseline_runs: int = 50
    probe_runs: int = 15
    steady_runs: int = 100
    warmup_runs: int = 5
    switch_threshold: float = 0.03
    min_edge_layers: int = 1
    total_budget: int = 500

    def __post_init__(self):
        for label in ("baseline_runs", "probe_runs", "steady_runs"):
            if getattr(self, label) <= self.warmup_runs:
                raise ValueError(
                    f"{label} must exceed warmup_runs ({self.warmup_runs})"
                )
        if self.warmup_runs < 0:
            raise ValueError("warmup_runs must be >= 0")
        if self.switch_threshold < 0.0:
            raise ValueError("switch_threshold must be >= 0")
        if self.deadline_s < 0.0:
            raise ValueError("deadline_s must be >= 0 (0 disables it)")
        if self.min_edge_layers < 1:
            raise ValueError("min_edge_layers must be >= 1")
        if self.total_budget <= 0:
            raise ValueError("total_budget must be positive")

    @property
    def phase1_minimum(self) -> int:
        """Smallest budget that still allows startup plus one steady window."""
        return self.baseline_runs + 3 * self.probe_runs + self.steady_runs


@dataclass(frozen=True)
class WindowReport:
    window_index: int
    split: Split
    split_after: Split
    retained: int
    mean_latency_s: float
    mean_energy_edge_j: float
    mean_energy_fog_j: float
    mean_energy_cloud_j: float
    mean_energy_total_j: float
    candidate: Split | None
    score_current: float
    score_candidate: float | None
    improvement: float | None
    decision: Decision
    rates: NodeRates
    link_ef: LinkModel
    link_fc: LinkModel
    started_at_s: float
    ended_at_s: float


@dataclass
class SchedulerState:
    current_split: Split
    baseline_split: Split
    baseline_score: float
    anchor_edge_j: float
    anchor_total_j: float
    anchor_latency_s: float
    base_samples: list[InferenceSample]
    probe_samples: list[InferenceSample]
    rates: NodeRates
    link_ef: LinkModel
    link_fc: LinkModel
    windows: list[WindowReport] = field(default_factory=list)
    steady_samples: list[InferenceSample] = field(default_factory=list)
    consumed: int = 0

    def phase1_samples(self) -> list[InferenceSample]:
        return self.base_samples + self.probe_samples

    def objective(self, config: SchedulerConfig) -> ObjectiveSpec:
        return ObjectiveSpec(
            w_edge=config.w_edge,
            w_total=config.w_total,
            w_latency=config.w_latency,
            anchor_edge_j=self.anchor_edge_j,
            anchor_total_j=self.anchor_total_j,
            anchor_latency_s=self.anchor_latency_s,
            baseline_score=self.baseline_score,
            deadline_s=config.deadline_s,
            min_edge_layers=config.min_edge_layers,
        )


@dataclass(frozen=True)
class SteadyAggregate:
    mean_latency_s: float
    energy_edge_j: float
    energy_fog_j: float
    energy_cloud_j: float
    energy_total_j: float
    samples: int


@dataclass(frozen=True)
class ExperimentReport:
    windows: tuple[WindowReport, ...]
    aggregate: SteadyAggregate
    state: SchedulerState
    consumed: int


def probe_splits(n_features: int, min_edge_layers: int = 1) -> list[Split]:
    """Three automatically placed probe splits: edge-heavy, balanced, and
    cloud-heavy cuts at fifths of the layer chain.

    Raw positions are clamped into the valid region; any duplicate produced
    by clamping is moved to the nearest unused valid pair (Manhattan
    distance, lexicographic tie-break). Raises when the model admits fewer
    than three distinct valid splits.
    """
    if min_edge_layers < 1:
        raise ValueError("min_edge_layers must be >= 1")
    lo = min_edge_layers - 1
    all_pairs = [
        (i, j)
        for i in range(lo, n_features - 1)
        for j in range(i + 1, n_features)
    ]
    if len(all_pairs) < 3:
        raise ProbeSpaceError(
            f"only {len(all_pairs)} valid split(s) exist for "
            f"{n_features} layers with min_edge_layers={min_edge_layers}; "
            "need 3 probe positions"
        )
    raw = [
        (3 * n_features // 5, 4 * n_features // 5),
        (2 * n_features // 5, 3 * n_features // 5),
        (n_features // 5, 2 * n_features // 5),
    ]
    chosen: list[tuple[int, int]] = []
    for a, b in raw:
        i = min(max(a, lo), n_features - 2)
        j = min(max(b, i + 1), n_features - 1)
        if (i, j) in chosen:
            unused = [p for p in all_pairs if p not in chosen]
            i, j = min(unused, key=lambda p: (abs(p[0] - i) + abs(p[1] - j), p))
        chosen.append((i, j))
    return [Split(i, j) for i, j in chosen]


def decide_switch(
    current: Split,
    baseline: Split,
    candidate: Split | None,
    improvement: float | None,
    deadline_hit: bool,
    threshold: float,
) -> Decision:
    """Pure switching policy; see the module docstring for the cascade."""
    if deadline_hit and candidate is not None and candidate != current:
        return Decision.FORCED_SWITCH
    if (
        candidate is not None
        and candidate != current
        and improvement is not None
        and improvement >= threshold
    ):
        return Decision.NORMAL_SWITCH
    if deadline_hit and current != baseline:
        return Decision.FALLBACK
    return Decision.STAY


def _mean_energy(samples: list[InferenceSample]) -> tuple[float, float, float, float]:
    e = fmean(s.energy_edge_j for s in samples)
    f = fmean(s.energy_fog_j for s in samples)
    c = fmean(s.energy_cloud_j for s in samples)
    return e, f, c, e + f + c


def _run_batch(env, split, profile, runs, warmup, phase):
    retained: list[InferenceSample] = []
    try:
        for r in range(1, runs + 1):
            sample = env.run_inference(split, profile)
            if r > warmup:
                retained.append(sample)
    except Exception as exc:  # environment fault, not a logic error
        raise InitializationError(phase, repr(exc)) from exc
    return retained


def initialize(
    config: SchedulerConfig,
    profile: ModelProfile,
    env,
    probe_config: ProbeConfig = DEFAULT_PROBE_CONFIG,
) -> SchedulerState:
    """Startup: baseline batch, probe batches, anchors, rates, links, and the
    initial candidate search.

    The environment must expose run_inference(split, profile) and
    hop(name).rtt(payload) for the two hop names.
    """
    c0 = config.initial_split
    try:
        validate_split(c0, profile.n_features, config.min_edge_layers)
    except InvalidSplitError as exc:
        raise InvalidSplitError(f"initial split invalid: {exc}") from exc

    base_samples = _run_batch(
        env, c0, profile, config.baseline_runs, config.warmup_runs, phase="1a"
    )
    b_edge, _, _, b_total = _mean_energy(base_samples)
    b_latency = fmean(s.latency_s for s in base_samples)

    probes = probe_splits(profile.n_features, config.min_edge_layers)
    probe_samples: list[InferenceSample] = []
    for p in probes:
        if p == c0:
            continue
        probe_samples.extend(
            _run_batch(env, p, profile, config.probe_runs, config.warmup_runs, "1b")
        )
    n_edge, _, _, n_total = _mean_energy(probe_samples)
    n_latency = fmean(s.latency_s for s in probe_samples)

    baseline_score = (
        config.w_edge * (b_edge / n_edge)
        + config.w_total * (b_total / n_total)
        + config.w_latency * (b_latency / n_latency)
    )
    rates = fit_rates(base_samples + probe_samples, profile)
    try:
        link_ef = probe_link(env.hop("edge-fog"), probe_config, initial_link_model())
        link_fc = probe_link(env.hop("fog-cloud"), probe_config, initial_link_model())
    except Exception as exc:
        raise InitializationError("1c", repr(exc)) from exc

    state = SchedulerState(
        current_split=c0,
        baseline_split=c0,
        baseline_score=baseline_score,
        anchor_edge_j=n_edge,
        anchor_total_j=n_total,
        anchor_latency_s=n_latency,
        base_samples=base_samples,
        probe_samples=probe_samples,
        rates=rates,
        link_ef=link_ef,
        link_fc=link_fc,
        consumed=config.baseline_runs
        + config.probe_runs * len([p for p in probes if p != c0]),
    )
    best = find_best(
        profile, rates, link_ef, link_fc, state.objective(config), current=None
    )
    if best is not None:
        state.current_split = best
    return state


def steady_window(
    state: SchedulerState,
    config: SchedulerConfig,
    profile: ModelProfile,
    env,
    probe_config: ProbeConfig = DEFAULT_PROBE_CONFIG,
) -> WindowReport:
    """Run one steady-state window and apply the switch decision.

    Nothing in the state is mutated until the whole window (batch, refit,
    re-probe, search, decision) has completed, so an aborted window leaves
    the scheduler exactly where it was.
    """
    index = len(state.windows)
    current = state.current_split
    retained: list[InferenceSample] = []
    started_at = ended_at = None
    try:
        for r in range(1, config.steady_runs + 1):
            sample = env.run_inference(current, profile)
            if started_at is None:
                started_at = sample.timestamp_s
            ended_at = sample.timestamp_s + sample.latency_s
            if r > config.warmup_runs:
                retained.append(sample)
    except Exception as exc:
        raise WindowAbortedError(index, repr(exc)) from exc

    mean_latency = fmean(s.latency_s for s in retained)
    e_edge, e_fog, e_cloud, e_total = _mean_energy(retained)
    rates = fit_rates(state.phase1_samples() + retained, profile)
    try:
        link_ef = probe_link(env.hop("edge-fog"), probe_config, state.link_ef)
        link_fc = probe_link(env.hop("fog-cloud"), probe_config, state.link_fc)
    except Exception as exc:
        raise WindowAbortedError(index, repr(exc)) from exc

    objective = state.objective(config)
    candidate = find_best(
        profile, rates, link_ef, link_fc, objective, current=current
    )
    score_current = score(
        estimate_split(current, profile, rates, link_ef, link_fc), objective
    )
    score_candidate = None
    improvement = None
    if candidate is not None:
        score_candidate = score(
            estimate_split(candidate, profile, rates, link_ef, link_fc), objective
        )
        if score_current > 0.0:
            improvement = (score_current - score_candidate) / score_current
        else:
            improvement = 0.0
    deadline_hit = config.deadline_s > 0.0 and mean_latency > config.deadline_s
    decision = decide_switch(
        current,
        state.baseline_split,
        candidate,
        improvement,
        deadline_hit,
        config.switch_threshold,
    )
    if decision in (Decision.FORCED_SWITCH, Decision.NORMAL_SWITCH):
        split_after = candidate
    elif decision is Decision.FALLBACK:
        split_after = state.baseline_split
    else:
        split_after = current

    report = WindowReport(
        window_index=index,
        split=current,
        split_after=split_after,
        retained=len(retained),
        mean_latency_s=mean_latency,
        mean_energy_edge_j=e_edge,
        mean_energy_fog_j=e_fog,
        mean_energy_cloud_j=e_cloud,
        mean_energy_total_j=e_total,
        candidate=candidate,
        score_current=score_current,
        score_candidate=score_candidate,
        improvement=improvement,
        decision=decision,
        rates=rates,
        link_ef=link_ef,
        link_fc=link_fc,
        started_at_s=started_at,
        ended_at_s=ended_at,
    )
    state.rates = rates
    state.link_ef = link_ef
    state.link_fc = link_fc
    state.current_split = split_after
    state.windows.append(report)
    state.steady_samples.extend(retained)
    state.consumed += config.steady_runs
    return report


def run(
    config: SchedulerConfig,
    profile: ModelProfile,
    env,
    probe_config: ProbeConfig = DEFAULT_PROBE_CONFIG,
) -> ExperimentReport:
    """Full scheduled run: startup, then as many whole steady windows as the
    budget allows. Aggregate statistics cover steady-state samples only;
    startup samples exist to calibrate, not to be reported."""
    if config.total_budget < config.phase1_minimum:
        raise BudgetError(
            f"total budget {config.total_budget} is below the phase-1 minimum "
            f"{config.phase1_minimum} (baseline {config.baseline_runs} + 3 x "
            f"probe {config.probe_runs} + steady {config.steady_runs})"
        )
    state = initialize(config, profile, env, probe_config)
    while state.consumed + config.steady_runs <= config.total_budget:
        steady_window(state, config, profile, env, probe_config)
    pooled = state.steady_samples
    aggregate = SteadyAggregate(
        mean_latency_s=fmean(s.latency_s for s in pooled),
        energy_edge_j=fmean(s.energy_edge_j for s in pooled),
        energy_fog_j=fmean(s.energy_fog_j for s in pooled),
        energy_cloud_j=fmean(s.energy_cloud_j for s in pooled),
        energy_total_j=fmean(s.energy_total_j for s in pooled),
        samples=len(pooled),
    )
    return ExperimentReport(
        windows=tuple(state.windows),
        aggregate=aggregate,
        state=state,
        consumed=state.consumed,
    )
