"""Adaptive split placement for three-tier (edge/fog/cloud) model inference.

The package decides where to cut a layered model into three consecutive
segments, one per tier, and keeps that decision current as compute rates
and link conditions drift: profile the model once, probe the links, predict
latency and energy for every admissible pair of cut points, and pick the
pair minimizing a weighted score. A two-phase scheduler re-evaluates the
choice in steady-state windows; a deterministic simulator and a scenario
harness make whole experiments reproducible.
"""

from .errors import (
    BudgetError,
    EmptyCandidateSpaceError,
    InitializationError,
    InvalidModelError,
    InvalidSplitError,
    LinkProbeTransportError,
    ProbeSpaceError,
    ProfileDegenerateError,
    ProfileFormatError,
    RateFitCoverageError,
    ScenarioError,
    TierSplitError,
    TransportError,
    UnknownFixtureError,
    UnknownHopError,
    WindowAbortedError,
)
from .estimator import (
    EDGE_POWER_MODEL_W,
    InferenceSample,
    NodeRates,
    Split,
    SplitEstimate,
    estimate_split,
    fit_rates,
    validate_split,
)
from .fixtures import (
    BUNDLED_SCENARIOS,
    CNN_SCENARIOS,
    adaptation_scenario,
    bundled_scenario,
    with_hop_trace,
    with_node_trace,
)
from .harness import (
    ComparisonReport,
    ExperimentSpec,
    ScenarioConfig,
    StrategyStats,
    build_environment,
    emit_reports,
    format_comparison,
    load_scenario,
    reduction_fraction,
    run_experiment,
)
from .link import (
    DEFAULT_PROBE_CONFIG,
    LinkModel,
    ProbeConfig,
    fit_link_model,
    initial_link_model,
    predict_transfer_time,
    probe_link,
)
from .profiling import (
    DescriptorExecutor,
    LayerSpec,
    ModelDescriptor,
    ModelProfile,
    PRESET_PROFILES,
    descriptor_to_profile,
    load_profile,
    preset_profile,
    profile_model,
)
from .scheduler import (
    Decision,
    ExperimentReport,
    SchedulerConfig,
    SchedulerState,
    SteadyAggregate,
    WindowReport,
    decide_switch,
    initialize,
    probe_splits,
    run,
    steady_window,
)
from .search import (
    ObjectiveSpec,
    enumerate_candidates,
    find_best,
    score,
)
from .simenv import (
    HOP_NAMES,
    HopSpec,
    NodeSpec,
    NoiseSpec,
    SimEnvironment,
    TIERS,
    trace_multiplier,
)

__version__ = "0.1.0"
