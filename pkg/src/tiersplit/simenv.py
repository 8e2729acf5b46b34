"""Deterministic three-node simulation environment.

Simulates an edge/fog/cloud pipeline on a virtual clock. Every duration is
derived from ground-truth node rates and link parameters, optionally scaled
by piecewise-constant traces (to script slowdowns or bandwidth drops) and by
multiplicative lognormal noise from one seeded generator. Identical
construction parameters always reproduce identical sample streams.

Noise draw order is fixed and documented: within one inference the generator
is consumed for edge compute, edge-fog transfer, fog compute, fog-cloud
transfer, cloud compute, in that order. rtt() consumes one draw per call.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSplitError, UnknownHopError
from .estimator import EDGE_POWER_MODEL_W, InferenceSample, Split, validate_split
from .profiling import ModelProfile

TIERS = ("edge", "fog", "cloud")
HOP_NAMES = ("edge-fog", "fog-cloud")

Trace = tuple[tuple[float, float], ...]


def _validate_trace(trace: Trace, owner: str) -> Trace:
    trace = tuple((float(t), float(m)) for t, m in trace)
    last = -math.inf
    for t, mult in trace:
        if t <= last:
            raise ValueError(f"{owner}: trace timestamps must strictly increase")
        if not mult > 0.0:
            raise ValueError(f"{owner}: trace multipliers must be > 0, got {mult!r}")
        last = t
    return trace


def trace_multiplier(trace: Trace, t: float) -> float:
    """Multiplier in effect at virtual time t.

    Piecewise constant: an event applies to everything starting at or after
    its timestamp. Before the first event (or with no trace) the multiplier
    is 1.0.
    """
    if not trace:
        return 1.0
    idx = bisect_right(trace, t, key=lambda event: event[0])
    if idx == 0:
        return 1.0
    return trace[idx - 1][1]


@dataclass(frozen=True)
class NodeSpec:
    """Ground truth for one node: execution rate, power draw, optional trace
    scaling the rate over time (multiplier > 1 means slower)."""

    tier: str
    true_sigma: float
    true_power: float
    trace: Trace = ()

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ValueError(f"tier must be one of {TIERS}, got {self.tier!r}")
        if not self.true_sigma > 0.0:
            raise ValueError("true_sigma must be > 0")
        if not self.true_power > 0.0:
            raise ValueError("true_power must be > 0")
        object.__setattr__(
            self, "trace", _validate_trace(self.trace, f"node {self.tier}")
        )


@dataclass(frozen=True)
class HopSpec:
    """Ground truth for one hop; the trace scales throughput (multiplier < 1
    means the link got slower)."""

    name: str
    true_omega: float
    true_beta: float
    trace: Trace = ()

    def __post_init__(self):
        if self.name not in HOP_NAMES:
            raise ValueError(f"hop name must be one of {HOP_NAMES}, got {self.name!r}")
        if not self.true_omega >= 0.0:
            raise ValueError("true_omega must be >= 0")
        if not self.true_beta > 0.0:
            raise ValueError("true_beta must be > 0")
        object.__setattr__(
            self, "trace", _validate_trace(self.trace, f"hop {self.name}")
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Multiplicative lognormal noise: each duration is scaled by
    exp(sigma * z) with z standard normal. sigma = 0 means exact."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("noise sigma must be >= 0")


class SimHop:
    """rtt-capable view of one simulated hop; the probe interface."""

    def __init__(self, env: "SimEnvironment", name: str):
        self._env = env
        self.name = name

    def rtt(self, payload_bytes: int) -> float:
        return self._env.rtt(self.name, payload_bytes)


class SimEnvironment:
    """Virtual-clock simulator for a three-node pipeline.

    The pipeline is strictly sequential; there is no overlap between compute
    and transfer. Stage durations are evaluated against the traces at the
    virtual time each stage starts, so a trace event lands exactly on the
    first stage beginning at or after its timestamp.
    """

    def __init__(
        self,
        nodes: dict[str, NodeSpec],
        hops: dict[str, HopSpec],
        noise: NoiseSpec = NoiseSpec(),
    ):
        missing = [t for t in TIERS if t not in nodes]
        if missing:
            raise ValueError(f"missing node spec(s) for {missing}")
        missing_hops = [h for h in HOP_NAMES if h not in hops]
        if missing_hops:
            raise ValueError(f"missing hop spec(s) for {missing_hops}")
        for tier, spec in nodes.items():
            if spec.tier != tier:
                raise ValueError(
                    f"node registered under {tier!r} declares tier {spec.tier!r}"
                )
        for name, spec in hops.items():
            if spec.name != name:
                raise ValueError(
                    f"hop registered under {name!r} declares name {spec.name!r}"
                )
        self.nodes = dict(nodes)
        self.hops = dict(hops)
        self.noise = noise
        self.clock = 0.0
        self._rng = np.random.Generator(np.random.PCG64(noise.seed))

    def _noise_factor(self) -> float:
        if self.noise.sigma == 0.0:
            return 1.0
        return math.exp(self.noise.sigma * self._rng.standard_normal())

    def _compute_duration(self, tier: str, weight_share: float) -> float:
        spec = self.nodes[tier]
        mult = trace_multiplier(spec.trace, self.clock)
        duration = spec.true_sigma * mult * weight_share * self._noise_factor()
        self.clock += duration
        return duration

    def _transfer_duration(self, hop_name: str, payload_bytes: int) -> float:
        spec = self.hops[hop_name]
        mult = trace_multiplier(spec.trace, self.clock)
        duration = (
            spec.true_omega + payload_bytes / (spec.true_beta * mult)
        ) * self._noise_factor()
        self.clock += duration
        return duration

    def run_inference(self, split: Split, profile: ModelProfile) -> InferenceSample:
        """Simulate one inference at the given cut pair.

        Reported edge energy uses the fixed power model times edge compute
        time; fog and cloud energy use each node's true power times its
        (noisy) compute duration.
        """
        validate_split(split, profile.n_features)
        w_edge, w_fog, w_cloud = profile.weight_shares(split.i, split.j)
        started = self.clock
        t_edge = self._compute_duration("edge", w_edge)
        t_ef = self._transfer_duration("edge-fog", profile.activation_bytes[split.i])
        t_fog = self._compute_duration("fog", w_fog)
        t_fc = self._transfer_duration("fog-cloud", profile.activation_bytes[split.j])
        t_cloud = self._compute_duration("cloud", w_cloud)
        return InferenceSample(
            split=split,
            compute_edge_s=t_edge,
            compute_fog_s=t_fog,
            compute_cloud_s=t_cloud,
            energy_edge_j=EDGE_POWER_MODEL_W * t_edge,
            energy_fog_j=self.nodes["fog"].true_power * t_fog,
            energy_cloud_j=self.nodes["cloud"].true_power * t_cloud,
            transfer_ef_s=t_ef,
            transfer_fc_s=t_fc,
            latency_s=t_edge + t_ef + t_fog + t_fc + t_cloud,
            timestamp_s=started,
        )

    def run_single_device(self, tier: str, profile: ModelProfile) -> InferenceSample:
        """Simulate the whole model on one node: full weight share, no
        transfers. The edge still reports energy through the power model."""
        if tier not in TIERS:
            raise ValueError(f"tier must be one of {TIERS}, got {tier!r}")
        started = self.clock
        duration = self._compute_duration(tier, 1.0)
        if tier == "edge":
            energy = EDGE_POWER_MODEL_W * duration
        else:
            energy = self.nodes[tier].true_power * duration
        times = {t: 0.0 for t in TIERS}
        energies = {t: 0.0 for t in TIERS}
        times[tier] = duration
        energies[tier] = energy
        return InferenceSample(
            split=None,
            compute_edge_s=times["edge"],
            compute_fog_s=times["fog"],
            compute_cloud_s=times["cloud"],
            energy_edge_j=energies["edge"],
            energy_fog_j=energies["fog"],
            energy_cloud_j=energies["cloud"],
            transfer_ef_s=0.0,
            transfer_fc_s=0.0,
            latency_s=duration,
            timestamp_s=started,
        )

    def rtt(self, hop_name: str, payload_bytes: int) -> float:
        """One simulated round trip on a hop; advances the clock."""
        if hop_name not in self.hops:
            raise UnknownHopError(
                f"unknown hop {hop_name!r}; available: {list(self.hops)}"
            )
        if payload_bytes < 0:
            raise ValueError("payload must be >= 0")
        return self._transfer_duration(hop_name, payload_bytes)

    def hop(self, hop_name: str) -> SimHop:
        if hop_name not in self.hops:
            raise UnknownHopError(
                f"unknown hop {hop_name!r}; available: {list(self.hops)}"
            )
        return SimHop(self, hop_name)
