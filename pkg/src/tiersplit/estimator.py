"""Latency and energy estimation for a candidate cut pair, and rate fitting.

The estimator is deliberately linear: node time is a fitted per-node rate
times the node's share of total work, transfer time comes from the fitted
link models, and energy is power times time. Rates are refit from measured
samples as conditions drift, which is what keeps the linear form honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidSplitError, RateFitCoverageError
from .link import LinkModel, predict_transfer_time
from .profiling import ModelProfile

#: Power model applied to edge compute time when reporting edge energy.
EDGE_POWER_MODEL_W = 12.0

NODE_NAMES = ("edge", "fog", "cloud")


@dataclass(frozen=True, order=True)
class Split:
    """Cut pair (i, j): edge runs layers 0..i, fog i+1..j, cloud the rest."""

    i: int
    j: int

    def __post_init__(self):
        if not (0 <= self.i < self.j):
            raise InvalidSplitError(
                f"require 0 <= i < j, got ({self.i}, {self.j})"
            )

    def as_tuple(self) -> tuple[int, int]:
        return (self.i, self.j)


def validate_split(
    split: Split, n_features: int, min_edge_layers: int = 1
) -> None:
    """Check a split against a model's layer count and the edge minimum."""
    if split.j >= n_features:
        raise InvalidSplitError(
            f"split ({split.i}, {split.j}) needs j < {n_features} feature layers"
        )
    if split.i < min_edge_layers - 1:
        raise InvalidSplitError(
            f"split ({split.i}, {split.j}) leaves fewer than "
            f"{min_edge_layers} layer(s) on the edge"
        )


@dataclass(frozen=True)
class NodeRates:
    """Fitted per-node execution rates and power draws.

    sigma_* is seconds per unit weight share (i.e., the time the node would
    take to run the whole model alone). rho_* converts fog/cloud compute time
    to energy; the edge instead uses the fixed p_edge power model.
    """

    sigma_edge: float
    sigma_fog: float
    sigma_cloud: float
    rho_fog: float
    rho_cloud: float
    p_edge: float = EDGE_POWER_MODEL_W

    def __post_init__(self):
        for label in ("sigma_edge", "sigma_fog", "sigma_cloud"):
            if not getattr(self, label) > 0.0:
                raise ValueError(f"{label} must be > 0, got {getattr(self, label)!r}")
        for label in ("rho_fog", "rho_cloud", "p_edge"):
            if not getattr(self, label) >= 0.0:
                raise ValueError(f"{label} must be >= 0, got {getattr(self, label)!r}")


@dataclass(frozen=True)
class SplitEstimate:
    """Predicted behavior of one cut pair under the current rates and links."""

    split: Split
    latency_s: float
    energy_edge_j: float
    energy_fog_j: float
    energy_cloud_j: float
    energy_total_j: float
    compute_edge_s: float
    compute_fog_s: float
    compute_cloud_s: float
    transfer_ef_s: float
    transfer_fc_s: float


@dataclass(frozen=True)
class InferenceSample:
    """One measured inference. split is None for a single-node run."""

    split: Split | None
    compute_edge_s: float
    compute_fog_s: float
    compute_cloud_s: float
    energy_edge_j: float
    energy_fog_j: float
    energy_cloud_j: float
    transfer_ef_s: float
    transfer_fc_s: float
    latency_s: float
    timestamp_s: float

    @property
    def energy_total_j(self) -> float:
        return self.energy_edge_j + self.energy_fog_j + self.energy_cloud_j


def estimate_split(
    split: Split,
    profile: ModelProfile,
    rates: NodeRates,
    link_ef: LinkModel,
    link_fc: LinkModel,
) -> SplitEstimate:
    """Predict end-to-end latency and per-node energy for one cut pair.

    The pipeline is sequential: edge compute, edge-to-fog transfer of the
    activation at boundary i, fog compute, fog-to-cloud transfer at boundary
    j, cloud compute (including the head). Latency is the plain sum.
    """
    validate_split(split, profile.n_features)
    w_edge, w_fog, w_cloud = profile.weight_shares(split.i, split.j)
    t_edge = rates.sigma_edge * w_edge
    t_fog = rates.sigma_fog * w_fog
    t_cloud = rates.sigma_cloud * w_cloud
    t_ef = predict_transfer_time(link_ef, profile.activation_bytes[split.i])
    t_fc = predict_transfer_time(link_fc, profile.activation_bytes[split.j])
    latency = t_edge + t_fog + t_cloud + t_ef + t_fc
    e_edge = rates.p_edge * t_edge
    e_fog = rates.rho_fog * t_fog
    e_cloud = rates.rho_cloud * t_cloud
    return SplitEstimate(
        split=split,
        latency_s=latency,
        energy_edge_j=e_edge,
        energy_fog_j=e_fog,
        energy_cloud_j=e_cloud,
        energy_total_j=e_edge + e_fog + e_cloud,
        compute_edge_s=t_edge,
        compute_fog_s=t_fog,
        compute_cloud_s=t_cloud,
        transfer_ef_s=t_ef,
        transfer_fc_s=t_fc,
    )


def fit_rates(
    samples: Iterable[InferenceSample],
    profile: ModelProfile,
    p_edge: float = EDGE_POWER_MODEL_W,
) -> NodeRates:
    """Fit per-node rates from measured samples.

    sigma is the least-squares slope through the origin of compute time
    against weight share, pooled over all samples that place any weight on
    the node. rho (fog and cloud) is total measured energy divided by total
    compute time over the samples where the node actually ran. The edge power
    model is configuration, not measurement, so it passes through unchanged.
    """
    samples = list(samples)
    if not samples:
        raise RateFitCoverageError("edge", "no samples to fit from")
    tw = [0.0, 0.0, 0.0]
    ww = [0.0, 0.0, 0.0]
    e_sum = [0.0, 0.0, 0.0]
    t_sum = [0.0, 0.0, 0.0]
    for sample in samples:
        if sample.split is None:
            raise InvalidSplitError(
                "rate fitting requires split inference samples; got a "
                "single-node sample"
            )
        shares = profile.weight_shares(sample.split.i, sample.split.j)
        times = (sample.compute_edge_s, sample.compute_fog_s, sample.compute_cloud_s)
        energies = (sample.energy_edge_j, sample.energy_fog_j, sample.energy_cloud_j)
        for k in range(3):
            tw[k] += times[k] * shares[k]
            ww[k] += shares[k] * shares[k]
            if times[k] > 0.0:
                e_sum[k] += energies[k]
                t_sum[k] += times[k]
    sigma = []
    for k, node in enumerate(NODE_NAMES):
        if ww[k] == 0.0:
            raise RateFitCoverageError(
                node, "no sample places any weight share on this node"
            )
        value = tw[k] / ww[k]
        if not value > 0.0:
            raise RateFitCoverageError(
                node, f"fitted rate is not positive ({value!r})"
            )
        sigma.append(value)
    rho = []
    for k, node in ((1, "fog"), (2, "cloud")):
        if t_sum[k] == 0.0:
            raise RateFitCoverageError(
                node, "no sample with positive compute time on this node"
            )
        rho.append(e_sum[k] / t_sum[k])
    return NodeRates(
        sigma_edge=sigma[0],
        sigma_fog=sigma[1],
        sigma_cloud=sigma[2],
        rho_fog=rho[0],
        rho_cloud=rho[1],
        p_edge=p_edge,
    )


def mean_latency(samples: Sequence[InferenceSample]) -> float:
    if not samples:
        raise ValueError("no samples")
    return sum(s.latency_s for s in samples) / len(samples)
