"""Weighted objective and exhaustive candidate search.

The objective blends edge energy, total energy, and latency, each normalized
by an anchor captured during startup so the three terms are dimensionless and
comparable. Candidate enumeration is exhaustive: the cut space is quadratic
in layer count and tiny in practice, so nothing cleverer is warranted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyCandidateSpaceError
from .estimator import NodeRates, Split, SplitEstimate, estimate_split
from .link import LinkModel
from .profiling import ModelProfile

#: Scores closer than this are treated as ties and broken lexicographically.
SCORE_TIE_EPS = 1e-12


@dataclass(frozen=True)
class ObjectiveSpec:
    """Weights, normalization anchors, and filters for the candidate search.

    baseline_score is the score of the measured startup baseline; candidates
    scoring worse are discarded. deadline_s > 0 additionally discards
    candidates whose estimated latency exceeds it.
    """

    w_edge: float = 0.7
    w_total: float = 0.2
    w_latency: float = 0.1
    anchor_edge_j: float = 1.0
    anchor_total_j: float = 1.0
    anchor_latency_s: float = 1.0
    baseline_score: float = math.inf
    deadline_s: float = 0.0
    min_edge_layers: int = 1

    def __post_init__(self):
        for label in ("w_edge", "w_total", "w_latency"):
            if not getattr(self, label) >= 0.0:
                raise ValueError(f"{label} must be >= 0")
        if self.w_edge + self.w_total + self.w_latency <= 0.0:
            raise ValueError("at least one objective weight must be positive")
        for label in ("anchor_edge_j", "anchor_total_j", "anchor_latency_s"):
            if not getattr(self, label) > 0.0:
                raise ValueError(f"{label} must be > 0")
        if self.deadline_s < 0.0:
            raise ValueError("deadline_s must be >= 0 (0 disables the deadline)")
        if self.min_edge_layers < 1:
            raise ValueError("min_edge_layers must be >= 1")


def score(estimate: SplitEstimate, spec: ObjectiveSpec) -> float:
    """Weighted sum of anchor-normalized edge energy, total energy, latency."""
    return (
        spec.w_edge * (estimate.energy_edge_j / spec.anchor_edge_j)
        + spec.w_total * (estimate.energy_total_j / spec.anchor_total_j)
        + spec.w_latency * (estimate.latency_s / spec.anchor_latency_s)
    )


def enumerate_candidates(
    n_features: int, min_edge_layers: int = 1, current: Split | None = None
) -> list[Split]:
    """All valid cut pairs in lexicographic order, excluding `current`.

    Valid means min_edge_layers-1 <= i < j < n_features: at least the
    required layers on the edge, at least one on the fog, and the head (plus
    any remaining layers) on the cloud.
    """
    if min_edge_layers < 1:
        raise ValueError("min_edge_layers must be >= 1")
    lo = min_edge_layers - 1
    pairs = [
        Split(i, j)
        for i in range(lo, n_features - 1)
        for j in range(i + 1, n_features)
    ]
    if not pairs:
        raise EmptyCandidateSpaceError(
            f"no valid cut pair with {n_features} feature layers and "
            f"min_edge_layers={min_edge_layers}"
        )
    if current is not None:
        pairs = [p for p in pairs if p != current]
    return pairs


def find_best(
    profile: ModelProfile,
    rates: NodeRates,
    link_ef: LinkModel,
    link_fc: LinkModel,
    spec: ObjectiveSpec,
    current: Split | None = None,
) -> Split | None:
    """Best-scoring candidate that survives the deadline and baseline filters.

    Returns None when every candidate is filtered out; the caller treats that
    as "no better option than what it already has". Enumeration order plus a
    strict improvement threshold makes ties resolve to the lexicographically
    smallest pair.
    """
    best: Split | None = None
    best_score = math.inf
    for candidate in enumerate_candidates(
        profile.n_features, spec.min_edge_layers, current
    ):
        estimate = estimate_split(candidate, profile, rates, link_ef, link_fc)
        if spec.deadline_s > 0.0 and estimate.latency_s > spec.deadline_s:
            continue
        value = score(estimate, spec)
        if value > spec.baseline_score:
            continue
        if value < best_score - SCORE_TIE_EPS:
            best = candidate
            best_score = value
    return best
