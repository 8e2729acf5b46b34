"""Model descriptions and per-layer profiling.

A model is a chain of feature layers followed by a classifier head. Profiling
times each stage in isolation, normalizes the timings into relative compute
weights, and records the activation payload produced at every feature
boundary. The resulting profile is the sole model input every other component
consumes: nothing downstream ever needs the model itself.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

from .errors import (
    InvalidModelError,
    ProfileDegenerateError,
    ProfileFormatError,
    UnknownFixtureError,
)

#: |sum(W) - 1| tolerated on load; re-normalization is never done silently.
WEIGHT_SUM_TOLERANCE = 1e-9

DEFAULT_WARMUP_ROUNDS = 3

_DATA_DIR = Path(__file__).parent / "data"

PRESET_PROFILES = ("vgg16-like", "alexnet-like", "mobilenetv2-like")


@dataclass(frozen=True)
class LayerSpec:
    """One feature layer: how much work it does and how large its output is."""

    output_bytes: int
    compute_cost: float

    def __post_init__(self):
        if self.output_bytes <= 0:
            raise InvalidModelError(
                f"layer output must be positive, got {self.output_bytes}"
            )
        if self.compute_cost < 0:
            raise InvalidModelError(
                f"layer compute cost must be >= 0, got {self.compute_cost}"
            )


@dataclass(frozen=True)
class ModelDescriptor:
    """Static description of a partitionable model.

    Requires at least three feature layers; with fewer there is no cut pair
    that leaves at least one layer on every node.
    """

    name: str
    feature_layers: tuple[LayerSpec, ...]
    head_compute_cost: float

    def __post_init__(self):
        object.__setattr__(self, "feature_layers", tuple(self.feature_layers))
        if len(self.feature_layers) < 3:
            raise InvalidModelError(
                f"model {self.name!r} has {len(self.feature_layers)} feature "
                "layers; need at least 3 to place a cut pair"
            )
        if self.head_compute_cost <= 0:
            raise InvalidModelError("head compute cost must be positive")

    @property
    def n_features(self) -> int:
        return len(self.feature_layers)


@dataclass(frozen=True)
class ModelProfile:
    """Measured profile: weights for N feature layers plus the head, and the
    activation payload in bytes at each feature boundary.

    len(compute_weights) == len(activation_bytes) + 1 (the extra entry is the
    head). Weights are nonnegative and sum to 1 within 1e-9.
    """

    name: str
    activation_bytes: tuple[int, ...]
    compute_weights: tuple[float, ...]
    _cum_weights: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "activation_bytes", tuple(self.activation_bytes))
        object.__setattr__(self, "compute_weights", tuple(self.compute_weights))
        b, w = self.activation_bytes, self.compute_weights
        if len(w) != len(b) + 1:
            raise ProfileFormatError(
                f"profile {self.name!r}: expected len(compute_weights) == "
                f"len(activation_bytes) + 1, got {len(w)} and {len(b)}"
            )
        if len(b) < 1:
            raise ProfileFormatError(f"profile {self.name!r}: no feature layers")
        for k, size in enumerate(b):
            if not isinstance(size, int) or size < 1:
                raise ProfileFormatError(
                    f"profile {self.name!r}: activation_bytes[{k}] must be an "
                    f"integer >= 1, got {size!r}"
                )
        for k, weight in enumerate(w):
            if not weight >= 0.0:
                raise ProfileFormatError(
                    f"profile {self.name!r}: compute_weights[{k}] must be >= 0, "
                    f"got {weight!r}"
                )
        total = sum(w)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ProfileFormatError(
                f"profile {self.name!r}: compute_weights sum to {total!r}, "
                f"expected 1 within {WEIGHT_SUM_TOLERANCE}"
            )
        cum = tuple(itertools.accumulate(w, initial=0.0))
        object.__setattr__(self, "_cum_weights", cum)

    @property
    def n_features(self) -> int:
        return len(self.activation_bytes)

    def weight_shares(self, i: int, j: int) -> tuple[float, float, float]:
        """Fraction of total work on each node for the cut pair (i, j).

        Edge runs layers 0..i, fog runs i+1..j, cloud runs the rest plus the
        head. The three shares partition sum(W) exactly.
        """
        cum = self._cum_weights
        w_edge = cum[i + 1]
        w_fog = cum[j + 1] - cum[i + 1]
        w_cloud = cum[-1] - cum[j + 1]
        return w_edge, w_fog, w_cloud


class LayerExecutor(Protocol):
    """Timing oracle used by profile_model.

    Implementations run individual stages of a model and report elapsed time
    (seconds) per stage and the output payload of each feature layer.
    """

    @property
    def n_features(self) -> int: ...

    def run_full(self) -> None:
        """One full end-to-end pass; used only for warmup."""

    def run_feature(self, index: int) -> tuple[float, int]:
        """Run feature layer `index`; return (elapsed_s, output_bytes)."""

    def run_head(self) -> float:
        """Run the classifier head; return elapsed seconds."""


class DescriptorExecutor:
    """Deterministic executor backed by a ModelDescriptor.

    Stage time is compute_cost * seconds_per_unit. Exists for tests and
    synthetic studies; real hardware execution is out of scope here.
    """

    def __init__(self, descriptor: ModelDescriptor, seconds_per_unit: float = 1e-3):
        if seconds_per_unit <= 0:
            raise ValueError("seconds_per_unit must be positive")
        self._descriptor = descriptor
        self._spu = seconds_per_unit
        self.full_runs = 0

    @property
    def n_features(self) -> int:
        return self._descriptor.n_features

    def run_full(self) -> None:
        self.full_runs += 1

    def run_feature(self, index: int) -> tuple[float, int]:
        layer = self._descriptor.feature_layers[index]
        return layer.compute_cost * self._spu, layer.output_bytes

    def run_head(self) -> float:
        return self._descriptor.head_compute_cost * self._spu


def profile_model(
    executor: LayerExecutor,
    name: str = "profiled-model",
    warmup_rounds: int = DEFAULT_WARMUP_ROUNDS,
) -> ModelProfile:
    """Profile a model stage by stage.

    Runs `warmup_rounds` full passes first so caches and lazy initialization
    do not pollute the per-stage timings, then times each feature layer and
    the head once, normalizes timings into weights, and collects activation
    payloads.
    """
    n = executor.n_features
    if n < 1:
        raise InvalidModelError("executor reports no feature layers")
    if warmup_rounds < 0:
        raise ValueError("warmup_rounds must be >= 0")
    for _ in range(warmup_rounds):
        executor.run_full()
    timings: list[float] = []
    payloads: list[int] = []
    for index in range(n):
        elapsed, out_bytes = executor.run_feature(index)
        if elapsed < 0:
            raise ProfileDegenerateError(f"negative timing at layer {index}")
        timings.append(elapsed)
        payloads.append(int(out_bytes))
    timings.append(executor.run_head())
    total = sum(timings)
    if total <= 0.0:
        raise ProfileDegenerateError(
            "total measured runtime is zero; cannot normalize weights"
        )
    weights = tuple(t / total for t in timings)
    return ModelProfile(
        name=name, activation_bytes=tuple(payloads), compute_weights=weights
    )


def _as_mapping(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ProfileFormatError(f"{where}: expected an object, got {type(doc).__name__}")
    return doc


def profile_from_dict(doc: dict, where: str = "profile") -> ModelProfile:
    """Build a ModelProfile from a parsed document, rejecting unknown keys."""
    doc = _as_mapping(doc, where)
    allowed = {"name", "activation_bytes", "compute_weights", "note"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ProfileFormatError(
            f"{where}: unknown key(s) {unknown}; accepted keys are {sorted(allowed)}"
        )
    for key in ("name", "activation_bytes", "compute_weights"):
        if key not in doc:
            raise ProfileFormatError(f"{where}.{key}: required key missing")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ProfileFormatError(f"{where}.name: expected a non-empty string")
    raw_bytes = doc["activation_bytes"]
    raw_weights = doc["compute_weights"]
    if not isinstance(raw_bytes, list):
        raise ProfileFormatError(f"{where}.activation_bytes: expected a list")
    if not isinstance(raw_weights, list):
        raise ProfileFormatError(f"{where}.compute_weights: expected a list")
    for k, v in enumerate(raw_bytes):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ProfileFormatError(
                f"{where}.activation_bytes[{k}]: expected an integer, got {v!r}"
            )
    weights: list[float] = []
    for k, v in enumerate(raw_weights):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProfileFormatError(
                f"{where}.compute_weights[{k}]: expected a number, got {v!r}"
            )
        weights.append(float(v))
    try:
        return ModelProfile(
            name=name,
            activation_bytes=tuple(raw_bytes),
            compute_weights=tuple(weights),
        )
    except ProfileFormatError as exc:
        raise ProfileFormatError(f"{where}: {exc}") from exc


def load_profile(path: str | Path) -> ModelProfile:
    """Load a profile document from disk.

    Parse errors carry the line and column from the JSON decoder; semantic
    violations name the offending field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProfileFormatError(f"{path}: cannot read profile: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    return profile_from_dict(doc, where=str(path))


def preset_profile(name: str) -> ModelProfile:
    """Load one of the shipped profiles by name."""
    if name not in PRESET_PROFILES:
        raise UnknownFixtureError(
            f"unknown preset profile {name!r}; available: {list(PRESET_PROFILES)}"
        )
    return load_profile(_DATA_DIR / "profiles" / f"{name}.json")


def descriptor_to_profile(
    descriptor: ModelDescriptor, seconds_per_unit: float = 1e-3
) -> ModelProfile:
    """Shortcut: profile a descriptor through its deterministic executor."""
    executor = DescriptorExecutor(descriptor, seconds_per_unit)
    return profile_model(executor, name=descriptor.name)


def weights_from_costs(costs: Sequence[float]) -> tuple[float, ...]:
    """Normalize raw stage costs into weights; fails on a zero total."""
    total = sum(costs)
    if total <= 0:
        raise ProfileDegenerateError("total cost is zero; cannot normalize")
    return tuple(c / total for c in costs)
