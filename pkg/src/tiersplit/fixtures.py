"""Bundled scenarios and helpers for perturbing them.

Four scenarios ship with the package: three CNN-shaped workloads named
after the architecture family whose layer structure and measured rates they
mirror (vgg16, alexnet, mobilenetv2), and one synthetic workload
(adaptation) shaped so that a mid-run bandwidth drop makes the scheduler
move the first cut point off the edge.

The trace helpers return modified copies; scenario configs are never
mutated in place.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from .errors import UnknownFixtureError, UnknownHopError
from .harness import ScenarioConfig, load_scenario
from .simenv import HOP_NAMES, TIERS, Trace

_SCENARIO_DIR = Path(__file__).resolve().parent / "data" / "scenarios"

BUNDLED_SCENARIOS = ("vgg16", "alexnet", "mobilenetv2", "adaptation")
CNN_SCENARIOS = ("vgg16", "alexnet", "mobilenetv2")


def scenario_path(name: str) -> Path:
    if name not in BUNDLED_SCENARIOS:
        raise UnknownFixtureError(
            f"unknown scenario {name!r}; bundled: {', '.join(BUNDLED_SCENARIOS)}"
        )
    return _SCENARIO_DIR / f"{name}.json"


def bundled_scenario(name: str) -> ScenarioConfig:
    """Load one of the scenarios shipped with the package."""
    return load_scenario(scenario_path(name))


def with_node_trace(config: ScenarioConfig, tier: str, events: Trace) -> ScenarioConfig:
    """Copy of the scenario with a compute-rate trace on one node."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}, got {tier!r}")
    nodes = dict(config.nodes)
    nodes[tier] = replace(nodes[tier], trace=tuple(events))
    return replace(config, nodes=nodes)


def with_hop_trace(config: ScenarioConfig, hop_name: str, events: Trace) -> ScenarioConfig:
    """Copy of the scenario with a throughput trace on one hop."""
    if hop_name not in HOP_NAMES:
        raise UnknownHopError(
            f"unknown hop {hop_name!r}; available: {list(HOP_NAMES)}"
        )
    hops = dict(config.hops)
    hops[hop_name] = replace(hops[hop_name], trace=tuple(events))
    return replace(config, hops=hops)


def adaptation_scenario(
    drop_factor: float = 0.1, drop_at_s: float | None = None
) -> ScenarioConfig:
    """The adaptation scenario, optionally with the edge-fog link dropping
    to `drop_factor` of its bandwidth at virtual time `drop_at_s`."""
    if not drop_factor > 0.0:
        raise ValueError("drop_factor must be > 0")
    config = bundled_scenario("adaptation")
    if drop_at_s is None:
        return config
    return with_hop_trace(config, "edge-fog", ((drop_at_s, drop_factor),))
