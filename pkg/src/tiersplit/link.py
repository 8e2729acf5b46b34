"""Two-parameter link model and its two-point probe.

A hop is summarized by a fixed per-message overhead omega (seconds) and a
throughput beta (bytes/second): rtt(s) = omega + s / beta. The probe measures
mean round-trip times at a small and a large payload and solves the two-point
system for (omega, beta). A probe that is not size-monotone cannot be solved
and keeps the previous model rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Protocol

from .errors import LinkProbeTransportError, TransportError

#: Fallback throughput before any successful probe: 1 MiB/s.
UNFITTED_BETA = 1024.0 * 1024.0


@dataclass(frozen=True)
class LinkModel:
    omega: float
    beta: float
    fitted: bool = True

    def __post_init__(self):
        if not self.omega >= 0.0:
            raise ValueError(f"omega must be >= 0, got {self.omega!r}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")

    def predict(self, payload_bytes: float) -> float:
        return predict_transfer_time(self, payload_bytes)


@dataclass(frozen=True)
class ProbeConfig:
    size_small: int = 1024
    size_large: int = 1024 * 1024
    repeats: int = 5

    def __post_init__(self):
        if self.size_small <= 0:
            raise ValueError("size_small must be positive")
        if self.size_large <= self.size_small:
            raise ValueError("size_large must exceed size_small")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


DEFAULT_PROBE_CONFIG = ProbeConfig()


def initial_link_model() -> LinkModel:
    """Conservative stand-in used before the first successful probe."""
    return LinkModel(omega=0.0, beta=UNFITTED_BETA, fitted=False)


def predict_transfer_time(model: LinkModel, payload_bytes: float) -> float:
    if payload_bytes < 0:
        raise ValueError(f"payload must be >= 0, got {payload_bytes!r}")
    return model.omega + payload_bytes / model.beta


def fit_link_model(
    size_small: int,
    size_large: int,
    mean_rtt_small: float,
    mean_rtt_large: float,
    previous: LinkModel,
) -> LinkModel:
    """Solve the two-point system for (omega, beta).

    beta is the secant slope between the two payload sizes; omega is the
    residual intercept at the small size, clamped at zero since a negative
    overhead is meaningless. When the large payload did not take longer than
    the small one the measurement carries no usable slope, so the previous
    model is returned unchanged.
    """
    if size_large <= size_small:
        raise ValueError("size_large must exceed size_small")
    if mean_rtt_large <= mean_rtt_small:
        return previous
    beta = (size_large - size_small) / (mean_rtt_large - mean_rtt_small)
    omega = max(0.0, mean_rtt_small - size_small / beta)
    return LinkModel(omega=omega, beta=beta, fitted=True)


class Hop(Protocol):
    """Round-trip capable transport endpoint."""

    @property
    def name(self) -> str: ...

    def rtt(self, payload_bytes: int) -> float:
        """Measure one round trip; may raise TransportError on failure."""


def probe_link(hop: Hop, config: ProbeConfig, previous: LinkModel) -> LinkModel:
    """Probe one hop and refit its model.

    Each payload size is measured `repeats` times and averaged. Individual
    failed attempts are tolerated as long as at least one repeat per size
    succeeds; if every repeat for a size fails the probe is unusable and
    raises, naming the hop.
    """
    means: list[float] = []
    for size in (config.size_small, config.size_large):
        samples: list[float] = []
        for _ in range(config.repeats):
            try:
                samples.append(hop.rtt(size))
            except TransportError:
                continue
        if not samples:
            raise LinkProbeTransportError(getattr(hop, "name", repr(hop)), size)
        means.append(fmean(samples))
    return fit_link_model(
        config.size_small, config.size_large, means[0], means[1], previous
    )
