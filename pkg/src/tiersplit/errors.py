"""Exception types shared across the package."""


class TierSplitError(Exception):
    """Base class for package-specific failures."""


class InvalidModelError(TierSplitError):
    """Model description is structurally unusable (no layers, or too few to cut)."""


class ProfileDegenerateError(TierSplitError):
    """Profiling measured zero total runtime, so weights cannot be normalized."""


class ProfileFormatError(TierSplitError):
    """A profile document violated the on-disk schema; message names the field."""


class UnknownFixtureError(TierSplitError):
    """Requested a preset profile or scenario name that is not shipped."""


class TransportError(TierSplitError):
    """A single transport attempt failed. Retryable at the probe level."""


class LinkProbeTransportError(TierSplitError):
    """Every repeat of a probe failed for one payload size on one hop."""

    def __init__(self, hop_name: str, size: int):
        super().__init__(
            f"all probe repeats failed on hop {hop_name!r} at payload {size} B"
        )
        self.hop_name = hop_name
        self.size = size


class InvalidSplitError(TierSplitError):
    """Cut pair violates the ordering or range constraints for the model."""


class RateFitCoverageError(TierSplitError):
    """Sample set cannot determine a rate for one node; never silently defaulted."""

    def __init__(self, node: str, reason: str):
        super().__init__(f"cannot fit rate for node {node!r}: {reason}")
        self.node = node


class EmptyCandidateSpaceError(TierSplitError):
    """No valid cut pair exists for the given layer count and edge minimum."""


class ProbeSpaceError(TierSplitError):
    """Fewer than three distinct valid splits exist, so probes cannot be placed."""


class InitializationError(TierSplitError):
    """Environment failure during scheduler startup; tagged with the phase."""

    def __init__(self, phase: str, cause: str):
        super().__init__(f"initialization failed in phase {phase}: {cause}")
        self.phase = phase


class WindowAbortedError(TierSplitError):
    """Environment failure inside a steady window; scheduler state is unchanged."""

    def __init__(self, window_index: int, cause: str):
        super().__init__(f"steady window {window_index} aborted: {cause}")
        self.window_index = window_index


class UnknownHopError(TierSplitError):
    """Requested a hop name the environment does not model."""


class ScenarioError(TierSplitError):
    """Scenario document failed to parse or validate; message carries the field path."""


class BudgetError(TierSplitError):
    """Inference budget too small for the configured phase structure."""
