#!/usr/bin/env python3
"""Show the scheduler reacting to a mid-run uplink bandwidth drop.

Two passes over the same seeded scenario: the first finds the virtual time
at which the second steady window starts, the second replays with the
edge-fog bandwidth dropping to 10% exactly there. The window log shows the
stable phase, the degraded window with its switch, and the recovery."""

from __future__ import annotations

import sys

from tiersplit import adaptation_scenario, build_environment
from tiersplit.harness import STRATEGY_SEED_OFFSETS
from tiersplit.scheduler import run as run_scheduler


def show(title: str, windows) -> None:
    print(title)
    for w in windows:
        arrow = (
            f" -> ({w.split_after.i},{w.split_after.j})"
            if w.split_after != w.split
            else ""
        )
        print(
            f"  window {w.window_index}: split ({w.split.i},{w.split.j}){arrow}  "
            f"latency {w.mean_latency_s * 1000:8.1f} ms  "
            f"uplink {w.link_ef.beta / 1e6:5.2f} MB/s  {w.decision.value}"
        )


def main() -> int:
    base = adaptation_scenario()
    seed = base.experiment.seed + STRATEGY_SEED_OFFSETS["adaptive"]

    first = run_scheduler(
        base.scheduler, base.profile, build_environment(base, seed)
    )
    show("undisturbed run:", first.windows)
    drop_at = first.windows[1].started_at_s

    dropped = adaptation_scenario(drop_factor=0.1, drop_at_s=drop_at)
    second = run_scheduler(
        dropped.scheduler, dropped.profile, build_environment(dropped, seed)
    )
    show(f"uplink drops to 10% at t={drop_at:.2f}s:", second.windows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
