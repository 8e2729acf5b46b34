#!/usr/bin/env python3
"""Run the three CNN-shaped bundled scenarios in compare mode and write
their reports under out/<name>/."""

from __future__ import annotations

import sys
from pathlib import Path

from tiersplit import (
    CNN_SCENARIOS,
    bundled_scenario,
    emit_reports,
    format_comparison,
    run_experiment,
)


def main() -> int:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    for name in CNN_SCENARIOS:
        report = run_experiment(bundled_scenario(name))
        sys.stdout.write(format_comparison(report))
        for path in emit_reports(report, out_root / name):
            print(f"wrote {path}")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
