"""Command line entry point.

Subcommands:

  run          execute a scenario in its configured mode
  compare      execute a scenario in compare mode (all five strategies)
  probe-model  show a model profile summary
  validate     check a scenario file without running it

Exit codes: 0 success, 1 invalid input (scenario, profile, fixture name, or
budget), 2 runtime failure.

Scenario arguments accept either a file path or the name of a bundled
scenario.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import (
    BudgetError,
    InvalidModelError,
    ProfileFormatError,
    ScenarioError,
    TierSplitError,
    UnknownFixtureError,
)
from .fixtures import BUNDLED_SCENARIOS, bundled_scenario
from .harness import (
    ScenarioConfig,
    emit_reports,
    format_comparison,
    load_scenario,
    run_experiment,
)
from .profiling import PRESET_PROFILES, load_profile, preset_profile

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

_VALIDATION_ERRORS = (
    ScenarioError,
    BudgetError,
    UnknownFixtureError,
    ProfileFormatError,
    InvalidModelError,
)


def _resolve_scenario(arg: str) -> ScenarioConfig:
    path = Path(arg)
    if path.exists():
        return load_scenario(path)
    if arg in BUNDLED_SCENARIOS:
        return bundled_scenario(arg)
    raise UnknownFixtureError(
        f"{arg!r} is neither a scenario file nor a bundled scenario "
        f"(bundled: {', '.join(BUNDLED_SCENARIOS)})"
    )


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    experiment = config.experiment
    if getattr(args, "mode", None):
        experiment = replace(experiment, mode=args.mode)
    if args.seed is not None:
        experiment = replace(experiment, seed=args.seed)
    if args.repetitions is not None:
        experiment = replace(experiment, repetitions=args.repetitions)
    scheduler = config.scheduler
    if args.budget is not None:
        experiment = replace(experiment, budget=args.budget)
        scheduler = replace(scheduler, total_budget=args.budget)
        if args.budget < scheduler.phase1_minimum:
            raise BudgetError(
                f"budget {args.budget} is below the phase-1 minimum "
                f"{scheduler.phase1_minimum}"
            )
    return replace(config, experiment=experiment, scheduler=scheduler)


def _print_report(config: ScenarioConfig, report, out: str | None) -> None:
    for w in report.windows:
        arrow = (
            f" -> ({w.split_after.i},{w.split_after.j})"
            if w.split_after != w.split
            else ""
        )
        print(
            f"window {w.window_index}: split ({w.split.i},{w.split.j}){arrow}  "
            f"latency {w.mean_latency_s * 1000.0:.6g} ms  "
            f"energy {w.mean_energy_total_j:.6g} J  {w.decision.value}"
        )
    sys.stdout.write(format_comparison(report))
    if out is not None:
        for path in emit_reports(report, out):
            print(f"wrote {path}")


def _cmd_run(args) -> int:
    config = _apply_overrides(_resolve_scenario(args.scenario), args)
    report = run_experiment(config)
    _print_report(config, report, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _apply_overrides(_resolve_scenario(args.scenario), args)
    config = replace(config, experiment=replace(config.experiment, mode="compare"))
    report = run_experiment(config)
    _print_report(config, report, args.out)
    return EXIT_OK


def _cmd_probe_model(args) -> int:
    if args.model in PRESET_PROFILES:
        profile = preset_profile(args.model)
    elif Path(args.model).exists():
        profile = load_profile(args.model)
    else:
        raise UnknownFixtureError(
            f"{args.model!r} is neither a profile file nor a preset "
            f"(presets: {', '.join(PRESET_PROFILES)})"
        )
    n = profile.n_features
    head_share = profile.compute_weights[-1]
    print(f"profile: {profile.name}")
    print(f"feature layers: {n}")
    print(f"head compute share: {head_share:.6g}")
    print(
        f"activation bytes: first {profile.activation_bytes[0]}, "
        f"last {profile.activation_bytes[-1]}, "
        f"min {min(profile.activation_bytes)}, "
        f"max {max(profile.activation_bytes)}"
    )
    if args.full:
        for i, (b, w) in enumerate(
            zip(profile.activation_bytes, profile.compute_weights)
        ):
            print(f"  layer {i:3d}  weight {w:.6g}  boundary bytes {b}")
        print(f"  head       weight {head_share:.6g}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _resolve_scenario(args.scenario)
    print(
        f"ok: {config.name} ({config.profile.n_features} feature layers, "
        f"mode {config.experiment.mode}, budget {config.experiment.budget}, "
        f"{config.experiment.repetitions} repetition(s))"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiersplit",
        description="Adaptive split placement for three-tier model inference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_args(p):
        p.add_argument("scenario", help="scenario file path or bundled scenario name")
        p.add_argument("--out", help="directory for CSV and text reports")
        p.add_argument("--seed", type=int, help="override the base seed")
        p.add_argument("--budget", type=int, help="override the inference budget")
        p.add_argument(
            "--repetitions", type=int, help="override the repetition count"
        )

    p_run = sub.add_parser("run", help="execute a scenario in its configured mode")
    add_run_args(p_run)
    p_run.add_argument(
        "--mode",
        choices=("adaptive", "static", "compare"),
        help="override the experiment mode",
    )
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run all strategies and compare them")
    add_run_args(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_probe = sub.add_parser("probe-model", help="show a model profile summary")
    p_probe.add_argument("model", help="profile file path or preset name")
    p_probe.add_argument(
        "--full", action="store_true", help="print the per-layer table"
    )
    p_probe.set_defaults(func=_cmd_probe_model)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except TierSplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # anything unforeseen is a runtime failure
        print(f"unexpected error: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
