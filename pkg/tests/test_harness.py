import copy
import json

import pytest

from tiersplit.errors import BudgetError, ScenarioError
from tiersplit.harness import (
    COMPARISON_NOTE,
    STRATEGY_SEED_OFFSETS,
    SUMMARY_CSV_HEADER,
    WINDOWS_CSV_HEADER,
    ComparisonReport,
    StrategyStats,
    build_environment,
    emit_reports,
    evaluate_expectations,
    format_comparison,
    load_scenario,
    reduction_fraction,
    run_experiment,
)

BASE_DOC = {
    "name": "mini",
    "profile": {
        "name": "mini-net",
        "compute_weights": [0.3, 0.3, 0.2, 0.1, 0.1],
        "activation_bytes": [40000, 30000, 20000, 10000],
    },
    "nodes": {
        "edge": {"sigma_s_per_share": 0.05, "power_w": 12.0},
        "fog": {"sigma_s_per_share": 0.01, "power_w": 15.0},
        "cloud": {"sigma_s_per_share": 0.002, "power_w": 30.0},
    },
    "hops": {
        "edge-fog": {"omega_s": 0.001, "beta_bytes_per_s": 1e7},
        "fog-cloud": {"omega_s": 0.001, "beta_bytes_per_s": 5e7},
    },
    "noise": {"sigma": 0.0},
    "scheduler": {
        "initial_split": [1, 2],
        "baseline_runs": 6,
        "probe_runs": 3,
        "steady_runs": 8,
        "warmup_runs": 1,
    },
    "experiment": {"mode": "compare", "budget": 40, "repetitions": 2, "seed": 3},
    "expect": ["adaptive-energy-below-static", "adaptive-latency-within-5pct"],
}


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def variant(**edits):
    doc = copy.deepcopy(BASE_DOC)
    for dotted, value in edits.items():
        keys = dotted.split("__")
        target = doc
        for key in keys[:-1]:
            target = target[key]
        if value is _DELETE:
            del target[keys[-1]]
        else:
            target[keys[-1]] = value
    return doc


_DELETE = object()


class TestLoader:
    def test_full_document_loads(self, tmp_path):
        config = load_scenario(write_scenario(tmp_path, BASE_DOC))
        assert config.name == "mini"
        assert config.profile.n_features == 4
        assert config.nodes["edge"].true_sigma == 0.05
        assert config.hops["fog-cloud"].true_beta == 5e7
        assert config.scheduler.initial_split.as_tuple() == (1, 2)
        assert config.scheduler.total_budget == 40
        assert config.experiment.repetitions == 2
        assert config.expect == (
            "adaptive-energy-below-static",
            "adaptive-latency-within-5pct",
        )

    def test_minimal_document_defaults(self, tmp_path):
        doc = variant(
            noise=_DELETE, experiment=_DELETE, expect=_DELETE,
            scheduler={"initial_split": [1, 2]},
        )
        config = load_scenario(write_scenario(tmp_path, doc))
        assert config.noise_sigma == 0.0
        assert config.experiment.mode == "compare"
        assert config.experiment.budget == 500
        assert config.scheduler.w_edge == 0.7
        assert config.scheduler.w_total == 0.2
        assert config.scheduler.w_latency == 0.1
        assert config.expect == ()

    def test_unknown_top_level_key(self, tmp_path):
        path = write_scenario(tmp_path, variant(devices=[1, 2]))
        with pytest.raises(ScenarioError, match=r"unknown key\(s\) devices.*accepted"):
            load_scenario(path)

    def test_missing_required_key(self, tmp_path):
        path = write_scenario(tmp_path, variant(hops=_DELETE))
        with pytest.raises(ScenarioError, match=r"missing required key\(s\).*hops"):
            load_scenario(path)

    def test_unknown_node_key_names_path(self, tmp_path):
        doc = variant()
        doc["nodes"]["edge"]["voltage"] = 5.0
        path = write_scenario(tmp_path, doc)
        with pytest.raises(ScenarioError, match=r"scenario\.nodes\.edge.*voltage"):
            load_scenario(path)

    def test_bool_is_not_a_number(self, tmp_path):
        doc = variant(nodes__edge__power_w=True)
        with pytest.raises(ScenarioError, match="expected a number"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_bool_is_not_an_integer(self, tmp_path):
        doc = variant(experiment__budget=True)
        with pytest.raises(ScenarioError, match="expected an integer"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_trace_must_be_sorted(self, tmp_path):
        doc = variant()
        doc["hops"]["edge-fog"]["trace"] = [[5.0, 0.5], [3.0, 1.0]]
        with pytest.raises(ScenarioError, match="strictly increasing"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_trace_multiplier_must_be_positive(self, tmp_path):
        doc = variant()
        doc["nodes"]["edge"]["trace"] = [[5.0, 0.0]]
        with pytest.raises(ScenarioError, match="must be > 0"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_zero_weights_rejected(self, tmp_path):
        doc = variant(scheduler__weights=[0.0, 0.0, 0.0])
        with pytest.raises(ScenarioError, match="positive"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_unknown_expectation_listed(self, tmp_path):
        doc = variant(expect=["beats-cloud"])
        with pytest.raises(ScenarioError, match="beats-cloud.*accepted"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_budget_below_startup_minimum(self, tmp_path):
        doc = variant(experiment__budget=20)
        with pytest.raises(BudgetError, match="phase-1 minimum 23"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_reversed_initial_split(self, tmp_path):
        doc = variant(scheduler__initial_split=[3, 2])
        with pytest.raises(ScenarioError):
            load_scenario(write_scenario(tmp_path, doc))

    def test_invalid_json_reports_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"name": "x",')
        with pytest.raises(ScenarioError, match="invalid JSON"):
            load_scenario(path)

    def test_profile_by_relative_path(self, tmp_path):
        profile_doc = BASE_DOC["profile"]
        (tmp_path / "mini-net.json").write_text(json.dumps(profile_doc))
        doc = variant(profile="mini-net.json")
        config = load_scenario(write_scenario(tmp_path, doc))
        assert config.profile.name == "mini-net"
        assert config.profile.n_features == 4

    def test_negative_noise_rejected(self, tmp_path):
        doc = variant(noise={"sigma": -0.1})
        with pytest.raises(ScenarioError, match="noise"):
            load_scenario(write_scenario(tmp_path, doc))


class TestExecution:
    @pytest.fixture()
    def config(self, tmp_path):
        return load_scenario(write_scenario(tmp_path, BASE_DOC))

    def test_seed_offsets(self):
        assert STRATEGY_SEED_OFFSETS == {
            "static": 0,
            "adaptive": 1_000_000,
            "edge-only": 2_000_000,
            "fog-only": 3_000_000,
            "cloud-only": 4_000_000,
        }

    def test_build_environment_deterministic(self, config):
        split = config.scheduler.initial_split
        a = build_environment(config, 17).run_inference(split, config.profile)
        b = build_environment(config, 17).run_inference(split, config.profile)
        assert a == b

    def test_reduction_fraction(self):
        assert reduction_fraction(100.0, 80.0) == pytest.approx(0.2)
        assert reduction_fraction(50.0, 60.0) == pytest.approx(-0.2)
        with pytest.raises(ValueError):
            reduction_fraction(0.0, 1.0)

    def test_compare_produces_five_rows_in_order(self, config):
        report = run_experiment(config)
        assert [s.strategy for s in report.strategies] == [
            "static", "adaptive", "edge-only", "fog-only", "cloud-only",
        ]
        assert report.latency_reduction is not None
        assert report.energy_reduction is not None
        assert len(report.expectations) == 2
        assert report.windows  # repetition 0 ran at least one window
        assert report.strategy("adaptive").samples > 0

    def test_compare_is_deterministic(self, config):
        assert run_experiment(config) == run_experiment(config)

    def test_adaptive_mode_single_strategy(self, tmp_path):
        doc = variant(experiment__mode="adaptive")
        report = run_experiment(load_scenario(write_scenario(tmp_path, doc)))
        assert [s.strategy for s in report.strategies] == ["adaptive"]
        assert report.latency_reduction is None
        assert report.windows

    def test_static_mode_single_strategy(self, tmp_path):
        doc = variant(experiment__mode="static")
        report = run_experiment(load_scenario(write_scenario(tmp_path, doc)))
        assert [s.strategy for s in report.strategies] == ["static"]
        assert report.windows == ()

    def test_static_discards_warmup(self, config):
        report = run_experiment(config)
        expected = config.experiment.repetitions * (
            config.experiment.budget - config.scheduler.warmup_runs
        )
        assert report.strategy("static").samples == expected
        assert report.strategy("edge-only").samples == expected

    def test_evaluate_expectations(self):
        static = StrategyStats("static", 0.100, 1.0, 1.0, 1.0, 3.0, 10)
        better = StrategyStats("adaptive", 0.104, 0.5, 1.0, 1.0, 2.5, 10)
        worse = StrategyStats("adaptive", 0.120, 2.0, 1.0, 1.0, 4.0, 10)
        names = ("adaptive-energy-below-static", "adaptive-latency-within-5pct")
        assert evaluate_expectations(static, better, names) == (
            (names[0], True), (names[1], True),
        )
        assert evaluate_expectations(static, worse, names) == (
            (names[0], False), (names[1], False),
        )
        with pytest.raises(ValueError, match="beats-cloud"):
            evaluate_expectations(static, better, ("beats-cloud",))


class TestEmission:
    @pytest.fixture()
    def report(self, tmp_path):
        return run_experiment(load_scenario(write_scenario(tmp_path, BASE_DOC)))

    def test_files_written(self, report, tmp_path):
        out = tmp_path / "out"
        paths = emit_reports(report, out)
        names = {p.name for p in paths}
        assert names == {"summary.csv", "windows.csv", "comparison.txt"}
        assert all(p.parent == out for p in paths)

    def test_summary_csv_shape(self, report, tmp_path):
        emit_reports(report, tmp_path)
        lines = (tmp_path / "summary.csv").read_text().splitlines()
        assert lines[0] == SUMMARY_CSV_HEADER
        assert len(lines) == 1 + 5
        first = lines[1].split(",")
        assert first[0] == "static"
        float(first[1])  # every cell past the name parses as a number

    def test_windows_csv_shape(self, report, tmp_path):
        emit_reports(report, tmp_path)
        lines = (tmp_path / "windows.csv").read_text().splitlines()
        assert lines[0] == WINDOWS_CSV_HEADER
        assert len(lines) == 1 + len(report.windows)
        row = lines[1].split(",")
        assert row[0] == "0"
        assert row[-1] in {"stay", "normal-switch", "forced-switch", "fallback"}

    def test_comparison_text(self, report, tmp_path):
        emit_reports(report, tmp_path)
        text = (tmp_path / "comparison.txt").read_text()
        assert text == format_comparison(report)
        assert "latency reduction:" in text
        assert COMPARISON_NOTE in text
        assert "expect adaptive-energy-below-static:" in text

    def test_no_reduction_lines_without_comparison(self):
        solo = ComparisonReport(
            scenario="solo",
            strategies=(StrategyStats("static", 0.1, 1.0, 1.0, 1.0, 3.0, 5),),
            latency_reduction=None,
            energy_reduction=None,
            windows=(),
        )
        text = format_comparison(solo)
        assert "latency reduction" not in text
        assert COMPARISON_NOTE not in text

    def test_no_windows_csv_for_static_run(self, tmp_path):
        doc = variant(experiment__mode="static")
        report = run_experiment(load_scenario(write_scenario(tmp_path, doc)))
        out = tmp_path / "static-out"
        paths = emit_reports(report, out)
        assert {p.name for p in paths} == {"summary.csv"}
        assert not (out / "windows.csv").exists()
