import csv
import json
import math
import statistics

import pytest

from smartfog.centrality import CentralityMode
from smartfog.cli import main
from smartfog.decision import AreaType
from smartfog.errors import ConfigurationError
from smartfog.harness import (
    RESULT_COLUMNS,
    TIMING_COLUMNS,
    ExperimentConfig,
    run_experiment,
    run_smartfog_pipeline,
    summarize,
    timing_medians,
    timing_report,
)
from smartfog.overlay import build_overlay
from smartfog.simulation import Mode, WorkloadSpec


def tiny_config(out_dir, **overrides):
    config = ExperimentConfig(
        sizes=(6, 8),
        replications=2,
        seed_base=50,
        out_dir=str(out_dir),
        jobs=1,
        workload=WorkloadSpec(
            duration_s=40.0, warmup_s=2.0, spa_interval_s=8.0, pc_interval_s=10.0
        ),
    )
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestExperimentConfig:
    def test_defaults_validate(self):
        ExperimentConfig().validate()

    def test_from_dict_overrides(self):
        config = ExperimentConfig.from_dict(
            {
                "sizes": [10, 12],
                "modes": ["smartfog"],
                "replications": 3,
                "seed_base": 7,
                "areas": ["memory", "compute"],
                "k": 3,
                "workload": {"duration_s": 30.0, "spa_interval_s": 5.0},
                "overlay": {"mean_degree": 2.5},
            }
        )
        assert config.sizes == (10, 12)
        assert config.modes == (Mode.SMARTFOG,)
        assert config.areas == (AreaType.MEMORY_OPTIMIZED, AreaType.COMPUTE_OPTIMIZED)
        assert config.k == 3
        assert config.workload.duration_s == 30.0
        assert config.overlay_params.mean_degree == 2.5

    def test_unknown_fields_rejected(self):
        with pytest.raises(ConfigurationError, match="unknown config field"):
            ExperimentConfig.from_dict({"sices": [10]})
        with pytest.raises(ConfigurationError, match="unknown workload field"):
            ExperimentConfig.from_dict({"workload": {"durationz": 1}})
        with pytest.raises(ConfigurationError, match="unknown overlay field"):
            ExperimentConfig.from_dict({"overlay": {"degree": 3}})

    def test_validation_errors(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(sizes=()).validate()
        with pytest.raises(ConfigurationError):
            ExperimentConfig(replications=0).validate()
        with pytest.raises(ConfigurationError):
            ExperimentConfig(k=0).validate()
        with pytest.raises(ConfigurationError):
            ExperimentConfig(jobs=0).validate()

    def test_from_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"replications": 5}))
        assert ExperimentConfig.from_file(path).replications == 5
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_file(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_file(bad)


class TestPipeline:
    def test_stages_and_outputs(self):
        ov = build_overlay(15, seed=3)
        assignment, areas, timings, scores = run_smartfog_pipeline(
            ov, (AreaType.COMPUTE_OPTIMIZED, AreaType.MEMORY_OPTIMIZED), 2, None, 3
        )
        assert len(assignment.gateways) == 2
        assert len(areas) == 2
        assert scores.mode is CentralityMode.WEIGHTED_BY_LATENCY
        for value in (
            timings.betweenness_ms,
            timings.sorting_decision_ms,
            timings.clustering_ms,
        ):
            assert value >= 0.0

    def test_deterministic_outputs(self):
        ov = build_overlay(15, seed=3)
        args = (ov, (AreaType.COMPUTE_OPTIMIZED, AreaType.MEMORY_OPTIMIZED), 2, None, 3)
        a_assign, a_areas, _, _ = run_smartfog_pipeline(*args)
        b_assign, b_areas, _, _ = run_smartfog_pipeline(*args)
        assert a_assign == b_assign
        assert a_areas == b_areas


class TestRunExperiment:
    def test_writes_ordered_rows(self, tmp_path):
        config = tiny_config(tmp_path)
        results_path, summary_path = run_experiment(config)
        rows = read_csv(results_path)
        assert list(rows[0]) == list(RESULT_COLUMNS)
        assert len(rows) == 2 * 2 * 2  # sizes x modes x reps
        expected_order = [
            (str(size), mode.value, str(config.seed_base + rep))
            for size in config.sizes
            for mode in config.modes
            for rep in range(config.replications)
        ]
        got_order = [(r["n_devices"], r["mode"], r["seed"]) for r in rows]
        assert got_order == expected_order
        for row in rows:
            assert float(row["spa_median_ms"]) > 0
            assert int(row["network_load_bytes"]) > 0
            assert int(row["completed"]) > 0
        summary = read_csv(summary_path)
        assert len(summary) == 4  # (mode, size) cells
        assert {r["mode"] for r in summary} == {"smartfog", "unoptimized"}

    def test_rerun_byte_identical(self, tmp_path):
        config_a = tiny_config(tmp_path / "a")
        config_b = tiny_config(tmp_path / "b")
        res_a, sum_a = run_experiment(config_a)
        res_b, sum_b = run_experiment(config_b)
        assert res_a.read_bytes() == res_b.read_bytes()
        assert sum_a.read_bytes() == sum_b.read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        serial = run_experiment(tiny_config(tmp_path / "serial", jobs=1))
        parallel = run_experiment(tiny_config(tmp_path / "parallel", jobs=2))
        assert serial[0].read_bytes() == parallel[0].read_bytes()

    def test_summarize_aggregates(self):
        rows = [
            {
                "mode": "smartfog",
                "n_devices": 10,
                "seed": s,
                "spa_median_ms": float(100 + s),
                "spa_stddev": 1.0,
                "pc_median_ms": 200.0,
                "pc_stddev": 1.0,
                "network_load_bytes": 1000 * (s + 1),
                "completed": 50,
                "dropped": 0,
            }
            for s in range(3)
        ]
        (cell,) = summarize(rows)
        assert cell["spa_median_ms"] == 101.0
        assert cell["network_load_median_bytes"] == 2000
        assert cell["completed_total"] == 150
        assert cell["spa_stddev"] == pytest.approx(statistics.stdev([100.0, 101.0, 102.0]))

    def test_nan_free_summary_for_degenerate_cells(self):
        # a cell whose every replication produced no delay samples
        rows = [
            {
                "mode": "unoptimized",
                "n_devices": 4,
                "seed": 0,
                "spa_median_ms": math.nan,
                "spa_stddev": math.nan,
                "pc_median_ms": math.nan,
                "pc_stddev": math.nan,
                "network_load_bytes": 0,
                "completed": 0,
                "dropped": 0,
            }
        ]
        (cell,) = summarize(rows)
        assert math.isnan(cell["spa_median_ms"])
        assert cell["completed_total"] == 0


class TestTimingReport:
    def test_files_and_medians(self, tmp_path):
        config = tiny_config(tmp_path, sizes=(6, 10), replications=3)
        timing_path, summary_path = timing_report(config)
        rows = read_csv(timing_path)
        assert list(rows[0]) == list(TIMING_COLUMNS)
        assert len(rows) == 6
        medians = timing_medians(timing_path)
        assert set(medians) == {6, 10}
        for cell in medians.values():
            for stage in ("betweenness_ms", "sorting_decision_ms", "clustering_ms"):
                assert cell[stage] >= 0.0
        summary = read_csv(summary_path)
        assert [r["n_devices"] for r in summary] == ["6", "10"]


class TestCli:
    def test_simulate_with_flags(self, tmp_path):
        out = tmp_path / "results"
        code = main(
            [
                "simulate",
                "--sizes",
                "6",
                "--modes",
                "smartfog,unoptimized",
                "--reps",
                "1",
                "--seed",
                "77",
                "--out",
                str(out),
                "--jobs",
                "1",
                "--config",
                str(self.write_config(tmp_path)),
            ]
        )
        assert code == 0
        rows = read_csv(out / "results.csv")
        assert [r["seed"] for r in rows] == ["77", "77"]
        assert (out / "summary.csv").exists()

    @staticmethod
    def write_config(tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(
            json.dumps({"workload": {"duration_s": 30.0, "warmup_s": 1.0}})
        )
        return path

    def test_simulate_timing_only(self, tmp_path):
        out = tmp_path / "timing"
        code = main(
            [
                "simulate",
                "--timing-only",
                "--sizes",
                "6",
                "--reps",
                "2",
                "--seed",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (out / "timing.csv").exists()
        assert (out / "timing_summary.csv").exists()

    def test_timing_subcommand(self, tmp_path):
        out = tmp_path / "t"
        assert main(["timing", "--sizes", "6", "--reps", "2", "--out", str(out)]) == 0
        assert len(read_csv(out / "timing.csv")) == 2

    def test_cluster_subcommand(self, tmp_path):
        out = tmp_path / "areas.json"
        code = main(
            ["cluster", "--n", "10", "--seed", "4", "--k", "2", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc) == 2
        assert {rec["area_type"] for rec in doc} == {"compute", "memory"}

    def test_select_subcommand_stdout(self, capsys):
        assert main(["select", "--n", "8", "--seed", "2"]) == 0
        doc = json.loads(capsys.readouterr().out.strip())
        assert [rec["area_type"] for rec in doc] == ["compute", "memory"]
        gateways = [rec["gateway"] for rec in doc]
        assert len(set(gateways)) == 2

    def test_select_deterministic_output(self, tmp_path):
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        main(["select", "--n", "8", "--seed", "2", "--out", str(out_a)])
        main(["select", "--n", "8", "--seed", "2", "--out", str(out_b)])
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_error_exit_code(self, tmp_path):
        # k larger than the non-gateway pool -> CapacityError -> exit 2
        assert main(["cluster", "--n", "3", "--seed", "0", "--k", "2"]) == 2
        # invalid sweep config -> exit 2
        assert (
            main(["simulate", "--sizes", "1", "--reps", "1", "--out", str(tmp_path)])
            == 2
        )
