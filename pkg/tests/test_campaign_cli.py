import csv
import filecmp
import json
from pathlib import Path

import numpy as np
import pytest

from oracles import oracle_dominates
from swarmfront.campaign import (
    compare_campaign,
    load_campaign,
    load_campaign_config,
    run_campaign,
    write_metrics,
)
from swarmfront.cli import main
from swarmfront.errors import ConfigurationError
from swarmfront.gvrp import generate_instance, write_instance
from swarmfront.metrics import averaged_hv, campaign_bounds


def write_config(path: Path, **overrides) -> Path:
    payload = {
        "instance": {
            "seed": 11, "d_total": 41, "n_stops": 3,
            "capacity": 100, "v_min": 1, "v_max": 50,
        },
        "algorithms": [
            {"name": "mo-etpso", "params": {"n_particles": 10, "memory_capacity": 100}},
            {"name": "nsga2", "params": {"mu": 6, "lambda_": 12}},
        ],
        "runs": 2,
        "max_iterations": 4,
        "base_seed": 5,
    }
    payload.update(overrides)
    config_path = path / "campaign.json"
    config_path.write_text(json.dumps(payload, indent=2))
    return config_path


def tree_files(root: Path):
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


class TestConfigParsing:
    def test_defaults(self, tmp_path):
        minimal = {
            "instance": {"seed": 1, "d_total": 10, "n_stops": 2,
                         "capacity": 10, "v_min": 1, "v_max": 5},
            "algorithms": [{"name": "nsga2"}],
        }
        path = tmp_path / "minimal.json"
        path.write_text(json.dumps(minimal))
        config = load_campaign_config(path)
        assert config.runs == 16
        assert config.max_iterations == 100
        assert config.base_seed == 0
        assert config.algorithms[0].label == "nsga2"

    def test_run_seeds_derived(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path))
        assert config.run_seeds == (5, 6)

    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ConfigurationError, match="unknown config keys"):
            load_campaign_config(write_config(tmp_path, extra=1))

    def test_unknown_algorithm(self, tmp_path):
        bad = write_config(tmp_path, algorithms=[{"name": "annealing"}])
        with pytest.raises(ConfigurationError, match="unknown algorithm"):
            load_campaign_config(bad)

    def test_unknown_parameter(self, tmp_path):
        bad = write_config(
            tmp_path, algorithms=[{"name": "nsga2", "params": {"swarm": 3}}]
        )
        with pytest.raises(ConfigurationError, match="no parameter"):
            load_campaign_config(bad)

    def test_reserved_parameter(self, tmp_path):
        bad = write_config(
            tmp_path, algorithms=[{"name": "nsga2", "params": {"seed": 3}}]
        )
        with pytest.raises(ConfigurationError, match="set by the campaign"):
            load_campaign_config(bad)

    def test_duplicate_labels(self, tmp_path):
        bad = write_config(
            tmp_path, algorithms=[{"name": "nsga2"}, {"name": "nsga2"}]
        )
        with pytest.raises(ConfigurationError, match="unique"):
            load_campaign_config(bad)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        with pytest.raises(ConfigurationError, match="line"):
            load_campaign_config(path)

    def test_relative_instance_path_resolves_to_config_dir(self, tmp_path):
        instance = generate_instance(seed=2, d_total=10, n_stops=2,
                                     capacity=10, v_min=1, v_max=5)
        write_instance(instance, tmp_path / "inst.json")
        config = load_campaign_config(write_config(tmp_path, instance="inst.json"))
        assert config.resolve_instance() == instance


class TestRunCampaign:
    def test_smallest_campaign_layout(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path, runs=1, max_iterations=1))
        out = tmp_path / "out"
        manifest = run_campaign(config, out)
        assert (out / "instance.json").is_file()
        assert (out / "manifest.json").is_file()
        assert (out / "timings.json").is_file()
        assert (out / "runs" / "mo-etpso" / "run_0.json").is_file()
        assert (out / "runs" / "nsga2" / "run_0.json").is_file()
        assert all(s["status"] == "completed" for s in manifest["run_status"])

    def test_manifest_resolves_all_parameters(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path, runs=1, max_iterations=1))
        manifest = run_campaign(config, tmp_path / "out")
        etpso_block = manifest["algorithms"][0]
        assert etpso_block["params"]["n_particles"] == 10
        assert etpso_block["params"]["w"] == 0.7
        assert "seed" not in etpso_block["params"]
        assert "max_iterations" not in etpso_block["params"]
        assert manifest["run_seeds"] == [5]
        assert etpso_block["evaluations_per_iteration"] == 10
        assert manifest["algorithms"][1]["evaluations_per_iteration"] == 18

    def test_rerun_byte_identical_except_timings(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path))
        first = tmp_path / "first"
        second = tmp_path / "second"
        run_campaign(config, first)
        run_campaign(config, second)
        files = tree_files(first)
        assert files == tree_files(second)
        for relative in files:
            if relative.name == "timings.json":
                continue
            assert filecmp.cmp(first / relative, second / relative, shallow=False), relative

    def test_failing_run_recorded_and_campaign_continues(self, tmp_path):
        config = load_campaign_config(
            write_config(
                tmp_path,
                algorithms=[
                    {"name": "mo-etpso", "params": {"n_particles": 10, "memory_capacity": 2}},
                    {"name": "nsga2", "params": {"mu": 6, "lambda_": 12}},
                ],
                runs=1,
                max_iterations=1,
            )
        )
        out = tmp_path / "out"
        manifest = run_campaign(config, out)
        etpso_status = manifest["run_status"][0]
        assert etpso_status["status"] == "failed"
        assert "memory_capacity" in etpso_status["error"]
        assert etpso_status["file"] is None
        assert manifest["run_status"][1]["status"] == "completed"
        assert (out / "runs" / "nsga2" / "run_0.json").is_file()

    def test_run_record_contents(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path, runs=1))
        out = tmp_path / "out"
        run_campaign(config, out)
        record = json.loads((out / "runs" / "mo-etpso" / "run_0.json").read_text())
        assert record["seed"] == 5
        assert record["evaluations"] == 10 * 4
        assert len(record["iterations"]) == 4
        first = record["iterations"][0]
        assert first["iteration"] == 1
        assert first["evaluations_used"] == 10
        assert isinstance(first["front"], list)
        assert record["final_front"], "final front must not be empty"
        assert set(record["final_front"][0]) == {"objectives", "genome"}


class TestMetricsOutputs:
    @pytest.fixture()
    def campaign_dir(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path))
        out = tmp_path / "out"
        run_campaign(config, out)
        return out

    def test_csv_layout(self, campaign_dir):
        written = write_metrics(campaign_dir)
        assert [p.name for p in written] == [
            "hv.csv", "cs.csv", "final_front_mo-etpso.csv", "final_front_nsga2.csv",
        ]
        with open(campaign_dir / "hv.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["iteration", "mo-etpso", "nsga2"]
        assert len(rows) == 1 + 4
        for row in rows[1:]:
            for value in row[1:]:
                assert 0.0 <= float(value) <= 1.0

    def test_cs_values_in_range(self, campaign_dir):
        write_metrics(campaign_dir)
        with open(campaign_dir / "cs.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["iteration", "mo-etpso", "nsga2"]
        for row in rows[1:]:
            for value in row[1:]:
                assert 0.0 <= float(value) <= 1.0

    def test_hv_column_matches_recomputation(self, campaign_dir):
        write_metrics(campaign_dir)
        campaign = load_campaign(campaign_dir)
        bounds = campaign_bounds(campaign.all_fronts())
        expected = averaged_hv(campaign.result_for("mo-etpso"), bounds)
        with open(campaign_dir / "hv.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        column = [float(row[1]) for row in rows[1:]]
        assert column == list(expected)

    def test_final_front_rows_mutually_non_dominated(self, campaign_dir):
        write_metrics(campaign_dir)
        for name in ("final_front_mo-etpso.csv", "final_front_nsga2.csv"):
            with open(campaign_dir / name, newline="") as handle:
                rows = list(csv.reader(handle))
            assert rows[0][:2] == ["z1", "z2"]
            assert rows[0][2] == "genome_0"
            points = [(float(r[0]), float(r[1])) for r in rows[1:]]
            assert points
            for i, a in enumerate(points):
                for j, b in enumerate(points):
                    if i != j:
                        assert not oracle_dominates(a, b)

    def test_missing_run_diagnostic(self, campaign_dir):
        (campaign_dir / "runs" / "nsga2" / "run_1.json").unlink()
        with pytest.raises(RuntimeError, match="nsga2 run 1"):
            write_metrics(campaign_dir)

    def test_metrics_deterministic(self, campaign_dir):
        write_metrics(campaign_dir)
        first = (campaign_dir / "hv.csv").read_bytes()
        write_metrics(campaign_dir)
        assert (campaign_dir / "hv.csv").read_bytes() == first


class TestCompare:
    def test_identical_algorithms_zero_differences(self, tmp_path):
        config = load_campaign_config(
            write_config(
                tmp_path,
                algorithms=[
                    {"name": "nsga2", "label": "first", "params": {"mu": 6, "lambda_": 12}},
                    {"name": "nsga2", "label": "second", "params": {"mu": 6, "lambda_": 12}},
                ],
            )
        )
        out = tmp_path / "out"
        run_campaign(config, out)
        text, payload = compare_campaign(out)
        pair = payload["pairs"][0]
        assert pair["hv_difference"] == 0.0
        assert pair["cs_difference"] == 0.0
        assert pair["first_not_dominated_fraction"] == 1.0
        assert pair["second_not_dominated_fraction"] == 1.0
        assert "first" in text and "second" in text
        assert (out / "compare.json").is_file()

    def test_single_algorithm_rejected(self, tmp_path):
        config = load_campaign_config(
            write_config(tmp_path, algorithms=[{"name": "nsga2", "params": {"mu": 6, "lambda_": 12}}])
        )
        out = tmp_path / "out"
        run_campaign(config, out)
        with pytest.raises(ConfigurationError, match="two algorithms"):
            compare_campaign(out)

    def test_fully_dominated_side_scores_zero(self, tmp_path):
        # Handcraft a tiny result tree so one front strictly dominates
        # the other and the cross-dominance fractions are forced.
        out = tmp_path / "out"
        config = load_campaign_config(
            write_config(tmp_path, runs=1, max_iterations=1)
        )
        run_campaign(config, out)
        for label, points in (
            ("mo-etpso", [[1.0, 4.0], [2.0, 3.0]]),
            ("nsga2", [[10.0, 40.0], [20.0, 30.0]]),
        ):
            path = out / "runs" / label / "run_0.json"
            record = json.loads(path.read_text())
            record["iterations"] = [
                {"iteration": 1, "front": points, "front_changed": True,
                 "evaluations_used": 10, "gbest": None}
            ]
            record["final_front"] = [
                {"objectives": p, "genome": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]}
                for p in points
            ]
            path.write_text(json.dumps(record))
        _, payload = compare_campaign(out)
        pair = payload["pairs"][0]
        assert pair["first_not_dominated_fraction"] == 1.0
        assert pair["second_not_dominated_fraction"] == 0.0

    def test_compare_deterministic(self, tmp_path):
        config = load_campaign_config(write_config(tmp_path))
        out = tmp_path / "out"
        run_campaign(config, out)
        first_text, first_payload = compare_campaign(out)
        second_text, second_payload = compare_campaign(out)
        assert first_text == second_text
        assert first_payload == second_payload


class TestCli:
    def test_gen_instance_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "inst.json"
        code = main([
            "gen-instance", "--d-total", "20", "--n-stops", "2",
            "--capacity", "50", "--v-min", "1", "--v-max", "10",
            "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        assert "D=20" in capsys.readouterr().out
        first = out.read_bytes()
        main([
            "gen-instance", "--d-total", "20", "--n-stops", "2",
            "--capacity", "50", "--v-min", "1", "--v-max", "10",
            "--seed", "3", "--out", str(out),
        ])
        assert out.read_bytes() == first

    def test_gen_instance_shape_error_exit_two(self, tmp_path, capsys):
        code = main([
            "gen-instance", "--d-total", "5", "--n-stops", "9",
            "--out", str(tmp_path / "x.json"),
        ])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_subcommand_exit_two(self, capsys):
        assert main(["optimize"]) == 2

    def test_full_pipeline(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "results"
        assert main(["run", str(config), "--out", str(out)]) == 0
        assert main(["metrics", str(out)]) == 0
        assert main(["compare", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "final-iteration summary" in stdout

    def test_run_reports_failed_runs_with_exit_one(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            algorithms=[
                {"name": "mo-etpso", "params": {"n_particles": 10, "memory_capacity": 2}},
            ],
            runs=1, max_iterations=1,
        )
        out = tmp_path / "results"
        assert main(["run", str(config), "--out", str(out)]) == 1
        assert "failed" in capsys.readouterr().err

    def test_metrics_on_missing_directory_exit_one(self, tmp_path, capsys):
        assert main(["metrics", str(tmp_path / "absent")]) == 1

    def test_config_error_exit_two(self, tmp_path, capsys):
        config = write_config(tmp_path, algorithms=[{"name": "annealing"}])
        assert main(["run", str(config)]) == 2

    def test_output_dir_precedence(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("SWARMFRONT_OUT", str(tmp_path / "from-env"))
        config = write_config(tmp_path, runs=1, max_iterations=1)

        assert main(["run", str(config)]) == 0
        assert (tmp_path / "from-env" / "manifest.json").is_file()

        payload = json.loads(config.read_text())
        payload["output_dir"] = "from-config"
        config.write_text(json.dumps(payload))
        assert main(["run", str(config)]) == 0
        assert (tmp_path / "from-config" / "manifest.json").is_file()

        flag_dir = tmp_path / "from-flag"
        assert main(["run", str(config), "--out", str(flag_dir)]) == 0
        assert (flag_dir / "manifest.json").is_file()

    def test_default_output_dir(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv("SWARMFRONT_OUT", raising=False)
        config = write_config(tmp_path, runs=1, max_iterations=1)
        assert main(["run", str(config)]) == 0
        assert (tmp_path / "swarmfront-results" / "manifest.json").is_file()
