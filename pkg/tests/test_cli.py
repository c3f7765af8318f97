import math
import subprocess
import sys

import pytest
import yaml

from cloudprice.cli import main

JOBMIX_YAML = """\
model:
  type: jobmix
  lengths: [1, 2]
  probs: [0.5, 0.5]
distribution:
  kind: uniform
  lo: 0.0
  hi: 1.0
schedule:
  shape: flat
  prices: 0.5
objective_weight: 0.0
sim:
  horizon: 50000
  replications: 4
  seed: 3
"""

CORRELATED_YAML = """\
model:
  type: correlated
  classes:
    - {rate: 0.5, length: 1, value: 1.0}
    - {rate: 0.5, length: 2, value: 1.0}
sim:
  horizon: 50000
  replications: 4
  seed: 3
"""

FLEET_YAML = """\
model:
  type: fleet
  mode: equal-r
  servers:
    - {lengths: [2], probs: [0.3]}
    - {lengths: [4], probs: [0.3]}
distribution:
  kind: discrete
  atoms: [[0.3, 0.5], [0.8, 0.5]]
schedule:
  shape: per-server
  prices: [0.3, 0.3]
"""


@pytest.fixture
def jobmix_cfg(tmp_path):
    path = tmp_path / "jobmix.yaml"
    path.write_text(JOBMIX_YAML)
    return str(path)


@pytest.fixture
def correlated_cfg(tmp_path):
    path = tmp_path / "correlated.yaml"
    path.write_text(CORRELATED_YAML)
    return str(path)


@pytest.fixture
def fleet_cfg(tmp_path):
    path = tmp_path / "fleet.yaml"
    path.write_text(FLEET_YAML)
    return str(path)


class TestEvaluate:
    def test_text_output(self, jobmix_cfg, capsys):
        assert main(["evaluate", jobmix_cfg]) == 0
        out = capsys.readouterr().out
        assert "revenue" in out and "0.3000000000" in out

    def test_csv_output(self, jobmix_cfg, capsys):
        assert main(["evaluate", jobmix_cfg, "--csv"]) == 0
        header, row = capsys.readouterr().out.strip().split("\n")
        assert header == "welfare,revenue,occupancy,objective"
        welfare, revenue, _, objective = map(float, row.split(","))
        assert revenue == pytest.approx(0.3, abs=1e-9)
        assert objective == pytest.approx(revenue)  # lambda = 0 in the config

    def test_lambda_override(self, jobmix_cfg, capsys):
        assert main(["evaluate", jobmix_cfg, "--csv", "--lambda", "1.0"]) == 0
        row = capsys.readouterr().out.strip().split("\n")[1]
        welfare, _, _, objective = map(float, row.split(","))
        assert objective == pytest.approx(welfare)

    def test_fleet_model(self, fleet_cfg, capsys):
        assert main(["evaluate", fleet_cfg]) == 0
        assert "welfare" in capsys.readouterr().out


class TestConfigErrors:
    def test_bad_probs_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text(JOBMIX_YAML.replace("[0.5, 0.5]", "[0.8, 0.8]"))
        assert main(["evaluate", str(path)]) == 2
        assert "model" in capsys.readouterr().err

    def test_missing_file_exit_2(self, capsys):
        assert main(["evaluate", "/nonexistent/config.yaml"]) == 2

    def test_unknown_model_type(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("model: {type: cluster}\n")
        assert main(["evaluate", str(path)]) == 2
        assert "model.type" in capsys.readouterr().err

    def test_missing_distribution(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("model: {type: jobmix, lengths: [1], probs: [0.5]}\n")
        assert main(["evaluate", str(path)]) == 2
        assert "distribution" in capsys.readouterr().err

    def test_bad_objective_weight(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text(JOBMIX_YAML.replace("objective_weight: 0.0",
                                            "objective_weight: 1.5"))
        assert main(["evaluate", str(path)]) == 2
        assert "objective_weight" in capsys.readouterr().err

    def test_unknown_scheme_rejected_by_argparse(self, jobmix_cfg):
        with pytest.raises(SystemExit):
            main(["optimize", jobmix_cfg, "--scheme", "per-job"])


class TestDumpConfig:
    def test_round_trip_is_fixed_point(self, jobmix_cfg, capsys, tmp_path):
        assert main(["evaluate", jobmix_cfg, "--dump-config"]) == 0
        dumped = capsys.readouterr().out
        path2 = tmp_path / "normalized.yaml"
        path2.write_text(dumped)
        assert main(["evaluate", str(path2), "--dump-config"]) == 0
        assert capsys.readouterr().out == dumped

    def test_dump_parses_to_same_metrics(self, fleet_cfg, capsys, tmp_path):
        assert main(["evaluate", fleet_cfg, "--csv"]) == 0
        row = capsys.readouterr().out
        assert main(["evaluate", fleet_cfg, "--dump-config"]) == 0
        path2 = tmp_path / "normalized.yaml"
        path2.write_text(capsys.readouterr().out)
        assert main(["evaluate", str(path2), "--csv"]) == 0
        assert capsys.readouterr().out == row

    def test_dump_is_valid_yaml(self, correlated_cfg, capsys):
        assert main(["simulate", correlated_cfg, "--dump-config"]) == 0
        data = yaml.safe_load(capsys.readouterr().out)
        assert data["model"]["type"] == "correlated"


class TestOptimizeCommand:
    def test_flat(self, jobmix_cfg, capsys):
        assert main(["optimize", jobmix_cfg, "--lambda", "1.0"]) == 0
        out = capsys.readouterr().out
        assert "value: 0.51471" in out  # 9 - 6*sqrt(2)

    def test_multi_prints_single_price_ratio(self, jobmix_cfg, capsys):
        assert main(["optimize", jobmix_cfg, "--scheme", "multi",
                     "--lambda", "1.0"]) == 0
        out = capsys.readouterr().out
        assert "best single from multi" in out
        assert "ratio=0.976" in out

    def test_fleet_schemes(self, fleet_cfg, capsys):
        for scheme in ("flat", "per-server", "per-server-per-length"):
            assert main(["optimize", fleet_cfg, "--scheme", scheme]) == 0
            assert "value" in capsys.readouterr().out

    def test_grid_flag(self, jobmix_cfg, capsys):
        assert main(["optimize", jobmix_cfg, "--grid", "64"]) == 0
        capsys.readouterr()


class TestBoundsCommand:
    def test_two_class_prints_rho(self, jobmix_cfg, capsys):
        assert main(["bounds", jobmix_cfg]) == 0
        out = capsys.readouterr().out
        assert "rho" in out and f"{6 / 7:.8f}"[:9] in out

    def test_fleet_bounds(self, fleet_cfg, capsys):
        assert main(["bounds", fleet_cfg]) == 0
        out = capsys.readouterr().out
        assert "fleet flat-vs-per-server bound" in out
        assert "composed" in out


class TestSimulateCommand:
    def test_csv_deterministic(self, jobmix_cfg, capsys):
        args = ["simulate", jobmix_cfg, "--csv", "--seed", "21",
                "--horizon", "20000", "--reps", "3"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first
        assert first.startswith("row,rep,welfare")

    def test_text_includes_closed_form(self, jobmix_cfg, capsys):
        assert main(["simulate", jobmix_cfg, "--horizon", "20000",
                     "--reps", "3"]) == 0
        assert "closed form" in capsys.readouterr().out

    def test_price_override(self, jobmix_cfg, capsys):
        assert main(["simulate", jobmix_cfg, "--price", "2.0",
                     "--horizon", "20000", "--reps", "3", "--csv"]) == 0
        aggregate = capsys.readouterr().out.strip().split("\n")[-1]
        assert aggregate.split(",")[2] == "0"

    def test_half_opt_price(self, correlated_cfg, capsys):
        assert main(["simulate", correlated_cfg, "--price", "half-opt"]) == 0
        out = capsys.readouterr().out
        assert "lp opt" in out and "yes" in out

    def test_half_opt_needs_correlated(self, jobmix_cfg, capsys):
        assert main(["simulate", jobmix_cfg, "--price", "half-opt"]) == 2


class TestOfflineCommand:
    def test_lp_report(self, correlated_cfg, capsys):
        assert main(["offline", correlated_cfg]) == 0
        out = capsys.readouterr().out
        assert "expected LP opt per step: 1.0000000000" in out
        assert "half-opt flat price: 0.5000000000" in out

    def test_traces(self, correlated_cfg, capsys):
        assert main(["offline", correlated_cfg, "--traces", "3",
                     "--horizon", "5000", "--seed", "1"]) == 0
        assert "sampled DP optimum" in capsys.readouterr().out

    def test_needs_correlated_model(self, jobmix_cfg, capsys):
        assert main(["offline", jobmix_cfg]) == 2


class TestPaperSuite:
    def test_filter_runs_subset(self, capsys):
        assert main(["paper-suite", "--filter", "rho"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.strip().split("\n") if l.startswith("[")]
        assert lines and all("rho" in l for l in lines)
        assert all(l.startswith("[PASS]") for l in lines)

    def test_full_suite_passes(self, capsys):
        assert main(["paper-suite"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out


class TestConsoleScript:
    def test_entry_point_installed(self, jobmix_cfg):
        proc = subprocess.run(
            [sys.executable, "-m", "cloudprice.cli", "evaluate", jobmix_cfg, "--csv"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("welfare,revenue")
