import csv
import json

import numpy as np

from stride.config import get_data_path
from stride.errors import (
    CommandError,
    DatasetError,
    MpcError,
    PlantDivergedError,
    QpInfeasibleError,
    ScenarioError,
    SimulationAborted,
    StrideError,
)
from stride.gaitnet import FEATURE_NAMES, GaitNetModel
from stride.tool import main
from stride.tool.main import exit_code
from stride.tool.main_argparse import build_parser

import pytest

TOY = get_data_path("datasets", "toy.csv")


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch, tmp_path):
    monkeypatch.setattr("stride.config.CONFIG", None)
    monkeypatch.setattr("stride.config.CONFIG_FILENAME", str(tmp_path / "rc" / "stride.config"))
    monkeypatch.setenv("STRIDE_OUTPUT_DIR", str(tmp_path / "out"))


@pytest.mark.parametrize("exc, code, name", [
    (FileNotFoundError("x"), 3, "missing_file"),
    (ScenarioError("x"), 4, "schema_violation"),
    (DatasetError("x"), 4, "schema_violation"),
    (CommandError("x"), 4, "schema_violation"),
    (MpcError("x"), 5, "solver_failure"),
    (QpInfeasibleError("x"), 5, "solver_failure"),
    (PlantDivergedError("x"), 6, "simulation_aborted"),
    (SimulationAborted("x", termination="fall"), 6, "simulation_aborted"),
    (SimulationAborted("x", termination="solver_failure"), 5, "solver_failure"),
    (StrideError("x"), 1, "error"),
    (RuntimeError("x"), 1, "error"),
])
def test_exit_code(exc, code, name):
    assert exit_code(exc) == (code, name)


def test_parser_globals():
    namespace = build_parser().parse_args(["-k", "mpc.j_max=3", "--seed", "11", "config", "show"])
    assert namespace.config_keys == [("mpc.j_max", 3)]
    assert namespace.seed == 11


def test_parser_bench_lists():
    namespace = build_parser().parse_args(["bench", "--scenario", "flat", "--controllers", "proposed, wb",
                                           "--sweep-weights", "0.5,1,2"])
    assert namespace.controllers == ["proposed", "wb"]
    assert namespace.sweep_weights == [0.5, 1.0, 2.0]


@pytest.mark.parametrize("argv, jobs", [
    (["collect"], 1),
    (["collect", "-j", "4"], 4),
    (["bench", "--scenario", "flat", "--jobs", "3"], 3),
])
def test_parser_jobs(argv, jobs):
    namespace = build_parser().parse_args(argv)
    assert namespace.jobs == jobs
    assert "jobs" in namespace.function_args


@pytest.mark.parametrize("argv", [
    [],
    ["-k", "novalue", "config"],
    ["run"],
    ["bench", "--scenario", "flat", "--sweep-weights", "a,b"],
    ["train", TOY, "-a", "-s", "0,1"],
    ["collect", "--jobs", "0"],
    ["bench", "--scenario", "flat", "-j", "x"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_version(capsys):
    assert main(["--version"]) == 0


@pytest.mark.parametrize("argv, value", [
    (["config", "show", "stride.random_seed"], "7"),
    (["--seed", "11", "config", "show", "stride.random_seed"], "11"),
    (["-k", "stride.random_seed=3", "config", "show", "stride.random_seed"], "3"),
])
def test_config_show(argv, value, capsys):
    assert main(argv) == 0
    assert "stride.random_seed = {}".format(value) in capsys.readouterr().out


def test_config_write(tmp_path):
    filename = tmp_path / "written.config"
    assert main(["-k", "mpc.j_max=2", "config", "write", "-o", str(filename)]) == 0
    data = json.loads(filename.read_text())
    assert data["mpc"]["j_max"] == 2
    assert "__internal__" not in data


def test_config_file(tmp_path, capsys):
    filename = tmp_path / "mine.config"
    filename.write_text(json.dumps({"stride": {"random_seed": 5}}))
    assert main(["-c", str(filename), "config", "show", "stride.random_seed"]) == 0
    assert "stride.random_seed = 5" in capsys.readouterr().out


def test_missing_config_file(tmp_path, capsys):
    assert main(["-c", str(tmp_path / "none.config"), "config", "show"]) == 3
    assert capsys.readouterr().err.startswith("error: missing_file: ")


def test_missing_weights_file(capsys):
    assert main(["--weights", "no_such_weights", "config", "show"]) == 3


def test_pca(tmp_path, capsys):
    output = tmp_path / "pca" / "loadings.csv"
    assert main(["pca", TOY, "-n", "3", "-o", str(output)]) == 0
    assert output.exists()
    selection = json.loads((tmp_path / "pca" / "loadings.json").read_text())
    assert len(selection["selected"]) == 3
    assert "explained variance" in capsys.readouterr().out


def test_pca_missing_dataset(tmp_path, capsys):
    assert main(["pca", str(tmp_path / "none.csv")]) == 3
    assert "missing_file" in capsys.readouterr().err


def test_pca_invalid_dataset(tmp_path, capsys):
    filename = tmp_path / "bad.csv"
    filename.write_text("a,b\n1,2\n")
    assert main(["pca", str(filename)]) == 4
    assert "schema_violation" in capsys.readouterr().err


def test_train_unknown_feature(capsys):
    assert main(["train", TOY, "-s", "p_c_x,colour"]) == 4


def test_train_missing_pca_selection(tmp_path):
    assert main(["train", TOY, "-p", str(tmp_path / "none.json")]) == 3


def test_run_missing_scenario():
    assert main(["run", "--scenario", "no_such_scenario"]) == 3


def test_eval_noise(tmp_path):
    model = GaitNetModel(FEATURE_NAMES, [0], [0.0], [1.0], 0.25, 0.05, [(np.zeros((1, 1)), [0.0])])
    model_filename = str(tmp_path / "gaitnet.json")
    model.save(model_filename)
    output = tmp_path / "noise.csv"
    assert main(["eval-noise", model_filename, TOY, "--scales", "0,1", "-n", "2", "-o", str(output)]) == 0
    with open(str(output), "r") as fp:
        rows = list(csv.DictReader(fp))
    assert len(rows) == 12
    assert [row["profile"] for row in rows[:6]] == ["clean", "angle", "rate", "position", "velocity", "all"]
    assert all(float(row["delta"]) == 0.0 for row in rows)
