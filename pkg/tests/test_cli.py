import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from matairy.cli import run


def schema(name):
    return json.loads(resources.files("matairy").joinpath(f"schemas/{name}").read_text())


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_eval_single_point(capsys):
    assert run(["eval", "--rep", "n2_single", "--xi", "0", "--r", "1"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["xi", "r", "re", "im", "err"]
    assert len(out) == 2
    assert float(out[1][2]) == pytest.approx(0.3712560482412568, rel=1e-14)
    assert len(out[1][2].replace("-", "").replace(".", "").lstrip("0")) <= 15


def test_sweep_with_negative_start(capsys):
    assert run(["sweep", "--rep", "n2_single", "--xi", "-3:3:61", "--r", "1", "--format", "csv"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["xi", "r", "re", "im", "err"] and len(out) == 62
    assert float(out[1][0]) == -3.0 and float(out[-1][0]) == 3.0


def test_sweep_json_validates(capsys, in_tmp):
    assert run(["sweep", "--rep", "direct", "--grid", "-1:1:3", "--format", "json",
                "--out", "s.json"]) == 0
    data = json.loads((in_tmp / "s.json").read_text())
    jsonschema.validate(data, schema("points.schema.json"))
    assert [p["xi"] for p in data["points"]] == [-1.0, 0.0, 1.0]


def test_spectrum_input(capsys):
    assert run(["eval", "--rep", "det_oracle", "--spectrum", "1,0.2,-0.5", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    jsonschema.validate(data, schema("points.schema.json"))
    assert data["N"] == 3 and data["points"][0]["r"] is None


def test_calibrate_then_eval_applies_kappa(capsys, in_tmp):
    assert run(["calibrate", "--xi", "0", "--r", "1"]) == 0
    capsys.readouterr()
    assert (in_tmp / "matairy_calibration.json").exists()
    assert run(["eval", "--rep", "n2_single", "--xi", "0.5", "--r", "1.5", "--format", "json"]) == 0
    calibrated = json.loads(capsys.readouterr().out)
    assert run(["eval", "--rep", "direct", "--xi", "0.5", "--r", "1.5", "--format", "json"]) == 0
    direct = json.loads(capsys.readouterr().out)
    assert calibrated["calibrated"] is True
    a, b = calibrated["points"][0]["value"], direct["points"][0]["value"]
    assert abs(complex(a["re"], a["im"]) - complex(b["re"], b["im"])) < 1e-8


def test_check_writes_valid_report(in_tmp):
    assert run(["check", "--suite", "ode", "--seed", "7", "--out", "r.json"]) == 0
    data = json.loads((in_tmp / "r.json").read_text())
    jsonschema.validate(data, schema("report.schema.json"))
    assert data["seed"] == 7 and data["passed"] is True


def test_config_file_override(in_tmp, capsys):
    (in_tmp / "q.cfg").write_text("nodes_per_dim=32\n")
    assert run(["eval", "--rep", "n2_single", "--xi", "0", "--r", "1", "--config", "q.cfg",
                "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["nodes_per_dim"] == 32


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["eval", "--rep", "n2_green", "--xi", "0", "--r", "0"],
    ["eval", "--rep", "direct", "--spectrum", "1,0,-1"],
    ["eval", "--rep", "nope", "--xi", "0"],
    ["eval", "--rep", "n2_single", "--xi", "abc", "--r", "1"],
    ["sweep", "--rep", "n2_single", "--xi", "3:-3:5", "--r", "1"],
    ["sweep", "--rep", "n2_single", "--xi", "0:1:0", "--r", "1"],
    ["eval", "--rep", "det_oracle", "--spectrum", "0.5,0.5"],
    ["eval", "--rep", "n2_single", "--xi", "0", "--r", "1", "--format", "xml"],
    ["eval", "--rep", "n2_single", "--xi", "0", "--r", "1", "--config", "missing.cfg"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_numerical_failure_exit_1(capsys, monkeypatch):
    from matairy import cli
    from matairy.errors import NonConvergence

    def failing(*_args, **_kw):
        raise NonConvergence("ladder did not stabilize")

    monkeypatch.setattr(cli, "evaluate", failing)
    assert run(["eval", "--rep", "n2_single", "--xi", "0", "--r", "1"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "NonConvergence"


def test_console_script_is_byte_deterministic(in_tmp):
    cmd = [sys.executable, "-m", "matairy.cli", "sweep", "--rep", "n2_double", "--grid", "-1:1:5",
           "--r", "0:2:3", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(json.loads(a)["points"]) == 15
