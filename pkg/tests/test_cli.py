import json

import numpy as np
import pytest
from click.testing import CliRunner

from gpmemory import __version__
from gpmemory.cli import cli
from gpmemory.io import read_long_csv


@pytest.fixture
def runner():
    return CliRunner()


def test_version(runner):
    res = runner.invoke(cli, ["--version"])
    assert res.exit_code == 0 and __version__ in res.output


def test_classify(runner):
    out = json.loads(runner.invoke(cli, ["classify", "abel:alpha=0.5"]).output)
    assert out["speed"] == "infinite"
    out = json.loads(runner.invoke(cli, ["classify", "exp:a=1,b=1"]).output)
    assert out == {"kernel": "exp:a=1.0,b=1.0", "speed": "finite", "a": 1.0}


def test_expand_and_jet(runner):
    out = json.loads(runner.invoke(cli, ["expand", "exp:a=1,b=1"]).output)
    assert out["gamma"] == 0.5 and out["d1"] == pytest.approx(-0.125)
    out = json.loads(runner.invoke(cli, ["jet", "exp:a=1,b=1", "--x", "2"]).output)
    row = out["jet"][0]
    assert row["front_time"] == 2.0 and row["heaviside_coeff"] == pytest.approx(0.25 * np.exp(-1))


def test_bad_kernel_spec(runner):
    res = runner.invoke(cli, ["classify", "exp:a=1;b=1"])
    assert res.exit_code == 2 and "position 7" in res.output


def test_simulate_then_analyze(runner, tmp_path):
    f = tmp_path / "f.csv"
    res = runner.invoke(
        cli,
        ["simulate", "exp:a=1,b=1", "--L", "3", "--nx", "300", "--T", "2.5", "--nt", "1000", "-o", str(f)],
    )
    assert res.exit_code == 0, res.output
    assert (tmp_path / "f.meta.json").exists()
    r = tmp_path / "r.json"
    args = ["analyze", str(f), "--kernel", "exp:a=1,b=1", "-o", str(r)]
    for x in (0.5, 0.75, 1.0, 1.25, 1.5):
        args += ["--x", str(x)]
    res = runner.invoke(cli, args + ["--plateau-x", "1.0"])
    assert res.exit_code == 0, res.output
    doc = json.loads(r.read_text())
    assert doc["velocity"] == pytest.approx(1.0, rel=0.02)
    assert doc["plateau"][0]["measured"] == pytest.approx(doc["plateau"][0]["predicted"], rel=0.1)


def test_invert_and_oracle_agree(runner, tmp_path):
    inv, ora = tmp_path / "inv.csv", tmp_path / "ora.csv"
    res = runner.invoke(cli, ["invert", "exp:a=1,b=1", "--x", "1", "--t-max", "2", "--nt", "40", "-o", str(inv)])
    assert res.exit_code == 0, res.output
    res = runner.invoke(cli, ["oracle", "--a", "1", "--b", "1", "--x", "1", "--t-max", "2", "--nt", "40", "-o", str(ora)])
    assert res.exit_code == 0, res.output
    _, t1, v1 = read_long_csv(inv)
    _, t2, v2 = read_long_csv(ora)
    assert np.allclose(t1, t2[1:])
    assert np.max(np.abs(v1 - v2[1:])) < 1e-6 * np.max(np.abs(v2))


def test_verify_preset(runner, tmp_path):
    res = runner.invoke(cli, ["verify", "--preset", "abel", "--out-dir", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert "PASS" in res.output and "FAIL" not in res.output
    assert (tmp_path / "abel_report.json").exists()


def test_verify_failure_exit_code(runner, tmp_path):
    res = runner.invoke(cli, ["verify", "--preset", "wave", "--set", "analysis.plateau_x=[4.5]", "--out-dir", str(tmp_path)])
    assert res.exit_code == 1
    assert "FAIL" in res.output


def test_verify_needs_one_source(runner):
    assert runner.invoke(cli, ["verify"]).exit_code == 2
