import json

import pytest

from gpmemory.config import ExperimentConfig, PRESETS, apply_overrides, parse_kernel_spec, preset_config, run_experiment, run_preset
from gpmemory.errors import ParseError, ValidationError
from gpmemory.kernels import AbelKernel, ConstantKernel, ExponentialKernel, PowerLawKernel, SampledKernel


def test_parse_examples():
    assert parse_kernel_spec("exp:a=1,b=1") == ExponentialKernel(1.0, 1.0)
    assert parse_kernel_spec("abel:alpha=0.5") == AbelKernel(0.5)
    assert parse_kernel_spec("const:a=2") == ConstantKernel(2.0)
    assert parse_kernel_spec(" powerlaw: a=1, omega=2.5e-1, l=3 ") == PowerLawKernel(1.0, 0.25, 3.0)
    with pytest.raises(ValidationError):
        parse_kernel_spec("powerlaw:a=1,omega=1,l=0.5")
    with pytest.raises(ValidationError):
        parse_kernel_spec("abel:alpha=1.5")


@pytest.mark.parametrize(
    "spec, pos, expected",
    [
        ("gauss:a=1", 0, "const"),
        ("exp;a=1,b=1", 3, ":"),
        ("exp:a=1;b=1", 7, ","),
        ("exp:a=1,c=1", 8, "b"),
        ("exp:a=1,a=2", 8, "b"),
        ("exp:a=x,b=1", 6, "<number>"),
        ("exp:a=1", 7, "b"),
        ("file:", 5, "<path>"),
    ],
)
def test_parse_errors(spec, pos, expected):
    with pytest.raises(ParseError) as info:
        parse_kernel_spec(spec)
    assert info.value.position == pos
    assert expected in info.value.expected


@pytest.mark.parametrize("spec", ["const:a=2.5", "exp:a=1.5,b=0.25", "powerlaw:a=1.0,omega=2.0,l=1.5", "abel:alpha=0.3"])
def test_spec_round_trip(spec):
    k = parse_kernel_spec(spec)
    assert parse_kernel_spec(k.spec()) == k


def test_file_kernel(tmp_path):
    p = tmp_path / "k.csv"
    p.write_text("t,k\n0,1\n0.5,0.8\n1,0.6\n1.5,0.5\n2,0.4\n")
    k = parse_kernel_spec(f"file:{p}")
    assert isinstance(k, SampledKernel) and k.spec() == f"file:{p}"


def test_overrides():
    d = apply_overrides(PRESETS["wave"], {"grid.nx": 800, "boundary.eps": 0.04})
    assert d["grid"]["nx"] == 800 and d["boundary"]["eps"] == 0.04
    assert PRESETS["wave"]["grid"]["nx"] == 1200


def test_config_validation(tmp_path):
    d = apply_overrides(PRESETS["telegraph"], {"outputs.report_json": str(tmp_path / "missing" / "r.json")})
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(d)
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"kernel_spec": "exp:a=1,b=1"})
    with pytest.raises(ParseError):
        ExperimentConfig.from_dict(apply_overrides(PRESETS["wave"], {"kernel_spec": "wave:a=1"}))


def test_config_json_round_trip(tmp_path):
    cfg = preset_config("telegraph", out_dir=tmp_path)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json(p).to_dict() == cfg.to_dict()


def test_determinism(tmp_path):
    small = {"grid.L": 3.0, "grid.nx": 300, "grid.T": 2.0, "grid.nt": 800, "analysis.convergence": False, "analysis.inversion": False}
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        ov = dict(small, **{"outputs.field_csv": str(tmp_path / sub / "f.csv"), "outputs.report_json": str(tmp_path / sub / "r.json")})
        run_preset("telegraph", ov)
        outs.append(((d / "f.csv").read_bytes(), (d / "r.json").read_text().replace(f"/{sub}/", "/")))
    assert outs[0] == outs[1]


def test_report_contents(tmp_path):
    res = run_preset("abel", out_dir=tmp_path)
    doc = json.loads((tmp_path / "abel_report.json").read_text())
    assert res.exit_code == 0 and doc["passed"]
    assert doc["version"] and doc["config"]["kernel_spec"] == "abel:alpha=0.5"
    assert doc["predictions"]["speed"] == "infinite"
    assert (tmp_path / "abel_field.csv").exists()


def test_failing_checks_give_nonzero_exit(tmp_path):
    # the plateau window at x=4.5 runs past T, so the check fails
    res = run_preset("wave", {"analysis.plateau_x": [4.5]}, out_dir=tmp_path)
    assert res.exit_code == 1
    assert res.report["failures"]


def test_experiment_with_sampled_boundary(tmp_path):
    sig = tmp_path / "u.csv"
    sig.write_text("0,0\n0.1,1\n0.2,0\n")
    d = {
        "kernel_spec": "exp:a=1,b=1",
        "boundary": {"type": "sampled", "path": str(sig)},
        "grid": {"L": 3.0, "nx": 300, "T": 2.0, "nt": 800},
        "analysis": {"x_list": [0.5, 0.75, 1.0, 1.25, 1.5]},
    }
    res = run_experiment(ExperimentConfig.from_dict(d))
    m = res.report["measurements"]
    assert m["velocity"] == pytest.approx(1.0, rel=0.03)
    assert m["decay_rate"] == pytest.approx(0.5, rel=0.1)
