import json

import numpy as np
import pytest

from fwtransform.cli import run
from fwtransform.scenario import PRESETS, list_presets, preset_scenario, validate_scenario


def write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_presets_catalog(capsys):
    assert run(["presets"]) == 0
    out = json.loads(capsys.readouterr().out)
    names = [p["name"] for p in out["presets"]]
    assert names == sorted(PRESETS)
    assert all(p["description"] and p["anchor"] for p in out["presets"])
    assert {p["name"] for p in list_presets()} == set(PRESETS)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_every_preset_validates(name):
    rep = validate_scenario(preset_scenario(name))
    assert rep["task"] == PRESETS[name]["scenario"]["task"]


def test_validate_command(capsys):
    assert run(["validate", "--preset", "free-dirac"]) == 0
    assert json.loads(capsys.readouterr().out)["task"] == "transform"


def test_free_dirac_transform(tmp_path, capsys):
    assert run(["transform", "--preset", "free-dirac", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] and out["max_residual_odd_norm"] <= 1e-12
    assert json.loads((tmp_path / "summary.json").read_text()) == out


def test_unknown_key_is_parse_error(tmp_path, capsys):
    p = write(tmp_path, 'task = "transform"\n[particle]\nkind = "spin-1/2"\nmass = 2.0\n')
    assert run(["transform", "--scenario", str(p)]) == 2
    assert "particle.mass" in capsys.readouterr().err


def test_toml_syntax_error(tmp_path):
    p = write(tmp_path, 'task = "transform\n')
    assert run(["transform", "--scenario", str(p)]) == 2


def test_task_mismatch(tmp_path):
    assert run(["simulate", "--preset", "free-dirac"]) == 2


def test_missing_scenario_file(tmp_path):
    assert run(["transform", "--scenario", str(tmp_path / "nope.toml")]) == 5


def test_missing_table_is_io_error(tmp_path):
    p = write(
        tmp_path,
        'task = "transform"\n[particle]\nkind = "spin-0"\n'
        '[field]\npreset = "table"\ntable = "no_such_table.csv"\n'
        '[discretization]\nscheme = "grid"\nn = 8\nlength = 8.0\n',
    )
    assert run(["transform", "--scenario", str(p)]) == 5


def test_inconsistent_table_reports_location(tmp_path, capsys):
    x = np.linspace(-5, 5, 101)
    ex = np.where(x > 1.0, 0.5, -1.0)
    rows = ["x,Phi,Ax,Ay,Az,Ex,Ey,Ez"] + [f"{a:.6f},{a:.6f},0,0,0,{e},0,0" for a, e in zip(x, ex)]
    (tmp_path / "bad.csv").write_text("\n".join(rows) + "\n")
    p = write(
        tmp_path,
        'task = "transform"\n[particle]\nkind = "spin-0"\n'
        f'[field]\npreset = "table"\ntable = "{tmp_path / "bad.csv"}"\n'
        '[discretization]\nscheme = "grid"\nn = 8\nlength = 8.0\n',
    )
    assert run(["transform", "--scenario", str(p)]) == 2
    err = capsys.readouterr().err
    assert "quantity=E=-grad(Phi)" in err and "max_deviation=" in err and " at (" in err


def test_validity_failure_exit_code(tmp_path):
    p = write(
        tmp_path,
        'task = "simulate"\n[particle]\nkind = "spin-0"\nhbar = 1.0\n'
        '[field]\npreset = "gaussian-well"\namplitude = -0.3\nwidth = 4.0\n'
        '[simulate]\nt_end = 1.0\npi0 = [0.5, 0.0, 0.0]\n',
    )
    assert run(["simulate", "--scenario", str(p)]) == 3


def test_exact_method_on_well_is_numerical_error(tmp_path):
    p = write(
        tmp_path,
        'task = "transform"\n[particle]\nkind = "spin-0"\nhbar = 0.1\n'
        '[field]\npreset = "gaussian-well"\namplitude = -0.3\nwidth = 4.0\n'
        '[discretization]\nscheme = "grid"\nn = 16\nlength = 16.0\n[transform]\nmethod = "exact"\n',
    )
    assert run(["transform", "--scenario", str(p)]) == 4


def test_domain_error_exit_code(tmp_path):
    p = write(
        tmp_path,
        'task = "transform"\n[particle]\nkind = "spin-1/2"\n'
        '[field]\npreset = "stern-gerlach"\nB0 = 1.0\ngradient = 0.1\n'
        '[discretization]\nscheme = "grid"\nn = 8\nlength = 8.0\n',
    )
    assert run(["transform", "--scenario", str(p)]) == 4


def test_probe_hbar_scale(tmp_path, capsys):
    code = run(
        ["probe", "--preset", "feshbach-villars-gaussian-well", "--hbar-scale", "0.02,0.04,0.08", "--jobs", "2"]
    )
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["hbar"] == [0.02, 0.04, 0.08]
    with pytest.raises(SystemExit):
        run(["probe", "--preset", "feshbach-villars-gaussian-well", "--hbar-scale", "0.02,0.04"])


def test_simulate_writes_trajectory(tmp_path, capsys):
    assert run(["simulate", "--preset", "cyclotron", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (tmp_path / "trajectory.csv").exists()
    f = out["frequencies"]
    assert f["momentum_rotation"] == pytest.approx(f["cyclotron_analytic"], rel=1e-9)


def test_check_command_seeded(capsys):
    p = ["check", "--preset", "free-dirac", "--seed", "7"]
    assert run(p) == 2  # preset task is transform
    capsys.readouterr()


def test_check_scenario(tmp_path, capsys):
    p = write(tmp_path, 'task = "check"\nseed = 3\n[check]\nsamples = 5\ndim = 8\n')
    assert run(["check", "--scenario", str(p)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] and out["seed"] == 3
