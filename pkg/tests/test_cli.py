import json
import subprocess
import sys

import numpy as np
import pytest

from beltrami_knots.cli import ConfigError, RunConfig, main, parse_int_range, parse_point
from beltrami_knots.export import read_csv, read_vtk


def test_parse_int_range():
    assert parse_int_range("-2..2") == (-2, -1, 0, 1, 2)
    assert parse_int_range("3") == (3,)
    assert parse_int_range("-1,4") == (-1, 4)
    for bad in ("a", "2..1", "1..x"):
        with pytest.raises(ConfigError):
            parse_int_range(bad)
    with pytest.raises(ConfigError):
        parse_point("1,2")


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(resolution=4)
    with pytest.raises(ConfigError):
        RunConfig(tol_curl=0.0)
    with pytest.raises(ConfigError):
        RunConfig(p=(2,), q=(4,)).specs()
    assert len(RunConfig(k=(-2, -1, 0, 1, 2)).specs()) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--p", "2", "--q", "4", "--k", "0"],
        ["zeroset", "--resolution", "4"],
        ["knot", "--p", "0"],
        ["eval", "--point", "0,0,0"],
        ["eval", "--point", "1,2"],
        ["bogus"],
        ["knot", "--format", "xml"],
    ],
)
def test_invalid_input_exits_2(argv, capsys):
    assert main(argv) == 2


def test_verify_trefoil_exit_0(tmp_path, capsys):
    assert main(["verify", "--p", "2", "--q", "3", "--k", "0", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert list(report)[:2] == ["spec", "checks"] and "versions" in report and report["seed"] == 0
    assert set(report["checks"][0]) == {"name", "pass", "max_residual", "tolerance", "n_samples"}


@pytest.mark.slow
def test_verify_family_sections(tmp_path, capsys):
    assert main(["verify", "--p", "2", "--q", "3", "--k", "-2..2", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert len(report["sections"]) == 5 and len(report["spec"]) == 5


def test_zeroset_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["zeroset", "--out", str(a)]) == 0
    assert main(["zeroset", "--out", str(b)]) == 0
    for name in ("zeroset_p2_q3_k0.csv", "zeroset_p2_q3_k0.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header, rows = read_csv(a / "zeroset_p2_q3_k0.csv")
    assert header == ["x", "y", "z", "residual", "knot_distance", "refined"]
    assert len(rows) > 0 and rows[:, 4].max() <= 1e-6


def test_zeroset_threshold_zero(tmp_path, capsys):
    assert main(["zeroset", "--threshold", "0", "--out", str(tmp_path)]) == 1
    assert (tmp_path / "zeroset_p2_q3_k0.csv").read_text() == "x,y,z,residual,knot_distance,refined\n"
    rep = json.loads((tmp_path / "zeroset_p2_q3_k0.json").read_text())
    assert rep["zero_set"]["degenerate"] is True
    assert "degenerate" in capsys.readouterr().out


def test_fieldlines_command(tmp_path, capsys):
    argv = ["fieldlines", "--start", "0,1.25,0", "--start", "3,0,0", "--start", "0,0,0", "--span", "0.5",
            "--format", "vtk", "--out", str(tmp_path)]
    assert main(argv) == 0
    poly = read_vtk(tmp_path / "fieldlines_p2_q3_k0.vtk")
    assert len(poly.lines) == 2  # the stationary start keeps one point, the outside start none
    warn = json.loads((tmp_path / "fieldlines_p2_q3_k0.json").read_text())["warnings"]
    assert {w["line"] for w in warn} == {1, 2}


def test_knot_and_export(tmp_path, capsys):
    assert main(["knot", "--p", "1", "--q", "1", "--n-samples", "256", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "knot_p1_q1.csv").read_text().startswith("t,x,y,z\n")
    for fmt in ("csv", "json", "vtk"):
        assert main(["export", "--format", fmt, "--n-points", "20", "--out", str(tmp_path / fmt)]) == 0
    poly = read_vtk(tmp_path / "vtk" / "knot_p2_q3.vtk")
    assert len(poly.lines) == 1 and len(poly.points) == 1024
    _, glyphs = read_csv(tmp_path / "csv" / "glyphs_p2_q3_k0.csv")
    assert glyphs.shape == (20, 6)
    assert (tmp_path / "json" / "boundary.json").exists()


def test_eval_prints_json(capsys):
    assert main(["eval", "--point", "3,0,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(out["g"], [[1, 0, 0], [0, 5 / 9, -7 / 3], [0, -7 / 3, 10]], atol=1e-14)
    assert out["norm_X"] <= 1e-14  # (3, 0, 0) is on the trefoil
    assert main(["eval", "--point", "0,1.25,0"]) == 0
    assert json.loads(capsys.readouterr().out)["curl_residual"] <= 1e-8


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "beltrami_knots", "verify", "--p", "4", "--q", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "coprime" in proc.stderr
