import json
import math
import subprocess
import sys

import pytest

from gapfield.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_json_equal_radii(capsys):
    code, out, _ = run(capsys, "constants", "--r1", "1", "--r2", "1", "--eps", "1e-4")
    assert code == 0
    data = json.loads(out)
    assert data["closed"]["Q1"] == pytest.approx(math.log(2), abs=1e-15)
    assert data["closed"]["Q2"] == data["closed"]["Q1"]
    assert data["Q1"] == pytest.approx(math.log(2), rel=1e-4)
    assert data["series"]["tail_bound"] <= 1e-9


def test_constants_csv_is_one_row(capsys):
    code, out, _ = run(capsys, "constants", "--r2", "0.5", "--eps", "1e-3", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0].split(",")[:3] == ["r1", "r2", "eps"]
    assert len(lines[1].split(",")) == len(lines[0].split(","))


@pytest.mark.parametrize(
    "argv",
    [
        ["constants", "--harmonic", "x1^2 +"],
        ["constants", "--harmonic", "x1^2"],
        ["constants", "--eps", "0.5"],
        ["constants", "--r1", "-1"],
        ["blowup-curve", "--r-values", "0.5,12"],
        ["field", "--x1", "1:2:x"],
        ["constants", "--tol", "nan"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["constants", "--format", "xml"])
    assert info.value.code == 2


def test_parse_diagnostic_names_position(capsys):
    _, _, err = run(capsys, "blowup-curve", "--harmonic", "x1 + x5")
    assert "position" in err


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"r1": 1, "r2": 0.5, "eps": 1e-3, "format": "csv"}))
    _, out, _ = run(capsys, "constants", "--config", str(cfg), "--eps", "1e-5")
    row = out.splitlines()[1].split(",")
    assert row[:3] == ["1.0", "0.5", "1e-05"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "constants", "--config", str(bad))[0] == 2
    assert run(capsys, "constants", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_blowup_curve_rows(capsys):
    code, out, _ = run(capsys, "blowup-curve", "--r-values", "0.5,1,2")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# H=") and lines[1] == "r,psi_series,psi_closed"
    r, series, closed = lines[3].split(",")
    assert float(r) == 1.0 and float(series) == pytest.approx(math.pi**2 / 3, rel=1e-12)
    assert float(closed) == pytest.approx(float(series), rel=1e-12)


def test_blowup_curve_default_grid_increasing(capsys):
    _, out, _ = run(capsys, "blowup-curve")
    vals = [float(l.split(",")[1]) for l in out.splitlines()[2:]]
    assert len(vals) == 100 and vals[0] > 0
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_blowup_curve_transverse_all_zero(capsys):
    _, out, _ = run(capsys, "blowup-curve", "--harmonic", "2*x2", "--r-values", "1:5:5")
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert len(rows) == 5
    assert all(float(s) == 0.0 for _, s, _ in rows)


def test_field_single_point(capsys):
    code, out, _ = run(capsys, "field", "--eps", "1e-3", "--x1", "0", "--x2", "0", "--x3", "0")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2 and lines[1].endswith(",1")


def test_field_json(capsys):
    _, out, _ = run(capsys, "field", "--eps", "1e-3", "--x2", "0,0.5", "--format", "json")
    rows = json.loads(out)
    assert [r["region_ok"] for r in rows] == [True, False]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "c.csv"
    code, out, _ = run(capsys, "constants", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().count(b"\n") == 2 and b"\r" not in target.read_bytes()


def test_figures(tmp_path, capsys):
    code, _, _ = run(capsys, "figures", "--out", str(tmp_path), "--r-count", "20")
    assert code == 0
    for name in ("figure1.csv", "figure2.csv"):
        lines = (tmp_path / name).read_text().splitlines()
        assert len(lines) == 22
        vals = [float(l.split(",")[1]) for l in lines[2:]]
        assert min(vals) > 0 and all(b > a for a, b in zip(vals, vals[1:]))


def test_validate_quick_passes(capsys):
    code, out, _ = run(capsys, "validate", "--quick")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert all(c["passed"] for c in report["checks"])


def test_validate_detects_injected_fault(capsys):
    code, out, err = run(capsys, "validate", "--quick", "--perturb-q", "1e-3")
    assert code == 3
    failed = [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]
    assert failed == ["constants.m_decomposition"]
    assert "M decompositions differ" in err


def test_nonconvergence_exit_4(capsys, monkeypatch):
    import gapfield.cli as cli
    from gapfield.errors import SlowConvergenceError

    def boom(*a, **k):
        raise SlowConvergenceError("terms decay too slowly")

    monkeypatch.setattr(cli, "blowup_curve", boom)
    assert run(capsys, "blowup-curve")[0] == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["field", "--r2", "0.5", "--eps", "1e-3", "--grid-n", "21"],
        ["blowup-curve", "--harmonic", "x1^3 - 3*x1*x2^2", "--r-count", "10"],
    ],
)
def test_byte_identical_across_processes(argv):
    cmd = [sys.executable, "-m", "gapfield", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(a) > 100
