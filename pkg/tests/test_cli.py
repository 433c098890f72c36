import io
import json
import os

import numpy as np
import pytest

from zenolike import cli
from zenolike.export import SCAN_HEADER, read_scan_csv, scan_csv, write_atomic
from zenolike.fixedpoint import ScanGrid, zeno_scan


def run(args):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(args, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_spectrum_reference_point():
    code, out, _ = run(["spectrum", "--g", "0.865", "--dtf", "15.13", "--dtm", "14.96", "--detector", "0,0,1"])
    assert code == 0
    rep = json.loads(out)
    vals = np.array([complex(v["re"], v["im"]) for v in rep["eigenvalues"]])
    assert np.min(np.abs(vals - 1)) <= 1e-10
    assert rep["second_unit_modulus_gap"] <= 0.02
    assert rep["cptp"]["trace_dev"] <= 1e-12
    assert "closed_form_max_dev" in rep


def test_invalid_parameter_exit_code_and_no_file(tmp_path):
    target = tmp_path / "spectrum.json"
    code, out, err = run(["spectrum", "--g", "1", "--dtf", "1", "--dtm", "-1", "--out", str(target)])
    assert code == 2
    assert not target.exists() and os.listdir(tmp_path) == []
    assert "non-negative" in err


@pytest.mark.parametrize("args", [
    [],
    ["spectrum", "--g", "1"],
    ["spectrum", "--g", "x", "--dtf", "1", "--dtm", "1"],
    ["scan", "--grid", "g=1:2"],
    ["trajectory", "--g", "1", "--dtf", "1", "--dtm", "1", "--detector", "1,1,1"],
    ["design"],
    ["nonsense"],
])
def test_usage_errors(args):
    code, out, err = run(args)
    assert code == 2 and out == "" and err


def test_numerical_failure_exit_code(monkeypatch):
    from zenolike.errors import NumericalFailure

    def boom(rc):
        raise NumericalFailure("did not converge")
    monkeypatch.setitem(cli.HANDLERS, "spectrum", boom)
    code, _, err = run(["spectrum", "--g", "1", "--dtf", "1", "--dtm", "1"])
    assert code == 1 and "numerical failure" in err


def test_scan_twice_byte_identical(tmp_path):
    args = ["scan", "--grid", "g=0.5:1.0:3,dtf=14:16:8,dtm=14:16:8"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)])[0] == 0
    assert run(args + ["--out", str(b), "--workers", "2"])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == SCAN_HEADER
    assert len(lines) == 1 + 3 * 8 * 8


def test_scan_csv_round_trip():
    res = zeno_scan(ScanGrid(g=(0.3, 0.9, 2), dtf=(1, 3, 3), dtm=(2, 5, 3)))
    text = scan_csv(res)
    import tempfile
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "s.csv")
        write_atomic(path, text)
        cols = read_scan_csv(path)
    assert np.array_equal(cols["g"], res.params[:, 0])
    assert np.array_equal(cols["min_gap"], res.min_gap)
    assert np.array_equal(cols["re_l1"], res.eigenvalues[:, 1].real)
    assert np.array_equal(cols["fp_z"], res.fixed_points[:, 2])


def test_write_atomic_keeps_old_content_on_failure(tmp_path):
    path = tmp_path / "x.txt"
    write_atomic(path, "old")

    class Boom:
        pass
    with pytest.raises(TypeError):
        write_atomic(path, Boom())
    assert path.read_text() == "old"
    assert os.listdir(tmp_path) == ["x.txt"]


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# trajectory settings\ng = 1.0\ndtf = 0.3\ndtm = 1.0\nn = 5\nrho0 = 0,0,1\n")
    code, out, _ = run(["trajectory", "--config", str(cfg)])
    assert code == 0 and len(out.splitlines()) == 1 + 6
    code, out, _ = run(["trajectory", "--config", str(cfg), "--n", "2"])
    assert code == 0 and len(out.splitlines()) == 1 + 3


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("unknown_key = 3\n")
    assert run(["scan", "--config", str(bad)])[0] == 2
    bad.write_text("no equals sign\n")
    assert run(["scan", "--config", str(bad)])[0] == 2
    assert run(["scan", "--config", str(tmp_path / "missing.cfg")])[0] == 2
    ok = tmp_path / "ok.cfg"
    ok.write_text("grid = g=0.5:0.5:1,dtf=1:1:1,dtm=1:2:2\nflagged_only = false\n")
    code, out, _ = run(["scan", "--config", str(ok)])
    assert code == 0 and len(out.splitlines()) == 3


def test_sweep_detector_command():
    code, out, _ = run(["sweep-detector", "--g", "1.1", "--dtf", "2.3", "--dtm", "3.7", "--n-dirs", "8",
                        "--n-radii", "2"])
    assert code == 0
    assert len(out.splitlines()) == 1 + 1 + 16


def test_design_command():
    code, out, _ = run(["design", "--target", "0,0,0"])
    rep = json.loads(out)
    assert code == 0 and rep["converged"] and rep["evaluations"] == 1


def test_trajectory_methods_agree():
    base = ["trajectory", "--g", "0.7", "--dtf", "1.2", "--dtm", "2.1", "--n", "50", "--rho0", "0.5,0.5,0"]
    _, a, _ = run(base)
    _, b, _ = run(base + ["--method", "spectral"])
    xa = np.loadtxt(io.StringIO(a), delimiter=",", skiprows=1)
    xb = np.loadtxt(io.StringIO(b), delimiter=",", skiprows=1)
    assert np.max(np.abs(xa - xb)) <= 1e-10


def test_kraus_command():
    code, out, _ = run(["kraus", "--g", "0.865", "--dtf", "15.13", "--dtm", "14.96", "--rho", "0,0,0"])
    rep = json.loads(out)
    assert code == 0
    assert len(rep["kraus"]) == 2
    assert rep["reconstruction_error"] <= 1e-10
    assert sum(rep["probabilities"]) == pytest.approx(1)


def test_reconcile_command(tmp_path):
    path = tmp_path / "rec.json"
    code, _, _ = run(["reconcile", "--points", "5", "--no-refine", "--out", str(path)])
    rep = json.loads(path.read_text())
    assert code == 0
    assert rep["closed_form"]["dual_path_max_dev"] <= 1e-12
    assert "refinement" not in rep["example"]


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "zenolike", "spectrum", "--g", "1", "--dtf", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
