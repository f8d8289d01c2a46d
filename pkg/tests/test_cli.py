import csv
import io
import json
import math
import subprocess
import sys

import pytest

from sideband_ent.cli import (
    EXIT_CONFIG,
    EXIT_DOMAIN,
    EXIT_IO,
    EXIT_OK,
    EXIT_VALIDATION,
    anchor_warnings,
    main,
    oracle_tolerance,
)
from sideband_ent.model import Couplings

LAB_TEXT = """\
power = 10
laser_frequency = 2e15
mechanical_frequency = 5e8
detection_bandwidth = 1e7
mode_bandwidth = 1e3
effective_mass = 1e-10
"""


@pytest.fixture
def lab_cfg(tmp_path):
    path = tmp_path / "lab.cfg"
    path.write_text(LAB_TEXT)
    return path


def write_cfg(tmp_path, text, name="x.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(v) for v in row] for row in rows[1:]]


# --- params ------------------------------------------------------------------


def test_params_reference_inputs(lab_cfg, capsys):
    assert main(["params", "--config", str(lab_cfg)]) == EXIT_OK
    out = capsys.readouterr()
    report = json.loads(out.out)
    assert report["couplings"]["chi"] == pytest.approx(4.7e5, rel=0.01)
    assert report["warnings"] == []
    assert report["inputs"]["power"] == 10
    assert report["inputs"]["temperature"] == 300
    assert out.err == ""


def test_params_zero_temperature(tmp_path, capsys):
    cfg = write_cfg(tmp_path, LAB_TEXT + "temperature = 0\n")
    assert main(["params", "--config", cfg]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["couplings"]["nbar"] == 0


def test_params_off_anchor_warns(tmp_path, capsys):
    cfg = write_cfg(tmp_path, LAB_TEXT.replace("power = 10", "power = 1000"))
    assert main(["params", "--config", cfg]) == EXIT_OK
    out = capsys.readouterr()
    warnings = json.loads(out.out)["warnings"]
    assert any(w.startswith("chi") for w in warnings)
    assert "warning: chi" in out.err


def test_params_csv(lab_cfg, capsys):
    assert main(["params", "--config", str(lab_cfg), "--format", "csv"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["chi", "theta", "r", "big_theta", "nbar", "warnings"]
    assert float(rows[1][0]) == pytest.approx(4.7e5, rel=0.01)


def test_params_mechanical_above_optical(tmp_path, capsys):
    cfg = write_cfg(tmp_path, LAB_TEXT.replace("mechanical_frequency = 5e8", "mechanical_frequency = 3e15"))
    assert main(["params", "--config", cfg]) == EXIT_DOMAIN
    assert "mechanical_frequency" in capsys.readouterr().err


def test_params_negative_power(tmp_path, capsys):
    cfg = write_cfg(tmp_path, LAB_TEXT.replace("power = 10", "power = -1"))
    assert main(["params", "--config", cfg]) == EXIT_CONFIG
    assert "power" in capsys.readouterr().err


def test_params_empty_file_lists_missing(tmp_path, capsys):
    assert main(["params", "--config", write_cfg(tmp_path, "")]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "power" in err and "effective_mass" in err


def test_params_missing_file(tmp_path):
    assert main(["params", "--config", str(tmp_path / "nope.cfg")]) == EXIT_IO


def test_params_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(LAB_TEXT))
    assert main(["params", "--config", "-"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["warnings"] == []


def test_anchor_warnings_flag_each_quantity():
    c = Couplings(chi=1.0, theta=1.0, r=1.5, big_theta=1.0, nbar=0.0)
    assert [w.split(" ")[0] for w in anchor_warnings(c)] == ["chi", "theta", "r_minus_1", "big_theta"]


# --- sweep / epr -------------------------------------------------------------


def test_sweep_default_columns(capsys):
    assert main(["sweep", "--points", "3", "--nbar", "0"]) == EXIT_OK
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "nbar", "T_raw", "T_norm", "delta_minus", "delta_plus", "A", "B", "C", "D", "E", "F"]
    assert len(rows) == 3


def test_sweep_default_nbar_set(capsys):
    assert main(["sweep", "--points", "2", "--outputs", "T_norm"]) == EXIT_OK
    _, rows = read_csv(capsys.readouterr().out)
    assert [r[1] for r in rows] == [0, 1e5, 5e6, 1e7] * 2


def test_sweep_row_order_tau_major(capsys):
    assert main(["sweep", "--points", "3", "--nbar", "0,1e5", "--outputs", "T_norm"]) == EXIT_OK
    _, rows = read_csv(capsys.readouterr().out)
    assert [(r[0], r[1]) for r in rows] == [
        (0, 0), (0, 1e5), (math.pi, 0), (math.pi, 1e5), (2 * math.pi, 0), (2 * math.pi, 1e5),
    ]


def test_sweep_marker_dataset(capsys):
    assert main(["sweep", "--points", "101", "--outputs", "T_norm"]) == EXIT_OK
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "nbar", "T_norm"]
    for tau, _, t in rows:
        assert t <= 1e-9
        if tau == pytest.approx(math.pi):
            assert t == pytest.approx(-1, abs=1e-12)


def test_sweep_periodic_boundary(capsys):
    assert main(["sweep", "--points", "2", "--outputs", "T_norm"]) == EXIT_OK
    _, rows = read_csv(capsys.readouterr().out)
    assert all(abs(r[2]) <= 1e-9 for r in rows)


def test_epr_dataset(capsys):
    assert main(["epr", "--points", "3"]) == EXIT_OK
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "nbar", "delta_minus", "delta_plus"]
    mid = rows[1]
    assert mid[1] == 1e5
    assert mid[2] == pytest.approx(1.5625e-14, rel=1e-5)
    assert mid[3] == pytest.approx(6.4e13, rel=1e-5)


def test_sweep_config_file_with_flag_override(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "points = 5\nnbar_list = 7\noutputs = delta_plus\nr = 1.5\n")
    assert main(["sweep", "--config", cfg, "--points", "4"]) == EXIT_OK
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "nbar", "delta_plus"]
    assert len(rows) == 4 and rows[0][1] == 7


def test_sweep_json(capsys):
    assert main(["sweep", "--points", "2", "--nbar", "0", "--outputs", "T_norm", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["spec"]["points"] == 2
    assert set(doc["rows"][0]) == {"tau", "nbar", "T_norm"}


def test_sweep_deterministic(tmp_path):
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for out in outs:
        assert main(["sweep", "--points", "25", "--out", str(out)]) == EXIT_OK
    assert outs[0].read_bytes() == outs[1].read_bytes()


def test_sweep_unwritable_output(tmp_path, capsys):
    assert main(["sweep", "--points", "2", "--out", str(tmp_path / "missing" / "x.csv")]) == EXIT_IO
    assert "I/O error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["--points", "1"], ["--tau-min", "3", "--tau-max", "1"], ["--nbar", "-5"]])
def test_sweep_bad_spec_exit_2(argv, capsys):
    assert main(["sweep", *argv]) == EXIT_CONFIG


def test_sweep_degenerate_ratio_exit_3():
    assert main(["sweep", "--r", "1", "--points", "2"]) == EXIT_DOMAIN


def test_sweep_bad_config_exit_2(tmp_path):
    assert main(["sweep", "--config", write_cfg(tmp_path, "points = lots\n")]) == EXIT_CONFIG


def test_unknown_output_rejected_by_parser():
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--outputs", "colour"])
    assert exc.value.code == 2


# --- validate ----------------------------------------------------------------


def test_tolerance_regimes():
    assert oracle_tolerance(1.5) == 1e-8
    assert oracle_tolerance(1 + 2.5e-7) == 1e-6


def test_validate_well_conditioned(capsys):
    assert main(["validate", "--r", "1.5", "--nbar", "0,10", "--points", "200"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and doc["tolerance"] == 1e-8
    assert len(doc["runs"]) == 2
    assert all(run["max_rel_dev"] <= 1e-8 for run in doc["runs"])
    assert set(doc["runs"][0]["per_coefficient"]) == set("ABCDEF")


def test_validate_near_degenerate(capsys):
    assert main(["validate", "--r", str(1 + 2.5e-7), "--nbar", "1e5", "--points", "200"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["tolerance"] == 1e-6 and doc["runs"][0]["max_rel_dev"] <= 1e-6


def test_validate_refuses_extreme_ratio(capsys):
    assert main(["validate", "--r", str(1 + 1e-13)]) == EXIT_DOMAIN
    assert "refusing" in capsys.readouterr().err


def test_validate_breach_reports_location(monkeypatch, capsys):
    from sideband_ent import cli

    monkeypatch.setattr(cli, "oracle_tolerance", lambda r: 1e-30)
    assert main(["validate", "--r", "1.5", "--points", "20"]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "tau=" in err and "coefficient" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sideband_ent", "sweep", "--points", "2", "--nbar", "0", "--outputs", "T_norm"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "tau,nbar,T_norm"
