import csv
import hashlib
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from quadlink.cli import format_row, main
from quadlink.config import parse_config
from quadlink.sim import LOG_COLUMNS

SHORT = """\
schedule.t_ready_start = 1.0
schedule.t_ready_converge = 1.5
schedule.t_accel_start = 2.0
schedule.t_accel_end = 4.0
schedule.t_end = 6.0
schedule.v_cruise = 2.0
plan.alpha_cruise = 0.1
plan.v_knee = 1.0
report.window = 1.0
"""


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def write_cfg(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_check_ok(capsys):
    assert main(["check"]) == 0
    assert parse_config().digest() in capsys.readouterr().out


def test_check_reports_invalid_config(tmp_path, capsys):
    assert main(["check", "--config", write_cfg(tmp_path, "vehicle.m = -1\n")]) == 1
    assert "vehicle.m" in capsys.readouterr().err


def test_check_reports_parse_error(tmp_path, capsys):
    assert main(["check", "--config", write_cfg(tmp_path, "vehicle.m = 1\nbogus\n")]) == 1
    assert "line 2" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["check", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["fly"]) == 1
    assert main(["trim", "--dv", "0", "--out", str(tmp_path)]) == 1
    assert main(["trim", "--dv", "-1", "--out", str(tmp_path)]) == 1
    assert main(["trim", "--v-min", "5", "--v-max", "1", "--out", str(tmp_path)]) == 1
    assert main(["simulate", "--decimate", "0", "--out", str(tmp_path)]) == 1


def test_trim_single_row(tmp_path):
    assert main(["trim", "--v-min", "0", "--v-max", "0", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "trim.csv")
    assert ",".join(header) == "v,alpha,chi,f_f,f_b,residual,rank"
    assert rows.shape == (1, 7)
    v, alpha, chi, *_ = rows[0]
    # the curve starts at the ready posture alpha_start
    assert v == 0 and alpha == 0.15 and chi == pytest.approx(math.atan(-2 * math.tan(0.15)), abs=1e-12)


def test_trim_hover_row(tmp_path):
    cfg = write_cfg(tmp_path, "plan.alpha_start = 0.0\n")
    assert main(["trim", "--config", cfg, "--v-max", "0", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "trim.csv")
    assert np.allclose(rows[0], [0, 0, 0, 2.4525, 2.4525, 0, 4], atol=1e-12)


def test_trim_curve_and_manifest(tmp_path):
    assert main(["trim", "--dv", "0.5", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "trim.csv")
    assert rows.shape == (41, 7)
    assert np.all(rows[:, 6] == 4) and np.max(np.abs(rows[:, 5])) < 1e-9
    m = json.loads((tmp_path / "trim.manifest.json").read_text())
    assert m["config_hash"] == parse_config().digest()
    assert m["subcommand"] == "trim" and m["tool_version"]
    (out,) = m["outputs"]
    assert out["sha256"] == hashlib.sha256((tmp_path / "trim.csv").read_bytes()).hexdigest()


def test_gains(tmp_path, reference):
    assert main(["gains", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "gains.csv")
    assert rows.shape == (801, len(header)) and len(header) == 3 + 45 + 9 + 5
    assert np.allclose(rows[:, 0], np.arange(801) * 0.1, atol=1e-12)
    hover = rows[rows[:, 1] == 0]
    assert len(hover) == 200 and np.all(hover[:, 2] == 4)
    assert np.all(hover[:, 1:] == hover[0, 1:])
    assert np.all(hover[:, 3 + 36 : 3 + 45] == 0)  # padded fifth input row
    e = reference.gains.entries[600]
    assert np.array_equal(rows[600, 3:48].reshape(5, 9), e.K)
    m = json.loads((tmp_path / "gains.manifest.json").read_text())
    assert m["config_hash"] == parse_config().digest()


def test_gains_rejects_indefinite_weights(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "lqr.R_hover = [100, -200, 200, 100]\n")
    assert main(["gains", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "lqr.R_hover" in capsys.readouterr().err
    assert not (tmp_path / "gains.csv").exists()


def test_gains_zero_cruise_weight_is_a_synthesis_failure(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "lqr.Q_cruise = [0, 0, 0, 0, 0, 0, 0, 0, 0]\n")
    assert main(["gains", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "t=20" in capsys.readouterr().err
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_simulate_divergence_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "schedule.dt = 0.02\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 3
    assert "last valid t=" in capsys.readouterr().err


def test_simulate_decimation_and_round_trip(tmp_path):
    cfg = write_cfg(tmp_path, SHORT)
    fine, coarse = tmp_path / "fine", tmp_path / "coarse"
    # the short schedule misses its tolerances, so the exit code is 3
    assert main(["simulate", "--config", cfg, "--out", str(fine)]) == 3
    assert main(["simulate", "--config", cfg, "--decimate", "100", "--out", str(coarse)]) == 3
    header, a = read_csv(fine / "log.csv")
    _, b = read_csv(coarse / "log.csv")
    assert header == LOG_COLUMNS
    assert (fine / "log.csv").read_text().splitlines()[0] == (
        "t,x,y,z,vx,vy,vz,phi,theta,psi,wx,wy,wz,chi,chi_dot,f1,f2,f3,f4,f5,f6,phase,v_ref,alpha_ref,chi_ref,chi_nom"
    )
    assert len(a) == 601 and len(b) == 61
    assert np.array_equal(b, a[::10])
    assert (fine / "summary.txt").exists()
    m = json.loads((coarse / "log.manifest.json").read_text())
    assert m["config_hash"] != json.loads((fine / "log.manifest.json").read_text())["config_hash"]


@pytest.mark.parametrize("x", [0.1, 1 / 3, -2.5e-300, 12345.678901234567, math.pi, 1e22, 0.0, -0.0])
def test_csv_number_round_trip(x):
    assert float(format_row([x])) == x
    assert "," not in format_row([x])


def test_quadlink_log_env(tmp_path):
    env = {"QUADLINK_LOG": "DEBUG", "PATH": "/usr/bin:/bin"}
    r = subprocess.run(
        [sys.executable, "-m", "quadlink", "check"], capture_output=True, text=True, env={**env, **_pyenv()}
    )
    assert r.returncode == 0 and "configuration OK" in r.stdout


def _pyenv():
    import os

    return {k: v for k, v in os.environ.items() if k.startswith("PYTHON")}
