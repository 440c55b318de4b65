import json
import math
import subprocess
import sys

import pytest

from barrier_times import cli
from barrier_times import delay_times as dt
from barrier_times import sweep
from barrier_times.snapshots import read_snapshots


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def keyvals(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def write_config(tmp_path, **overrides):
    cfg = {
        "schema_version": 1,
        "barrier": {"V0": 0.0, "L": 2 * math.pi, "m": 1.0},
        "packet": {"k0": math.sqrt(0.5), "dk": 0.1 * math.sqrt(0.5)},
        "mode": "single",
        "grid": {"N": 2048},
    }
    cfg.update(overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path


@pytest.mark.parametrize("text, value", [("4pi", 4 * math.pi), ("pi", math.pi), ("0.5*pi", 0.5 * math.pi), ("3", 3.0)])
def test_parse_wl(text, value):
    assert cli.parse_wl(text) == pytest.approx(value, rel=1e-15)


def test_times_to_stdout_and_file(tmp_path, capsys):
    code, out, _ = run(["times", "--wl", "4pi", "--steps", "21"], capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(sweep.COLUMNS)
    assert len(out.splitlines()) == 22
    target = tmp_path / "t.csv"
    code, out2, _ = run(["times", "--wl", "4pi", "--steps", "21", "--out", str(target)], capsys)
    assert code == 0 and out2 == ""
    assert target.read_text() == out


def test_times_invalid_range_writes_nothing(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, _, err = run(["times", "--n-min", "0.9", "--n-max", "0.1", "--out", str(target)], capsys)
    assert code == 2
    assert "n_min" in err
    assert list(tmp_path.iterdir()) == []


def test_amplitudes_with_oracle(capsys):
    code, out, _ = run(["amplitudes", "--wl", "2pi", "--n", "0.5", "--oracle"], capsys)
    assert code == 0
    rec = keyvals(out)
    assert float(rec["T2"]) + float(rec["R2"]) == pytest.approx(1.0, abs=1e-12)
    assert rec["abs_R_plus_T"] == "1.000000000000"
    assert rec["abs_R_minus_T"] == "1.000000000000"
    assert float(rec["oracle_T2"]) == pytest.approx(float(rec["T2"]), rel=1e-12)
    assert float(rec["oracle_max_abs_diff"]) < 1e-12


def test_amplitudes_out_of_range(capsys):
    code, _, err = run(["amplitudes", "--wl", "2pi", "--n", "1.2"], capsys)
    assert code == 2
    assert "n" in err


def test_simulate_free_flight(tmp_path, capsys):
    snap = tmp_path / "run.bts"
    path = write_config(tmp_path, snapshots=str(snap))
    code, out, _ = run(["simulate", "--config", str(path)], capsys)
    assert code == 0
    rec = keyvals(out)
    assert abs(float(rec["time_relative_deviation"])) < 0.02
    assert abs(float(rec["dwell_relative_deviation"])) < 0.03
    assert float(rec["norm_drift"]) < 1e-8
    assert read_snapshots(snap).density.shape[1] == 2048


def test_simulate_parity_run(tmp_path, capsys):
    path = write_config(
        tmp_path, barrier={"V0": 0.5, "L": 2 * math.pi}, mode="parity-", grid={"N": 2048}
    )
    code, out, _ = run(["simulate", "--config", str(path)], capsys)
    assert code == 0
    rec = keyvals(out)
    assert float(rec["analytic_time"]) == pytest.approx(
        dt.phase_time_parity(cli.BarrierSpec(0.5, 2 * math.pi), math.sqrt(0.5), "-"), rel=1e-10
    )
    assert float(rec["parity_residual"]) < 1e-8


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"barrier": {"V0": 0.5, "L": "wide"}}, "barrier.L"),
        ({"barrier": {"V0": -0.5, "L": 2.0}}, "barrier.V0"),
        ({"packet": {"k0": 0.7}}, "packet.dk"),
        ({"packet": {"k0": 0.7, "dk": 0.07, "side": "up"}}, "packet.side"),
        ({"mode": "both"}, "mode"),
        ({"schema_version": 2}, "schema_version"),
        ({"grid": {"N": 1000}}, "grid"),
    ],
)
def test_simulate_bad_config_names_field(tmp_path, capsys, overrides, field):
    path = write_config(tmp_path, **overrides)
    code, _, err = run(["simulate", "--config", str(path)], capsys)
    assert code == 2
    assert field in err


def test_simulate_unreadable_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["simulate", "--config", str(bad)], capsys)
    assert code == 2 and "invalid JSON" in err
    code, _, err = run(["simulate", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2 and "cannot read" in err


def test_check_passes(capsys):
    code, out, _ = run(["check"], capsys)
    assert code == 0
    assert "parity preservation" in out
    assert "FAIL" not in out


def test_check_fast_skips_wave_packets(capsys):
    code, out, _ = run(["check", "--fast"], capsys)
    assert code == 0
    assert "parity preservation" not in out


def test_check_catches_sign_flip(monkeypatch, capsys):
    # reintroduce the opposite sign convention for the antisymmetric phase time
    original = dt.normalized_phase_time_parity

    def flipped(n, alpha, parity, eps=None):
        value = original(n, alpha, parity, eps)
        return -value if parity == "-" else value

    monkeypatch.setattr(dt, "normalized_phase_time_parity", flipped)
    code, out, _ = run(["check", "--fast"], capsys)
    assert code == 1
    assert "first failing check: decomposition identity" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "barrier_times", "amplitudes", "--wl", "pi", "--n", "0.3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "T2=" in proc.stdout
