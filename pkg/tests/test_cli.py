import json

import numpy as np
import pytest

from hmin import cli
from hmin import states as st
from hmin.verify import CheckResult


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.json"
    st.save_state(st.bell_state(), path)
    return path


def test_measure_bell(bell_file, capsys):
    assert cli.main(["measure", str(bell_file), "--measures", "h_min,hs_min,upper_bound"]) == 0
    out = json.loads(capsys.readouterr().out)
    vals = {r["name"]: r["value"] for r in out["measures"]}
    assert vals["h_min"] == pytest.approx(0.5, abs=1e-8)
    assert vals["hs_min"] == pytest.approx(0.5, abs=1e-8)
    assert vals["upper_bound"] == pytest.approx(0.75)


def test_measure_paper_scale(bell_file, capsys):
    assert cli.main(["measure", str(bell_file), "--paper-scale"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["paper_scale"] and out["measures"][0]["value"] == pytest.approx(1.0, abs=1e-8)


def test_measure_unconverged_exit_code(bell_file, capsys):
    assert cli.main(["measure", str(bell_file), "--budget", "30"]) == cli.EXIT_UNCONVERGED
    assert "did not converge" in capsys.readouterr().err
    assert cli.main(["measure", str(bell_file), "--budget", "30", "--allow-unconverged"]) == 0


@pytest.mark.parametrize("text", ["{broken", '{"m": 2, "n": 2, "matrix": [[[0.5, 0]]]}'])
def test_corrupt_state_file_exit_2(tmp_path, capsys, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    assert cli.main(["measure", str(path)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file_exit_2(tmp_path):
    assert cli.main(["measure", str(tmp_path / "nope.json")]) == 2


def test_sweep_csv_format(tmp_path):
    out = tmp_path / "werner.csv"
    assert cli.main(["sweep", "werner", "--range", "-1", "1", "5", "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = raw.decode().splitlines()
    assert rows[0] == "param,h_min,hs_min"
    assert len(rows) == 6
    table = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    np.testing.assert_allclose(table[:, 0], [-1, -0.5, 0, 0.5, 1])
    assert table[0, 1] == pytest.approx(0.5) and table[3, 1] == 0.0 and table[4, 1] == pytest.approx(1 / 6)


def test_sweep_paper_scale_and_numeric(capsys):
    assert cli.main(["sweep", "bell_diagonal", "--range", "0", "1", "3", "--paper-scale"]) == 0
    closed = capsys.readouterr().out
    last = closed.strip().splitlines()[-1].split(",")
    assert float(last[1]) == pytest.approx(1.0) and float(last[2]) == pytest.approx(1.0)
    assert cli.main(["sweep", "bell_diagonal", "--range", "0", "1", "3", "--paper-scale", "--numeric"]) == 0
    numeric = capsys.readouterr().out
    a = np.array([[float(v) for v in r.split(",")] for r in closed.splitlines()[1:]])
    b = np.array([[float(v) for v in r.split(",")] for r in numeric.splitlines()[1:]])
    np.testing.assert_allclose(a, b, atol=2e-6)


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "werner", "--range", "-2", "1", "5"],
        ["sweep", "isotropic", "--range", "0", "1", "1"],
        ["sweep", "bell_diagonal", "--range", "0", "1", "5", "--dim", "3"],
        ["sweep", "werner", "--range", "0", "1", "3", "--measures", "nope"],
    ],
)
def test_sweep_input_errors(argv):
    assert cli.main(argv) == 2


def test_seqweak(bell_file, capsys):
    assert cli.main(["seqweak", str(bell_file), "--x", "3", "--n-max", "10"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "x,n,H0n" and len(rows) == 12
    assert float(rows[1].split(",")[2]) == 0.0
    assert float(rows[-1].split(",")[2]) == pytest.approx(0.5, abs=1e-3)
    assert cli.main(["seqweak", str(bell_file), "--x", "-1"]) == 2


def test_state_command_roundtrip(tmp_path):
    out = tmp_path / "w.json"
    assert cli.main(["state", "werner", "--params", "0.3", "--dim", "3", "--out", str(out)]) == 0
    np.testing.assert_allclose(st.load_state(out).matrix, st.werner(3, 0.3).matrix)


def test_verify_exit_code_on_failure(monkeypatch, capsys):
    fake = [CheckResult("ok", True, 0.0, 1e-6), CheckResult("bad", False, 1.0, 1e-6)]
    monkeypatch.setattr(cli, "run_verification", lambda *a, **k: fake)
    assert cli.main(["verify"]) == 1
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is False
    assert "FAIL bad" in captured.err


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--battery-size", "1", "--out", str(a)]) == 0
    assert cli.main(["verify", "--battery-size", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["checks"]["x0_branch_arbitration"]["info"]["winner"] == "restricted"


def test_verify_rejects_non_psd_extra_state(tmp_path):
    path = tmp_path / "neg.json"
    mat = [[[1.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]]
    path.write_text(json.dumps({"m": 2, "n": 1, "matrix": mat}))
    assert cli.main(["verify", "--battery-size", "1", "--state", str(path)]) == 2
