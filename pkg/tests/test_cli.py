import csv
import io
import json
import subprocess
import sys

import pytest

from segprice.cli import RECORD_FIELDS, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def staircase_file(tmp_path, capsys):
    path = tmp_path / "stair.json"
    assert main(["generate", "staircase", "--k", "5", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


def test_generate_writes_instance(capsys):
    code, out, _ = run(["generate", "dirac", "--k", "3", "--eps", "0.1"], capsys)
    assert code == 0
    raw = json.loads(out)
    assert raw["construction"] == {"family": "dirac_worst_case", "K": 3, "epsilon": 0.1}


def test_generate_explicit(capsys):
    code, out, _ = run(["generate", "triangular", "--k", "2", "--explicit"], capsys)
    assert code == 0 and "explicit" in json.loads(out)


def test_analyze_machine_output(staircase_file, capsys):
    code, out, _ = run(["analyze", str(staircase_file), "--format", "machine"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert set(rec) == set(RECORD_FIELDS)
    assert rec["ratio"] == pytest.approx(60 / 137, abs=1e-9)
    assert rec["K"] == 5 and rec["common_support"] is False and rec["pi_midpoint"] is None


def test_analyze_table_output(staircase_file, capsys):
    code, out, _ = run(["analyze", str(staircase_file)], capsys)
    assert code == 0
    assert "ratio" in out and "0.43795620438\n" in out


def test_analyze_is_deterministic(staircase_file, capsys):
    first = run(["analyze", str(staircase_file), "--format", "machine"], capsys)[1]
    second = run(["analyze", str(staircase_file), "--format", "machine"], capsys)[1]
    assert first == second


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "triangular", "--k", "2,3,4", "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert tuple(rows[0]) == RECORD_FIELDS
    assert [r[1] for r in rows[1:]] == ["2", "3", "4"]
    ratio = float(rows[1][RECORD_FIELDS.index("ratio")])
    assert ratio == pytest.approx(7 / 9, abs=1e-11)
    assert rows[1][RECORD_FIELDS.index("ratio")] == "0.777777777778"


def test_sweep_rejects_family_without_K(capsys):
    code, _, err = run(["sweep", "tight-pair", "--k", "2"], capsys)
    assert code == 2 and "no K" in err


def test_construction_failure_exit_code(capsys):
    code, _, err = run(["generate", "tight-pair", "--a", "2", "--eps", "1e-4"], capsys)
    assert code == 3 and "[M-representable]" in err


@pytest.mark.parametrize("argv", [
    ["generate", "staircase"],                       # K missing
    ["generate", "bogus"],
    ["analyze", "/nonexistent/file.json"],
    ["sweep", "staircase", "--k", "2,x"],
    ["verify", "--n", "0"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bad_instance_file_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 7}')
    assert run(["analyze", str(bad)], capsys)[0] == 2


def test_screen(tmp_path, capsys):
    path = tmp_path / "tp.json"
    main(["generate", "tight-pair", "--a", "2", "--eps", "0.1", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(["screen", str(path), "--grid", "20", "--format", "machine"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["pi_static"] <= rep["pi_seq_threshold"] + 1e-12 <= rep["pi_star_bound"] + 1e-9
    assert "backend" not in rep


def test_screen_needs_common_support(staircase_file, capsys):
    assert run(["screen", str(staircase_file)], capsys)[0] == 2


def test_verify_small_batch(capsys):
    code, out, _ = run(["verify", "--seed", "7", "--n", "20", "--format", "machine"], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["failures"] == 0 and summary["status"] == "pass"
    assert summary["min_ratio"] >= 0.5


def test_module_entry_point(staircase_file):
    res = subprocess.run([sys.executable, "-m", "segprice", "analyze", str(staircase_file), "--format",
                          "machine"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["family"] == "staircase"
