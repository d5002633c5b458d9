"""Command-line interface: outputs, formats, exit codes, reproducibility."""

import csv
import io
import json

import pytest

from advbound import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bound_gamma2_jminusf(capsys):
    code, out, _ = run(capsys, "bound", "--function", "OR:2",
                       "--bound", "gamma2", "--matrix", "JminusF")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == 1 and d["version"]
    assert d["report"]["value"] <= 2 + 1e-6


def test_bound_madv_closed_form(capsys):
    code, out, _ = run(capsys, "bound", "--function", "ID:1",
                       "--bound", "madv", "--c", "1.5")
    assert code == 0
    assert json.loads(out)["report"]["value"] == pytest.approx(1.0, abs=1e-6)


def test_bound_const_adv_zero(capsys):
    code, out, _ = run(capsys, "bound", "--function", "CONST:2", "--bound", "adv")
    assert code == 0
    assert json.loads(out)["report"]["value"] == 0.0


def test_bound_madv_missing_c_is_usage_error(capsys):
    code, _, err = run(capsys, "bound", "--function", "ID:1", "--bound", "madv")
    assert code == cli.EXIT_USAGE
    assert "required" in json.loads(err.splitlines()[0])["error"]


def test_unknown_function_is_usage_error(capsys):
    code, _, _ = run(capsys, "bound", "--function", "NOPE:7", "--bound", "adv")
    assert code == cli.EXIT_USAGE


def test_bound_csv_projection(capsys):
    code, out, _ = run(capsys, "bound", "--function", "ID:1", "--bound",
                       "madv", "--c", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(1.0, abs=1e-6)
    assert "witness" not in rows[0]  # lossy projection


def test_byte_reproducibility(tmp_path, capsys):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        code, _, _ = run(capsys, "bound", "--function", "OR:2", "--bound",
                         "adv", "--seed", "5", "-o", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verify_suite_dpt(tmp_path, capsys):
    out_path = tmp_path / "v.json"
    code, _, err = run(capsys, "verify", "--suite", "dpt", "--seed", "42",
                       "-o", str(out_path))
    assert code == 0
    d = json.loads(out_path.read_text())
    assert d["passed"] and all(row["ok"] for row in d["checks"])
    assert "[PASS]" in err


def test_dpt_grid_linear_in_k(capsys):
    code, out, _ = run(capsys, "dpt", "--formula", "sdpt", "--k", "1..16",
                       "--delta", "0.8", "--adv", "1.414")
    assert code == 0
    table = json.loads(out)["table"]
    assert len(table) == 16
    v1 = table[0]["value"]
    for i, row in enumerate(table, 1):
        assert row["value"] == pytest.approx(i * v1, abs=1e-9)


def test_dpt_threshold_single(capsys):
    code, out, _ = run(capsys, "dpt", "--formula", "threshold", "--k", "10",
                       "--K", "10", "--delta", "0.25", "--mu", "0.9")
    assert code == 0
    row = json.loads(out)["table"][0]
    assert row["value"] == pytest.approx(1.3170530734924617, abs=1e-9)


def test_dpt_xor_example(capsys):
    code, out, _ = run(capsys, "dpt", "--formula", "xor", "--k", "8",
                       "--delta", "1", "--adv", "1")
    assert code == 0
    assert json.loads(out)["table"][0]["value"] == 1.0


def test_dpt_precondition_violation(capsys):
    code, _, err = run(capsys, "dpt", "--formula", "sdpt", "--k", "4",
                       "--delta", "0.5", "--adv", "1")
    assert code == cli.EXIT_USAGE


def test_function_file_input(tmp_path, capsys):
    spec = tmp_path / "negate.txt"
    spec.write_text("arity: 1\nalphabet: 2\ncodomain: 2\n0 -> 1\n1 -> 0\n")
    code, out, _ = run(capsys, "bound", "--function", str(spec),
                       "--bound", "adv")
    assert code == 0
    assert json.loads(out)["report"]["value"] == pytest.approx(1.0, abs=1e-6)


def test_atomic_write_leaves_no_temp(tmp_path, capsys):
    out_path = tmp_path / "x.json"
    run(capsys, "dpt", "--formula", "xor", "--k", "2", "--delta", "0.5",
        "--adv", "1", "-o", str(out_path))
    assert out_path.exists()
    assert [p.name for p in tmp_path.iterdir()] == ["x.json"]


def test_usage_error_exit_code(capsys):
    assert cli.main(["bound"]) == cli.EXIT_USAGE  # missing required flags
