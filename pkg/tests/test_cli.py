import json
import subprocess
import sys

import jsonschema
import pytest

from qsbits.cli import main

ROW_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "mu_rational": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "mu_decimal": {"type": "string", "pattern": r"^-?\d+(\.\d+)?$"},
    },
    "required": ["n", "m", "mu_rational", "mu_decimal"],
    "additionalProperties": False,
}
TABLE_SCHEMA = {"type": "array", "items": ROW_SCHEMA}
STATS_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer"},
        "n": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "bit_mean": {"type": "number"},
        "bit_stderr": {"type": "number", "minimum": 0},
        "key_mean": {"type": "number"},
        "key_stderr": {"type": "number", "minimum": 0},
    },
    "required": ["m", "n", "trials", "seed", "bit_mean", "bit_stderr", "key_mean", "key_stderr"],
    "additionalProperties": False,
}
REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "level": {"enum": ["quick", "full"]},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"name": {"type": "string"}, "passed": {"type": "boolean"}, "detail": {"type": "string"}},
                "required": ["name", "passed", "detail"],
            },
        },
    },
    "required": ["level", "passed", "checks"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_smallest(capsys):
    assert run(capsys, "exact", "--smallest", "-n", "3") == (0, "43/9 ≈ 4.777777777778\n", "")


def test_exact_integer_value(capsys):
    code, out, _ = run(capsys, "exact", "-m", "1", "-n", "2")
    assert (code, out) == (0, "2\n")


def test_exact_average_and_json(capsys):
    code, out, _ = run(capsys, "exact", "--average", "-n", "4", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"n": 4, "m": None, "kind": "average", "mu_rational": "184/21",
                               "mu_decimal": "8.761904761905"}
    code, out, _ = run(capsys, "exact", "-m", "2", "-n", "3", "--digits", "3")
    assert out == "50/9 ≈ 5.556\n"


@pytest.mark.parametrize("argv", [
    ["exact", "-m", "0", "-n", "5"],
    ["exact", "-m", "6", "-n", "5"],
    ["exact", "-n", "5"],
    ["exact", "--smallest", "--average", "-n", "5"],
    ["exact", "--smallest", "-n", "x"],
    ["table", "--max-n", "0"],
    ["table", "--format", "xml"],
    ["asympt", "--constant", "q"],
    ["asympt", "--constant", "c", "-n", "2"],
    ["simulate", "-m", "3", "-n", "2"],
    ["simulate", "-m", "1", "-n", "2", "--seed", "-4"],
    ["validate", "--level", "huge"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "usage" in err


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--max-n", "2", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,m,mu_rational,mu_decimal"
    assert len(lines) - 1 == 3
    assert out.endswith("\n")


def test_table_json_schema_and_round_trip(capsys):
    code, out, _ = run(capsys, "table", "--max-n", "5", "--format", "json")
    rows = json.loads(out)
    jsonschema.validate(rows, TABLE_SCHEMA)
    assert [(r["n"], r["m"]) for r in rows] == sorted((r["n"], r["m"]) for r in rows)
    code, csv_out, _ = run(capsys, "table", "--max-n", "5")
    csv_rows = [line.split(",") for line in csv_out.splitlines()[1:]]
    assert csv_rows == [[str(r["n"]), str(r["m"]), r["mu_rational"], r["mu_decimal"]] for r in rows]


def test_table_deterministic_and_file(capsys, tmp_path):
    _, a, _ = run(capsys, "table", "--max-n", "6")
    _, b, _ = run(capsys, "table", "--max-n", "6", "--workers", "2")
    assert a == b
    target = tmp_path / "t.csv"
    assert run(capsys, "table", "--max-n", "6", "-o", str(target))[1] == ""
    assert target.read_bytes() == a.encode("utf-8")


def test_table_symmetry_rows(capsys):
    _, out, _ = run(capsys, "table", "--max-n", "9", "--format", "json")
    cells = {(r["n"], r["m"]): r["mu_rational"] for r in json.loads(out)}
    for (n, m), v in cells.items():
        assert cells[(n, n + 1 - m)] == v


def test_asympt_constants(capsys):
    code, out, _ = run(capsys, "asympt", "--constant", "c", "--format", "json")
    d = json.loads(out)
    assert code == 0 and abs(float(d["value"]) - 5.27938) <= 5e-5
    assert len(d["value"].replace(".", "").lstrip("0")) == 10
    code, out, _ = run(capsys, "asympt", "--constant", "avg")
    assert out.startswith("avg = ")
    assert abs(float(out.split()[2]) - 8.20731) <= 5e-5
    code, out, _ = run(capsys, "asympt", "--constant", "c", "--k-max", "10", "--format", "json")
    assert json.loads(out)["k_max"] == 10


def test_asympt_with_n(capsys):
    code, out, _ = run(capsys, "asympt", "--constant", "c", "-n", "1024", "--format", "json")
    d = json.loads(out)
    assert d["n"] == 1024 and d["abs_difference"] < 10
    code, out, _ = run(capsys, "asympt", "--constant", "c", "-n", "1024")
    assert "expansion" in out and "|difference|" in out


def test_simulate_json(capsys):
    argv = ["simulate", "-m", "2", "-n", "5", "--trials", "2000", "--seed", "9"]
    code, out, _ = run(capsys, *argv)
    d = json.loads(out)
    jsonschema.validate(d, STATS_SCHEMA)
    assert (d["m"], d["n"], d["trials"], d["seed"]) == (2, 5, 2000, 9)
    assert run(capsys, *argv, "--workers", "2")[1] == out
    code, text, _ = run(capsys, *argv, "--format", "text")
    assert "bit comparisons" in text


def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--level", "quick", "--json")
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert code == 0 and report["passed"]
    code, again, _ = run(capsys, "validate", "--level", "quick", "--json")
    assert again == out


def test_validate_detects_corrupted_divisor(capsys):
    code, out, _ = run(capsys, "validate", "--c3-divisor", "printed")
    assert code == 1
    assert "FAIL  cascade identities" in out


@pytest.mark.slow
def test_validate_full(capsys):
    code, out, _ = run(capsys, "validate", "--level", "full")
    assert code == 0, out
    assert "cascade identities" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsbits", "exact", "--smallest", "-n", "3"],
                          capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.decode("utf-8") == "43/9 ≈ 4.777777777778\n"
