import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from kpbloch.cli import main

PI = math.pi
EXAMPLE = ["--a", "-1", "--c", "0.5", "--pi-units"]
REFERENCE = {
    "lambda_0": -0.100720167503, "lambda_1,1": 3.953707280198, "lambda_1,2": 3.976894161836,
    "lambda_2,1": 15.974913551204, "lambda_2,2": 15.983422370241, "mu_1,1": 0.317539742073,
    "mu_1,2": 1.578063115969, "mu_2,1": 8.768711027230, "mu_2,2": 9.180457181326,
}
REFERENCE_GAPS = [12.440867038680, 0.228845349062, 4.063771654597, 0.083978677816]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_eigen_table_lists_all_sectors(capsys):
    code, out, _ = run(capsys, "eigen", *EXAMPLE)
    assert code == 0
    for label in REFERENCE:
        assert label in out
    assert "strict" in out


def test_eigen_json_schema(capsys):
    code, rep = run_json(capsys, "eigen", *EXAMPLE)
    assert code == 0
    assert list(rep) == ["config", "eigenvalues", "gaps", "bands"]
    row = rep["eigenvalues"][0]
    assert list(row) == ["sector", "n", "j", "value", "bound", "iterations", "condition"]
    assert rep["config"]["b"] == pytest.approx(1.0, rel=1e-15)
    assert len(rep["eigenvalues"]) == 9


def test_eigen_matches_reference_table(capsys):
    _, rep = run_json(capsys, "eigen", *EXAMPLE, "--n-max", "2", "--r", "5", "--s", "5")
    got = {row["sector"]: row["value"] for row in rep["eigenvalues"]}
    for label, ref in REFERENCE.items():
        assert abs(got[label] - ref) <= 1e-9, label


def test_explicit_b_equals_derived_b(capsys):
    _, derived = run_json(capsys, "eigen", *EXAMPLE)
    _, explicit = run_json(capsys, "eigen", "--a", "-1", "--b", "1", "--c", "0.5", "--pi-units")
    assert derived["eigenvalues"] == explicit["eigenvalues"]


def test_bad_c_is_config_error(capsys):
    code, _, err = run(capsys, "eigen", "--a", "-1", "--c", "1.5")
    assert code == 1
    assert "c must be in (0,1)" in err


def test_corrupt_b_is_config_error(capsys):
    code, _, err = run(capsys, "verify", "--a", "-1", "--b", "1.01", "--c", "0.5", "--pi-units")
    assert code == 1
    assert "b" in err and "mean" in err


@pytest.mark.parametrize("argv, field", [(["--r", "0"], "r"), (["--n-max", "-1"], "n_max"),
                                         (["--eps", "0"], "eps"), (["--tol", "2"], "tol")])
def test_other_config_errors_name_field(capsys, argv, field):
    code, _, err = run(capsys, "eigen", *EXAMPLE, *argv)
    assert code == 1
    assert field in err


def test_missing_a(capsys):
    code, _, err = run(capsys, "eigen", "--c", "0.5")
    assert code == 1 and "a is required" in err


@pytest.mark.parametrize("argv", [["eigen", "--a"], ["eigen", "--format", "xml"], ["nope"], []])
def test_usage_errors_exit_as_config_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_violated_exit_code(capsys):
    code, rep = run_json(capsys, "eigen", "--a", "-1.5", "--c", "0.5", "--pi-units", "--n-max", "1")
    assert code == 2
    row = rep["eigenvalues"][0]
    assert row["condition"] == "violated" and row["value"] is None


def test_relaxed_run_has_null_bounds(capsys):
    code, rep = run_json(capsys, "eigen", "--a", "-1.5", "--c", "0.5", "--pi-units",
                         "--n-max", "0", "--relaxed")
    assert code == 0
    row = rep["eigenvalues"][0]
    assert row["condition"] == "relaxed" and row["bound"] is None and row["value"] is not None


def test_nonconvergence_exit_code(capsys):
    code, rep = run_json(capsys, "eigen", *EXAMPLE, "--max-iter", "2")
    assert code == 3
    assert {row["condition"] for row in rep["eigenvalues"]} == {"nonconverged"}


def test_gaps_columns_and_oracle_agreement(capsys):
    code, rep = run_json(capsys, "gaps", *EXAMPLE, "--oracle")
    assert code == 0
    ks = [g["k"] for g in rep["gaps"]]
    assert ks == sorted(set(ks)) == [1, 2, 3, 4]
    for g in rep["gaps"]:
        assert g["length"] >= 0
        assert abs(g["length"] - g["oracle"]) <= g["bound"]


def test_gaps_match_reference_table(capsys):
    _, rep = run_json(capsys, "gaps", "--a", "-1", "--c", "0.5", "--pi-units")
    got = [g["length"] * PI**2 for g in rep["gaps"]]
    assert np.allclose(got, REFERENCE_GAPS, rtol=0, atol=1e-8)


def test_bands_ordered(capsys):
    code, rep = run_json(capsys, "bands", *EXAMPLE, "--oracle")
    assert code == 0
    for b in rep["bands"]:
        assert b["left"] < b["right"]
        assert b["oracle_left"] < b["oracle_right"]
    for b1, b2 in zip(rep["bands"], rep["bands"][1:]):
        assert b1["right"] < b2["left"]


def test_verify_example_all_pass(capsys):
    code, out, _ = run(capsys, "verify", *EXAMPLE)
    assert code == 0
    assert "FAIL" not in out
    assert out.strip().endswith("PASS  all checks")


def test_verify_skips_violated_sectors(capsys):
    code, out, _ = run(capsys, "verify", "--a", "-1.5", "--c", "0.5", "--pi-units", "--n-max", "1")
    assert "SKIP  solver lambda_0" in out
    assert code == 0


def test_asym_rows(capsys):
    code, out, _ = run(capsys, "asym", *EXAMPLE, "--n-max", "40", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 80
    for r in rows:
        if int(r["k"]) % 2 == 0:
            assert r["first_order_zero"] == "True"
    per = [(int(r["n"]), float(r["scaled_residual"])) for r in rows
           if r["kind"] == "periodic" and int(r["n"]) >= 5]
    n, y = map(np.array, zip(*per))
    assert np.polyfit(np.log(n), np.log(y), 1)[0] < 0


def test_asym_eps_is_threaded(capsys):
    _, strict = run_json(capsys, "asym", *EXAMPLE, "--n-max", "1", "--eps", "1")
    _, loose = run_json(capsys, "asym", *EXAMPLE, "--n-max", "1", "--eps", "0.1")
    assert strict["asymptotics"][0]["condition_c"] is False
    assert loose["asymptotics"][0]["condition_c"] is True
    assert strict["config"]["eps"] == 1.0 and loose["config"]["eps"] == 0.1


@pytest.mark.parametrize("fmt", ["json", "csv"])
@pytest.mark.parametrize("cmd", ["eigen", "gaps", "bands", "asym"])
def test_output_is_byte_deterministic(capsys, cmd, fmt):
    _, first, _ = run(capsys, cmd, *EXAMPLE, "--format", fmt, "--oracle")
    _, second, _ = run(capsys, cmd, *EXAMPLE, "--format", fmt, "--oracle")
    assert first == second


def test_pi_units_round_trip(capsys):
    _, scaled = run_json(capsys, "eigen", *EXAMPLE)
    _, raw = run_json(capsys, "eigen", "--a", str(-PI**2), "--c", "0.5")
    for s, r in zip(scaled["eigenvalues"], raw["eigenvalues"]):
        assert s["value"] * PI**2 == pytest.approx(r["value"], rel=1e-12)


def test_csv_has_header_and_one_row_per_eigenvalue(capsys):
    _, out, _ = run(capsys, "eigen", *EXAMPLE, "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "sector,n,j,value,bound,iterations,condition"
    assert len(lines) == 10


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"a": -1, "c": 0.5, "pi_units": True, "n_max": 1, "format": "json"}))
    _, out, _ = run(capsys, "eigen", "--config", str(cfg))
    assert len(json.loads(out)["eigenvalues"]) == 5
    _, out, _ = run(capsys, "eigen", "--config", str(cfg), "--n-max", "2")
    assert len(json.loads(out)["eigenvalues"]) == 9


def test_config_file_unknown_field(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"a": -1, "c": 0.5, "depth": 3}))
    code, _, err = run(capsys, "eigen", "--config", str(cfg))
    assert code == 1 and "depth" in err


def test_output_path(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "gaps", *EXAMPLE, "--format", "csv", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("k,length,bound,first_order,second_order")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kpbloch", "eigen", *EXAMPLE, "--n-max", "0"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "lambda_0" in res.stdout
