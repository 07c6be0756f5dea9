"""CLI tests: exit codes, table contents and CSV/JSON round-trips."""
import json
import math

import pytest
from typer.testing import CliRunner

from src.cli import cloner_cli
from src.cli.cloner_cli import app, scan_row
from src.cli.emit import format_number, read_csv, to_jsonable
from src.core.cloneropt import fidelity_perp

runner = CliRunner()


def _comments(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            out[key] = value
    return out


def test_scan_shows_crossover_at_six():
    result = runner.invoke(app, ["scan", "--m-min", "2", "--m-max", "8"])
    assert result.exit_code == 0
    rows = {int(r["M"]): r for r in read_csv(result.stdout)}
    assert sorted(rows) == list(range(2, 9))
    assert abs(float(rows[6]["advantage"])) < 1e-11
    assert float(rows[7]["advantage"]) > 0
    assert float(rows[8]["advantage"]) > 0
    assert float(rows[5]["advantage"]) < 0


def test_scan_round_trips():
    result = runner.invoke(app, ["scan", "--m-min", "1", "--m-max", "40"])
    assert result.exit_code == 0
    for row in read_csv(result.stdout):
        M = int(row["M"])
        assert float(row["f_perp"]) == pytest.approx(fidelity_perp(M), abs=1e-12)
        if M >= 2:
            recomputed = float(row["f_perp"]) - float(row["f_parallel"])
            assert recomputed == pytest.approx(float(row["advantage"]), abs=2e-12)


def test_scan_single_clone_has_no_parallel_value():
    result = runner.invoke(app, ["scan", "--m-min", "1", "--m-max", "1"])
    assert result.exit_code == 0
    (row,) = read_csv(result.stdout)
    assert float(row["f_perp"]) == 1.0
    assert row["f_parallel"] == ""
    assert row["advantage"] == ""


def test_scan_large_m_approaches_limit():
    result = runner.invoke(app, ["scan", "--m-min", "1000000", "--m-max", "1000000", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert abs(payload["rows"][0]["f_perp"] - 0.788675) < 1e-6


@pytest.mark.parametrize("args", [
    ["--m-min", "0", "--m-max", "3"],
    ["--m-min", "5", "--m-max", "3"],
    ["--m-min", "1", "--m-max", "1000001"],
])
def test_scan_bad_range_exits_2(args):
    result = runner.invoke(app, ["scan", *args])
    assert result.exit_code == 2
    assert result.stdout == ""


def test_optimize_six_clones():
    result = runner.invoke(app, ["optimize", "--m", "6", "--format", "json"])
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["converged"] is True
    assert report["fidelity"] == pytest.approx(5 / 6, abs=1e-8)


def test_optimize_duality_gap_csv():
    result = runner.invoke(app, ["optimize", "--m", "2", "--tol", "1e-12", "--format", "csv"])
    assert result.exit_code == 0
    (row,) = read_csv(result.stdout)
    assert abs(float(row["duality_gap"])) < 1e-7
    assert row["converged"] == "true"


def test_optimize_rejects_zero_clones():
    result = runner.invoke(app, ["optimize", "--m", "0"])
    assert result.exit_code == 2


def test_optimize_rejects_bad_tolerance():
    result = runner.invoke(app, ["optimize", "--m", "2", "--tol=-1"])
    assert result.exit_code == 2


def test_optimize_non_convergence_exits_3():
    result = runner.invoke(app, ["optimize", "--m", "4", "--max-iter", "1", "--format", "json"])
    assert result.exit_code == 3
    report = json.loads(result.stdout)
    assert report["converged"] is False
    assert 0.0 < report["fidelity"] <= fidelity_perp(4) + 1e-12
    assert report["iterations"] == 1


def test_certificate_ratio_and_trace():
    result = runner.invoke(app, ["certificate", "--m", "2"])
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["mu2"] / report["mu1"] == pytest.approx(4.0, abs=1e-10)
    assert abs(report["mu3"]) < 1e-9
    assert report["trace"] == pytest.approx(report["f_perp"], abs=1e-13)
    assert report["psd"] is True
    assert report["lambda_01_10"] == pytest.approx(-report["f_perp"] / 6, abs=1e-14)


def test_certificate_six_clones():
    result = runner.invoke(app, ["certificate", "--m", "6", "--format", "csv"])
    assert result.exit_code == 0
    (row,) = read_csv(result.stdout)
    assert float(row["mu1"]) == pytest.approx(1 / 18, abs=1e-9)
    assert float(row["trace"]) == pytest.approx(float(row["f_perp"]), abs=1e-11)


def test_certificate_rejects_zero_clones():
    assert runner.invoke(app, ["certificate", "--m", "0"]).exit_code == 2


def test_pdc_scan_maximum():
    result = runner.invoke(app, ["pdc", "--m", "2", "--y-min", "0", "--y-max", "0.5", "--steps", "501"])
    assert result.exit_code == 0
    header = _comments(result.stdout)
    assert abs(float(header["best_y"]) - 0.18350) < 1e-3
    assert float(header["y_opt"]) == pytest.approx(1 - math.sqrt(8 / 3) / 2, abs=1e-11)
    assert float(header["f_opt"]) == pytest.approx(fidelity_perp(2), abs=1e-11)
    rows = read_csv(result.stdout)
    assert len(rows) == 501
    assert float(rows[0]["y"]) == 0.0
    assert float(rows[-1]["y"]) == 0.5


def test_pdc_optimal_gain_values():
    one = json.loads(runner.invoke(app, ["pdc", "--m", "1", "--format", "json"]).stdout)
    assert one["y_opt"] == 0.0
    six = json.loads(runner.invoke(app, ["pdc", "--m", "6", "--format", "json"]).stdout)
    assert six["y_opt"] == pytest.approx(1.0, abs=1e-14)
    assert six["f_opt"] == pytest.approx(5 / 6, abs=1e-14)


@pytest.mark.parametrize("args", [
    ["--m", "2", "--y-min", "0.5", "--y-max", "0.5"],
    ["--m", "2", "--y-min=-0.1", "--y-max", "0.5"],
    ["--m", "2", "--steps", "1"],
    ["--m", "0"],
])
def test_pdc_bad_input_exits_2(args):
    assert runner.invoke(app, ["pdc", *args]).exit_code == 2


def test_crossover_single_pair():
    result = runner.invoke(app, ["crossover", "--n", "1"])
    assert result.exit_code == 0
    header = _comments(result.stdout)
    assert header["crossover"] == "7"
    assert header["equality"] == "6"
    rows = read_csv(result.stdout)
    assert [int(r["M"]) for r in rows] == list(range(2, 8))


def test_crossover_not_found():
    result = runner.invoke(app, ["crossover", "--n", "1", "--m-max", "5", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["crossover"] == "none"
    assert len(payload["rows"]) == 4


def test_crossover_four_copies():
    result = runner.invoke(app, ["crossover", "--n", "4", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert isinstance(payload["crossover"], int)
    last = payload["rows"][-1]
    assert last["M"] == payload["crossover"]
    assert last["advantage"] > 0


def test_crossover_bad_n():
    assert runner.invoke(app, ["crossover", "--n", "0"]).exit_code == 2


def test_verify_routes_agree():
    result = runner.invoke(app, ["verify", "--m-min", "1", "--m-max", "4", "--workers", "2"])
    assert result.exit_code == 0
    rows = read_csv(result.stdout)
    assert [int(r["M"]) for r in rows] == [1, 2, 3, 4]
    assert all(float(r["max_deviation"]) < 1e-7 for r in rows)


def test_verify_exits_1_when_routes_disagree(monkeypatch):
    monkeypatch.setattr(cloner_cli, "pdc_fidelity", lambda M, y: 0.5)
    result = runner.invoke(app, ["verify", "--m-min", "2", "--m-max", "3", "--workers", "1"])
    assert result.exit_code == 1
    rows = read_csv(result.stdout)
    assert [int(r["M"]) for r in rows] == [2, 3]
    assert all(float(r["pdc"]) == 0.5 for r in rows)
    assert all(float(r["max_deviation"]) > 1e-7 for r in rows)


def test_verbose_flag_keeps_stdout_clean():
    result = runner.invoke(app, ["--verbose", "optimize", "--m", "2", "--format", "json"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["M"] == 2


def test_format_number():
    assert format_number(5 / 6, 12) == "0.833333333333"
    assert format_number(None, 12) == ""
    assert format_number(True, 12) == "true"
    assert format_number(7, 12) == "7"


def test_to_jsonable_rounds_to_digits():
    assert to_jsonable(1 / 3, 15) == 0.333333333333333
    assert to_jsonable(complex(2.0, 0.0), 15) == 2.0
    assert to_jsonable({"a": (1, 2.5)}, 15) == {"a": [1, 2.5]}


def test_scan_row_advantage():
    row = scan_row(7)
    assert row.advantage == pytest.approx(row.f_perp - row.f_parallel, abs=1e-15)
    assert scan_row(1).f_parallel is None
