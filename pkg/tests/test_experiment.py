from __future__ import annotations

import json

import pytest

from torusgaps import cli, experiment
from torusgaps.errors import DegeneracyError, ParseError
from torusgaps.experiment import (
    RunConfig,
    compare_published,
    parse_csv,
    parse_n_list,
    render_csv,
    render_table,
    run,
)
from torusgaps.published import TABLES
from torusgaps.sites import VectorSpec

V23 = VectorSpec.parse("sqrt(2),sqrt(3)")


@pytest.fixture(scope="module")
def reports_20_30():
    return run(RunConfig(V23, (20, 30), certify=False)).reports


@pytest.mark.parametrize(
    "text, expected",
    [
        ("20", [20]),
        ("30,20,20", [20, 30]),
        ("100-150:10", [100, 110, 120, 130, 140, 150]),
        ("1..3, 7", [1, 2, 3, 7]),
    ],
)
def test_parse_n_list(text, expected):
    assert parse_n_list(text) == expected


@pytest.mark.parametrize("text, offset", [("20,x", 3), ("0", 0), ("5-3", 0), ("", 0)])
def test_parse_n_list_errors(text, offset):
    with pytest.raises(ParseError) as info:
        parse_n_list(text)
    assert info.value.offset == offset


def test_run_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(V23, ())
    with pytest.raises(ValueError):
        RunConfig(V23, (20,), outputs=frozenset({"pdf"}), out_dir=tmp_path)
    with pytest.raises(ValueError):
        RunConfig(V23, (20,), outputs=frozenset({"csv"}))


def test_render_table_two_columns(reports_20_30):
    text = render_table(reports_20_30)
    lines = text.splitlines()
    assert lines[0] == "v = (√2, √3)"
    rows = {line.split("|")[0].strip(): [c.strip() for c in line.split("|")[1:]] for line in lines[1:] if "|" in line}
    assert rows["n"] == ["20", "30"]
    assert rows["S(n)"] == ["6", "6"]
    assert rows["M_5(n)"] == ["6", "8"]
    assert rows["M_6(n)"] == ["8", "14"]
    assert rows["M_7(n)"] == ["6", "8"]
    assert "M_4(n)" not in rows  # all-zero rows are omitted


def test_render_table_single_column_and_template_rows(reports_20_30):
    text = render_table(reports_20_30[:1], k_rows=(4, 5, 6, 7, 8))
    rows = [line.split("|") for line in text.splitlines() if "|" in line]
    assert [r[0].strip() for r in rows] == ["n", "S(n)"] + [f"M_{k}(n)" for k in (4, 5, 6, 7, 8)]
    assert [r[1].strip() for r in rows[2:]] == ["0", "6", "8", "6", "0"]


def test_csv_round_trip(reports_20_30):
    parsed = parse_csv(render_csv(reports_20_30))
    assert parsed == {r.n: (r.S, r.M) for r in reports_20_30}


def test_compare_published(reports_20_30):
    assert compare_published(reports_20_30, TABLES[1]) == []


def test_e_pi_n50():
    (r,) = run(RunConfig(VectorSpec.parse("e,pi"), (50,))).reports
    assert r.S == 4
    assert r.M == {5: 6, 6: 38, 7: 6}
    assert r.certified


def test_main_writes_all_formats(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(
        ["run", "--vector", "sqrt(2),sqrt(3)", "--n", "20,30", "--out", str(out), "--format", "table,csv,json,svg"]
    )
    assert code == 0
    names = {p.name for p in out.iterdir()}
    assert {"table.txt", "table.csv", "reports.json", "partition_n20.json", "partition_n30.svg"} <= names
    payload = json.loads((out / "reports.json").read_text())
    assert [r["S"] for r in payload["reports"]] == [6, 6]
    assert "S(n)" in capsys.readouterr().out


def test_main_published_table_reports_differences(capsys):
    code = cli.main(["run", "--published-table", "1", "--n", "20,30", "--no-certify"])
    assert code == 0
    assert "all computed columns match published Table 1" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["run"], ["run", "--vector", "sqrt(4),e"], ["run", "--vector", "e,pi", "--n", "0"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_per_n_failure_is_isolated(monkeypatch, capsys):
    real = experiment.analyze

    def flaky(config, n, sites=None):
        if n == 30:
            raise DegeneracyError("injected", (1, 2))
        return real(config, n, sites)

    monkeypatch.setattr(experiment, "analyze", flaky)
    code = cli.main(["run", "--vector", "sqrt(2),sqrt(3)", "--n", "20,30,40", "--no-certify"])
    captured = capsys.readouterr()
    assert code == 1
    assert "n=30 FAILED: DegeneracyError" in captured.err
    header = next(line for line in captured.out.splitlines() if line.lstrip().startswith("n |"))
    assert [c.strip() for c in header.split("|")[1:]] == ["20", "40"]


def test_verify_command(tmp_path, capsys):
    code = cli.main(["verify", "--vector", "e,pi", "--n", "20", "--grid", "500", "--three-gap-max", "300", "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads((tmp_path / "verify.json").read_text())
    assert payload["failures"] == []
    assert [g["max_distinct"] for g in payload["three_gap"]] == [3, 3]
