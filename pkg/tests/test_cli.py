"""Command-line behaviors: exit codes, report emission, figure rendering,
and catalog inspection."""

import json
import os

import pytest

from supercong.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    main,
    run_analytic_suite,
    run_charsum_suite,
)
from supercong.catalog import ENV_VAR, load_catalog


def test_catalog_validate_ok(capsys):
    assert main(["catalog", "validate"]) == EXIT_OK
    assert "records ok" in capsys.readouterr().out


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == EXIT_OK
    lines = [l for l in capsys.readouterr().out.splitlines() if l and not l.startswith("#")]
    assert len(lines) >= 15


def test_catalog_show(capsys):
    assert main(["catalog", "show", "C"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "congruence_case: pm_p" in out
    assert main(["catalog", "show", "4.4a"]) == EXIT_OK  # lookup by reference
    assert main(["catalog", "show", "ZZ"]) == EXIT_USAGE
    assert main(["catalog", "show"]) == EXIT_USAGE


def test_verify_small_sweep(capsys):
    assert main(["verify", "--examples", "C", "--pmax", "30", "--mod", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ok True" in out


def test_verify_bad_mod(capsys):
    assert main(["verify", "--examples", "C", "--mod", "4"]) == EXIT_USAGE
    assert main(["verify", "--examples", "C", "--mod", "x"]) == EXIT_USAGE


def test_verify_bad_pmax():
    assert main(["verify", "--examples", "C", "--pmax", "0"]) == EXIT_USAGE
    assert main(["verify", "--examples", "C", "--pmax", "99999"]) == EXIT_USAGE


def test_verify_unknown_example():
    assert main(["verify", "--examples", "ZZ"]) == EXIT_USAGE


def test_verify_negative_claim_exit(capsys):
    # mod-p^3 failures are required for (A); the sweep still exits 0
    code = main(["verify", "--examples", "A", "--pmax", "60", "--mod", "3", "--expect-fail"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "failed" in out


def test_verify_json_report_and_figure(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code = main([
        "verify", "--examples", "C", "--pmax", "20", "--mod", "2",
        "--format", "json", "--out", str(out),
    ])
    capsys.readouterr()
    assert code == EXIT_OK
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert rows[-1]["type"] == "summary" and rows[-1]["ok"]
    png = tmp_path / "r.png"
    assert png.exists() and png.stat().st_size > 0


def test_verify_csv_columns(tmp_path, capsys):
    out = tmp_path / "r.csv"
    main(["verify", "--examples", "C", "--pmax", "20", "--format", "csv", "--out", str(out)])
    capsys.readouterr()
    assert out.read_text().splitlines()[0] == "id,p,branch,case,lhs,rhs,modulus,pass,skip_reason"


def test_catalog_flag_wins_over_env(tmp_path, monkeypatch, capsys):
    from importlib import resources

    raw = json.loads(resources.files("supercong").joinpath("data/catalog.json").read_text("utf-8"))
    raw["version"] = "env"
    env_path = tmp_path / "env.json"
    env_path.write_text(json.dumps(raw))
    raw["version"] = "flag"
    flag_path = tmp_path / "flag.json"
    flag_path.write_text(json.dumps(raw))
    monkeypatch.setenv(ENV_VAR, str(env_path))
    assert main(["catalog", "list"]) == EXIT_OK
    assert "version env" in capsys.readouterr().out
    assert main(["catalog", "list", "--catalog", str(flag_path)]) == EXIT_OK
    assert "version flag" in capsys.readouterr().out


def test_catalog_missing_file():
    assert main(["catalog", "validate", "--catalog", "/nonexistent.json"]) == EXIT_USAGE


def test_analytic_precision_floor(capsys):
    assert main(["analytic", "--precision", "64"]) == EXIT_USAGE
    assert "precision" in capsys.readouterr().err


def test_analytic_only(capsys):
    assert main(["analytic", "--only", "5.3"]) == EXIT_OK
    assert main(["analytic", "--only", "nope"]) == EXIT_USAGE


def test_charsum_precision_floor(capsys):
    assert main(["charsum", "--precision", "64"]) == EXIT_USAGE
    assert main(["charsum", "--pmax", "500"]) == EXIT_USAGE


def test_charsum_small_suite():
    report = run_charsum_suite(12, with_fp2=False, precision=128)
    assert report.ok
    names = {v.example_id for v in report.verdicts}
    assert {"trace:d2", "twist:d3", "h-at-1:d4", "clausen:d6", "clausen-quartic", "rounding"} <= names


def test_analytic_suite_residual_notes():
    catalog = load_catalog()
    report = run_analytic_suite(catalog, 256, only="5.1")
    assert report.ok and len(report.verdicts) == 1
    assert report.verdicts[0].note  # residual recorded


def test_bad_flag_exit_usage():
    assert main(["verify", "--bogus"]) == EXIT_USAGE
    assert main(["nope"]) == EXIT_USAGE
