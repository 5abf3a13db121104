"""Command-line surface: exit codes, JSON reports, config files, determinism."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from killinglab.cli import main

SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src" / "killinglab" / "schema"
     / "report-v1.json").read_text())

FAST = ["--samples", "25", "--no-timestamp"]


def run_cli(*args: str) -> tuple[int, str, str]:
    """Run in-process (fast); capsys-free by using subprocess semantics."""
    proc = subprocess.run([sys.executable, "-m", "killinglab", *args],
                          capture_output=True, text=True, timeout=300)
    return proc.returncode, proc.stdout, proc.stderr


def test_verify_round_ok_and_schema():
    code, out, err = run_cli("verify", "--example", "round", "--n", "1",
                             "--format", "json", *FAST)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["verdicts"]["all_as_expected"]
    assert "generated_at" not in doc
    names = [c["name"] for c in doc["checks"]]
    assert "wedge_second_derivative" in names
    assert "contact_endomorphism" in names
    assert "cr_torsion" in names
    assert "two_form_square_spectrum" in names


def test_verify_text_format_verdict_line():
    code, out, _ = run_cli("verify", "--example", "round", "--n", "1", *FAST)
    assert code == 0
    assert "verdict:" in out
    assert "UNEXPECTED" not in out


@pytest.mark.parametrize("example", ["quaternionic", "irregular"])
def test_verify_other_examples_pass(example):
    code, out, err = run_cli("verify", "--example", example, "--format", "json",
                             *FAST)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["verdicts"]["all_as_expected"]


def test_verify_gf_expected_failures_marked():
    code, out, err = run_cli("verify", "--example", "gF", "--n", "3",
                             "--samples", "60", "--no-timestamp",
                             "--format", "json")
    assert code == 0, err
    doc = json.loads(out)
    by_name = {c["name"]: c for c in doc["checks"]}
    assert by_name["wedge_second_derivative"]["expected"] == "fail"
    assert not by_name["wedge_second_derivative"]["pass"]
    assert by_name["wedge_second_derivative"]["as_expected"]
    assert by_name["cr_torsion"]["expected"] == "fail"
    assert by_name["two_form_square_spectrum"]["expected"] == "pass"
    assert by_name["two_form_square_spectrum"]["pass"]


def test_exit_codes_usage_errors():
    assert run_cli("verify", "--example", "bogus", *FAST)[0] == 2
    assert run_cli("verify", "--example", "gF", "--n", "2", *FAST)[0] == 2
    assert run_cli("classify-flow", "not-a-rate")[0] == 2
    assert run_cli("decompose", "--example", "quaternionic", *FAST)[0] == 2


def test_exit_codes_numerical_failures():
    code, _, err = run_cli("verify", "--example", "round", "--n", "1",
                           "--fd-step", "1e30", *FAST)
    assert code == 3
    assert "numerical quality failure" in err
    code, _, err = run_cli("verify", "--example", "round", "--n", "1",
                           "--fd-step", "1e-13", *FAST)
    assert code == 3
    code, _, err = run_cli("verify", "--example", "gF", "--n", "3",
                           "--c", "25", *FAST)
    assert code == 3


def test_json_reports_are_byte_identical():
    args = ("verify", "--example", "round", "--n", "2", "--format", "json",
            "--samples", "30", "--no-timestamp")
    _, out1, _ = run_cli(*args)
    _, out2, _ = run_cli(*args)
    assert out1 == out2


def test_timestamp_present_by_default():
    code, out, _ = run_cli("verify", "--example", "round", "--n", "1",
                           "--format", "json", "--samples", "20")
    assert code == 0
    assert "generated_at" in json.loads(out)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nexample = round\nn = 2\nsamples = 25\n"
                   "fd-step = 2e-4\n")
    code, out, err = run_cli("verify", "--config", str(cfg), "--samples", "35",
                             "--format", "json", "--no-timestamp")
    assert code == 0, err
    doc = json.loads(out)
    assert doc["config"]["example"] == "round"
    assert doc["config"]["n"] == 2
    assert doc["config"]["samples"] == 35       # flag beats file
    assert doc["config"]["fd_step"] == 2e-4     # file beats default


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wibble = 3\n")
    code, _, err = run_cli("verify", "--config", str(cfg))
    assert code == 2
    assert "unknown config keys" in err


def test_decompose_round():
    code, out, err = run_cli("decompose", "--example", "round", "--n", "2",
                             "--format", "json", *FAST)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["extras"]["blocks"] == [[0.0, 9], [2.0, 6]]


def test_decompose_irregular_single_block():
    code, out, err = run_cli("decompose", "--example", "irregular",
                             "--format", "json", *FAST)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["extras"]["blocks"] == [[0.0, 5]]


def test_classify_flow_rational():
    code, out, err = run_cli("classify-flow", "2", "3", "--format", "json",
                             "--no-timestamp")
    assert code == 0, err
    doc = json.loads(out)
    cls = doc["extras"]["classification"]
    assert cls["kind"] == "quasi-regular"
    assert cls["integer_profile"] == [2, 3]


def test_classify_flow_probe_agreement():
    code, out, err = run_cli("classify-flow", "1", "2", "--probe",
                             "--format", "json", "--no-timestamp")
    assert code == 0, err
    doc = json.loads(out)
    by_name = {c["name"]: c for c in doc["checks"]}
    assert by_name["orbit_return_matches_period"]["pass"]


def test_classify_flow_irrational_probe():
    code, out, err = run_cli("classify-flow", "1", "irr:golden", "--probe",
                             "--format", "json", "--no-timestamp")
    assert code == 0, err
    doc = json.loads(out)
    assert doc["extras"]["classification"]["kind"] == "irregular"
    by_name = {c["name"]: c for c in doc["checks"]}
    assert by_name["orbit_never_returns"]["pass"]


def test_main_callable_in_process(capsys):
    """The console entry point is importable and runs without a subprocess."""
    code = main(["verify", "--example", "round", "--n", "1",
                 "--samples", "15", "--no-timestamp"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict:" in out
