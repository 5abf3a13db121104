"""Check-result semantics, report serialization, and the JSON schema."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from killinglab import CheckResult, VerificationReport

SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src" / "killinglab" / "schema"
     / "report-v1.json").read_text())


def make(name="c", mx=1e-9, mean=1e-10, tol=1e-8, expected="pass", floor=None,
         detail=""):
    return CheckResult(name=name, max_residual=mx, mean_residual=mean,
                       tolerance=tol, expected=expected, fail_floor=floor,
                       detail=detail)


def test_pass_semantics():
    assert make(mx=1e-9, tol=1e-8).passed
    assert not make(mx=1e-7, tol=1e-8).passed
    assert make(mx=1e-8, tol=1e-8).passed  # boundary counts as pass


def test_expected_fail_needs_floor():
    with pytest.raises(ValueError):
        make(expected="fail")


def test_expected_fail_semantics():
    # residual above floor and above tol: the anticipated breakage
    assert make(mx=0.5, tol=1e-5, expected="fail", floor=1e-2).as_expected
    # residual in the dead zone between tol and floor: NOT as expected
    assert not make(mx=1e-3, tol=1e-5, expected="fail", floor=1e-2).as_expected
    # residual below tol: the identity unexpectedly held
    assert not make(mx=1e-9, tol=1e-5, expected="fail", floor=1e-2).as_expected


def test_expected_validation():
    with pytest.raises(ValueError):
        make(expected="maybe")


def test_to_dict_optional_fields():
    d = make().to_dict()
    assert "fail_floor" not in d and "detail" not in d
    d2 = make(expected="fail", floor=0.1, detail="why").to_dict()
    assert d2["fail_floor"] == 0.1 and d2["detail"] == "why"


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-16, 1e3), st.floats(1e-16, 1e3))
def test_pass_iff_within_tolerance(mx, tol):
    c = make(mx=mx, mean=mx / 2, tol=tol)
    assert c.passed == (mx <= tol)


def test_report_round_trip_and_schema():
    rep = VerificationReport(title="demo", config={"samples": 3, "seed": 42})
    rep.add(make(name="a"))
    rep.add(make(name="b", mx=0.5, tol=1e-6, expected="fail", floor=1e-2,
                 detail="known breakage"))
    doc = json.loads(rep.to_json(include_timestamp=False))
    jsonschema.validate(doc, SCHEMA)
    assert doc["verdicts"] == {"all_as_expected": True, "n_checks": 2,
                               "n_as_expected": 2}
    assert "generated_at" not in doc

    doc_t = json.loads(rep.to_json(include_timestamp=True))
    jsonschema.validate(doc_t, SCHEMA)
    assert "generated_at" in doc_t


def test_schema_rejects_malformed():
    rep = VerificationReport(title="demo")
    rep.add(make(name="a"))
    doc = json.loads(rep.to_json(include_timestamp=False))
    doc["checks"][0].pop("tolerance")
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SCHEMA)
    doc2 = json.loads(rep.to_json(include_timestamp=False))
    doc2["unknown_top_level"] = 1
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc2, SCHEMA)


def test_render_text_markers():
    rep = VerificationReport(title="demo")
    rep.add(make(name="good"))
    rep.add(make(name="known_bad", mx=0.5, tol=1e-6, expected="fail", floor=1e-2))
    rep.add(make(name="surprise", mx=0.5, tol=1e-6))
    text = rep.render_text()
    assert "[        ok]" in text
    assert "[        xf]" in text
    assert "UNEXPECTED" in text
    assert "verdict: 2/3 checks as expected" in text
    assert not rep.all_as_expected
