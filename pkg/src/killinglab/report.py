"""Structured check results with JSON serialization and text rendering.

A check is a named residual with a pass tolerance and an *expectation*:
checks on structures that should hold expect "pass"; checks probing a
deliberately broken structure expect "fail" and carry a fail floor — the
residual must not only exceed the tolerance but clear the floor, so a
wrong-for-the-wrong-reason near-zero residual is still flagged.

Reports serialize with sorted keys and no incidental state, so a rerun with
the same configuration is byte-identical (timestamps are optional).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

SCHEMA_VERSION = 1


def _jsonify(value):
    """Recursively coerce numpy scalars/arrays and tuples to JSON-safe values."""
    import numpy as np

    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass(frozen=True)
class CheckResult:
    """One named residual, its tolerance, and what was expected of it."""

    name: str
    max_residual: float
    mean_residual: float
    tolerance: float
    expected: str = "pass"          # "pass" | "fail"
    fail_floor: float | None = None  # expected-fail only: residual must exceed this
    detail: str = ""

    def __post_init__(self):
        if self.expected not in ("pass", "fail"):
            raise ValueError(f"expected must be 'pass' or 'fail', got {self.expected!r}")
        if self.expected == "fail" and self.fail_floor is None:
            raise ValueError("expected-fail checks need a fail_floor")

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def as_expected(self) -> bool:
        if self.expected == "pass":
            return self.passed
        return (not self.passed) and self.max_residual >= self.fail_floor

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "max_residual": float(self.max_residual),
            "mean_residual": float(self.mean_residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "expected": self.expected,
            "as_expected": self.as_expected,
        }
        if self.fail_floor is not None:
            out["fail_floor"] = float(self.fail_floor)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    """Named bundle of check results plus configuration and free-form extras."""

    title: str
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    @property
    def all_as_expected(self) -> bool:
        return all(c.as_expected for c in self.checks)

    def to_dict(self, include_timestamp: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "title": self.title,
            "config": _jsonify(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "extras": _jsonify(self.extras),
            "verdicts": {
                "all_as_expected": self.all_as_expected,
                "n_checks": len(self.checks),
                "n_as_expected": sum(1 for c in self.checks if c.as_expected),
            },
        }
        if include_timestamp:
            out["generated_at"] = datetime.now(timezone.utc).isoformat()
        return out

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp=include_timestamp),
                          sort_keys=True, indent=2)

    def render_text(self) -> str:
        lines = [self.title]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            if c.as_expected:
                marker = "ok" if c.expected == "pass" else "xf"
            else:
                marker = "UNEXPECTED"
            line = (f"  [{marker:>10s}] {c.name:<{width}s}  "
                    f"max {c.max_residual:9.3e}  mean {c.mean_residual:9.3e}  "
                    f"tol {c.tolerance:7.1e}  expect {c.expected}")
            if c.expected == "fail" and c.fail_floor is not None:
                line += f"  floor {c.fail_floor:7.1e}"
            lines.append(line)
        for key, val in sorted(self.extras.items()):
            lines.append(f"  {key}: {val}")
        n_ok = sum(1 for c in self.checks if c.as_expected)
        lines.append(f"verdict: {n_ok}/{len(self.checks)} checks as expected")
        return "\n".join(lines)
