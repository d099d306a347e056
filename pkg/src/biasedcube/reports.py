"""Verification reports and their JSON-lines / CSV serialization."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone
import io
import json
import math

from . import __version__

SLACK = 1e-9

FIELDS = ("check", "parameters", "lhs", "rhs", "hypothesis_met", "passed", "slack",
          "hypothesis_detail", "timestamp", "version")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "VerificationReport",
    "type": "object",
    "required": list(FIELDS),
    "additionalProperties": False,
    "properties": {
        "check": {"type": "string"},
        "parameters": {"type": "object"},
        "lhs": {"type": ["number", "null"]},
        "rhs": {"type": ["number", "null"]},
        "hypothesis_met": {"type": "boolean"},
        "passed": {"type": "boolean"},
        "slack": {"type": ["number", "null"]},
        "hypothesis_detail": {"type": "string"},
        "timestamp": {"type": "string", "format": "date-time"},
        "version": {"type": "string"},
    },
}


def holds(lhs: float, rhs: float, tol: float = SLACK) -> bool:
    return lhs <= rhs * (1 + tol) if rhs >= 0 else lhs <= rhs * (1 - tol)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one inequality check lhs <= rhs.

    ``passed`` is true when the hypothesis fails (nothing is claimed) or when
    lhs <= rhs (1 + tolerance), the tolerance defaulting to 1e-9.
    """

    check: str
    parameters: dict
    lhs: float
    rhs: float
    hypothesis_met: bool
    hypothesis_detail: str = ""
    tolerance: float = SLACK
    passed: bool = field(init=False)
    slack: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", (not self.hypothesis_met) or holds(self.lhs, self.rhs, self.tolerance))
        object.__setattr__(self, "slack", self.rhs - self.lhs)

    @property
    def failed(self) -> bool:
        return not self.passed

    def to_record(self, timestamp: str | None = None) -> dict:
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return {
            "check": self.check,
            "parameters": {k: _jsonable(v) for k, v in self.parameters.items()},
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "hypothesis_met": bool(self.hypothesis_met),
            "passed": bool(self.passed),
            "slack": _num(self.slack),
            "hypothesis_detail": self.hypothesis_detail,
            "timestamp": timestamp,
            "version": __version__,
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.hypothesis_met:
            status += " (hypothesis not met)"
        return f"{status} {self.check} lhs={self.lhs:.6g} rhs={self.rhs:.6g}"


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if hasattr(v, "item"):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def to_jsonl(reports, timestamp: str | None = None) -> str:
    return "".join(json.dumps(r.to_record(timestamp)) + "\n" for r in reports)


def to_csv(reports, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDS)
    for r in reports:
        rec = r.to_record(timestamp)
        rec["parameters"] = json.dumps(rec["parameters"], sort_keys=True)
        writer.writerow(["" if rec[k] is None else rec[k] for k in FIELDS])
    return buf.getvalue()


def read_jsonl(text: str) -> list:
    return [json.loads(line) for line in text.splitlines() if line.strip()]
