import csv
import io
import json
import math

import jsonschema
import pytest

from biasedcube import VerificationReport
from biasedcube.reports import FIELDS, REPORT_SCHEMA, holds, read_jsonl, to_csv, to_jsonl


def make(lhs=1.0, rhs=2.0, met=True, **kw):
    return VerificationReport("demo", {"p": 0.5, "d": 2}, lhs, rhs, met, **kw)


@pytest.mark.parametrize("lhs,rhs,ok", [(1.0, 1.0, True), (1.0 + 5e-10, 1.0, True), (1.0 + 2e-9, 1.0, False),
                                        (0.0, 0.0, True), (-1.0, -1.0, True)])
def test_holds_slack(lhs, rhs, ok):
    assert holds(lhs, rhs) is ok


def test_passed_logic():
    assert make(3.0, 2.0, True).failed
    assert make(3.0, 2.0, False).passed
    assert make(1.0, 2.0).slack == 1.0
    assert make(1.1, 1.0, tolerance=0.2).passed


def test_record_schema_and_roundtrip():
    recs = read_jsonl(to_jsonl([make(), make(math.inf, math.nan, False)], timestamp="2024-01-01T00:00:00+00:00"))
    for r in recs:
        jsonschema.validate(r, REPORT_SCHEMA)
        assert list(r) == list(FIELDS)
    assert recs[1]["lhs"] is None and recs[1]["rhs"] is None


def test_csv_columns_fixed():
    rows = list(csv.reader(io.StringIO(to_csv([make()], timestamp="t"))))
    assert tuple(rows[0]) == FIELDS
    assert json.loads(rows[1][1]) == {"d": 2, "p": 0.5}


def test_summary():
    assert make().summary().startswith("PASS demo")
    assert "hypothesis not met" in make(met=False).summary()
