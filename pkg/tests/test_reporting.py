"""CSV and JSON serialization: golden strings, round trips, schema."""

import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latfluct import (ContractViolation, EmpiricalDistribution, ErrorRowSet,
                      ExperimentReport, LatticeSampleSet, LimitSampleSet,
                      REPORT_SCHEMA, emit, render, report_to_dict)

reals = st.floats(allow_nan=False, allow_infinity=False,
                  min_value=-1e15, max_value=1e15)


def small_report() -> ExperimentReport:
    return ExperimentReport(
        experiment="demo", params={"n": 3, "seed": 7},
        stats={"mean": 0.125, "third": 1.0 / 3.0},
        passed={"ok": True, "tight": False}, runtime_seconds=0.25)


# ---------------------------------------------------------------------------
# golden CSV strings


def test_limit_samples_csv_golden():
    obj = LimitSampleSet(seed=7, values=np.array([0.5, -1.0 / 3.0]))
    expected = ("seed,index,s\n"
                "7,0,0.5\n"
                "7,1,-0.33333333333333331\n")
    assert render(obj, "csv") == expected


def test_error_rows_csv_golden():
    obj = ErrorRowSet(seed=3, t=10.0, counts=np.array([314]),
                      errors=np.array([314 - 100 * math.pi]),
                      normalized=np.array([(314 - 100 * math.pi) / math.sqrt(10)]))
    expected = ("seed,index,t,count,error,normalized\n"
                "3,0,10,314,-0.15926535897932581,-0.050364128673901935\n")
    assert render(obj, "csv") == expected


def test_lattice_csv_golden():
    obj = LatticeSampleSet(seed=1, bases=np.array([[[1.0, 0.5],
                                                    [0.0, 1.0]]]))
    expected = ("seed,index,b11,b12,b21,b22\n"
                "1,0,1,0.5,0,1\n")
    assert render(obj, "csv") == expected


def test_csv_uses_lf_bytes(tmp_path):
    obj = LimitSampleSet(seed=7, values=np.array([1.0, 2.0]))
    path = tmp_path / "s.csv"
    emit(obj, path, "csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw == render(obj, "csv").encode()


def test_distribution_csv_needs_seed():
    d = EmpiricalDistribution(np.array([1.0, 2.0]))
    with pytest.raises(ContractViolation):
        render(d, "csv")
    assert render(d, "csv", seed=9).startswith("seed,index,s\n9,0,1\n")


# ---------------------------------------------------------------------------
# round trips


@given(values=st.lists(reals, min_size=1, max_size=30))
@settings(max_examples=200, deadline=None)
def test_csv_roundtrip_is_lossless(values):
    obj = LimitSampleSet(seed=11, values=np.array(values))
    lines = render(obj, "csv").splitlines()
    parsed = np.array([float(line.split(",")[2]) for line in lines[1:]])
    assert np.array_equal(parsed, obj.values)


def test_error_rows_roundtrip():
    rows = ErrorRowSet(seed=2, t=math.pi, counts=np.array([1, 31, 314]),
                       errors=np.array([1 - math.pi, 31 - 9 * math.pi, 0.125]),
                       normalized=np.array([-0.9, 0.1, 0.0625]))
    lines = render(rows, "csv").splitlines()
    assert lines[0] == "seed,index,t,count,error,normalized"
    for i, line in enumerate(lines[1:]):
        seed, index, t, count, error, normalized = line.split(",")
        assert (int(seed), int(index)) == (2, i)
        assert float(t) == math.pi
        assert int(count) == rows.counts[i]
        assert float(error) == rows.errors[i]
        assert float(normalized) == rows.normalized[i]


# ---------------------------------------------------------------------------
# JSON


def test_report_json_matches_schema():
    payload = json.loads(render(small_report(), "json"))
    jsonschema.validate(payload, REPORT_SCHEMA)
    assert payload["pass"] == {"ok": True, "tight": False}
    assert payload["stats"]["third"] == 1.0 / 3.0
    assert report_to_dict(small_report())["experiment"] == "demo"


def test_schema_rejects_malformed_reports():
    good = json.loads(render(small_report(), "json"))
    for mutate in (lambda d: d.pop("stats"),
                   lambda d: d.__setitem__("extra", 1),
                   lambda d: d["stats"].__setitem__("mean", "big"),
                   lambda d: d["pass"].__setitem__("ok", 1),
                   lambda d: d.__setitem__("runtime_seconds", -1.0)):
        bad = json.loads(json.dumps(good))
        mutate(bad)
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(bad, REPORT_SCHEMA)


def test_sample_json_envelopes():
    limit = json.loads(render(LimitSampleSet(seed=4, values=np.array([1.5])),
                              "json"))
    assert limit == {"kind": "limit_samples", "seed": 4, "n": 1,
                     "values": [1.5]}
    rows = json.loads(render(ErrorRowSet(seed=5, t=2.0,
                                         counts=np.array([13]),
                                         errors=np.array([0.5]),
                                         normalized=np.array([0.25])),
                             "json"))
    assert rows["kind"] == "error_rows"
    assert rows["counts"] == [13]
    lat = json.loads(render(LatticeSampleSet(
        seed=6, bases=np.eye(2)[None, :, :]), "json"))
    assert lat["bases"] == [[[1.0, 0.0], [0.0, 1.0]]]
    bare = json.loads(render(EmpiricalDistribution(np.array([2.0, 1.0])),
                             "json", seed=8))
    assert bare == {"kind": "limit_samples", "seed": 8, "n": 2,
                    "values": [1.0, 2.0]}


# ---------------------------------------------------------------------------
# emit errors and file identity


def test_emit_writes_render_bytes(tmp_path):
    path = tmp_path / "r.json"
    emit(small_report(), path, "json")
    assert path.read_text(encoding="utf-8") == render(small_report(), "json")


def test_emit_error_cases(tmp_path):
    with pytest.raises(ContractViolation, match="nothing to emit"):
        render(LimitSampleSet(seed=1, values=np.array([])), "csv")
    with pytest.raises(ContractViolation, match="nothing to emit"):
        render(ErrorRowSet(seed=1, t=1.0, counts=np.array([], dtype=np.int64),
                           errors=np.array([]), normalized=np.array([])),
               "json")
    with pytest.raises(ContractViolation):
        render(small_report(), "yaml")
    with pytest.raises(ContractViolation, match="reports serialize to JSON"):
        render(small_report(), "csv")
    with pytest.raises(ContractViolation):
        render(object(), "json")
    with pytest.raises(OSError, match="cannot write"):
        emit(small_report(), tmp_path / "no" / "dir" / "r.json", "json")


def test_container_validation():
    with pytest.raises(ContractViolation):
        LatticeSampleSet(seed=1, bases=np.eye(2))
    with pytest.raises(ContractViolation):
        ErrorRowSet(seed=1, t=1.0, counts=np.array([1, 2]),
                    errors=np.array([0.5]), normalized=np.array([0.5]))
    assert len(LatticeSampleSet(seed=1, bases=np.zeros((3, 2, 2)))) == 3
