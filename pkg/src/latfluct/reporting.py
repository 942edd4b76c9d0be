"""Serialization of experiment outputs to bit-exact CSV and JSON.

CSV schemas (LF line endings, '.' decimal separator, reals with 17
significant digits via %.17g so round-tripping is lossless):

    lattices:      seed,index,b11,b12,b21,b22
    errors:        seed,index,t,count,error,normalized
    limit samples: seed,index,s

JSON reports carry the object {experiment, params, stats, pass,
runtime_seconds}; REPORT_SCHEMA is the matching JSON Schema document.
Sample sets serialize to JSON as a small envelope with the generating
seed and the raw rows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .experiments import ExperimentReport
from .stats import EmpiricalDistribution

REPORT_SCHEMA = {
    "type": "object",
    "required": ["experiment", "params", "stats", "pass", "runtime_seconds"],
    "properties": {
        "experiment": {"type": "string", "minLength": 1},
        "params": {"type": "object"},
        "stats": {"type": "object",
                  "additionalProperties": {"type": "number"}},
        "pass": {"type": "object",
                 "additionalProperties": {"type": "boolean"}},
        "runtime_seconds": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class LatticeSampleSet:
    """Raw basis matrices (n, 2, 2) with the seed that generated them."""

    seed: int
    bases: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bases, dtype=float)
        if arr.ndim != 3 or arr.shape[1:] != (2, 2):
            raise ContractViolation("bases must have shape (n, 2, 2)")
        object.__setattr__(self, "bases", arr)

    def __len__(self) -> int:
        return self.bases.shape[0]


@dataclass(frozen=True)
class ErrorRowSet:
    """Counting-error rows at a common t with the generating seed."""

    seed: int
    t: float
    counts: np.ndarray
    errors: np.ndarray
    normalized: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64).ravel()
        errors = np.asarray(self.errors, dtype=float).ravel()
        normalized = np.asarray(self.normalized, dtype=float).ravel()
        if not (len(counts) == len(errors) == len(normalized)):
            raise ContractViolation("column lengths must match")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "errors", errors)
        object.__setattr__(self, "normalized", normalized)

    def __len__(self) -> int:
        return self.counts.size


@dataclass(frozen=True)
class LimitSampleSet:
    """Limit-law draws with the generating seed."""

    seed: int
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def _real(x: float) -> str:
    return "%.17g" % float(x)


def report_to_dict(report: ExperimentReport) -> dict:
    """The JSON object form of a report (key `pass` holds the verdicts)."""
    return {
        "experiment": report.experiment,
        "params": dict(report.params),
        "stats": {k: float(v) for k, v in report.stats.items()},
        "pass": dict(report.passed),
        "runtime_seconds": float(report.runtime_seconds),
    }


def _csv_lines(obj, seed) -> list:
    if isinstance(obj, EmpiricalDistribution):
        if seed is None:
            raise ContractViolation(
                "CSV sample output needs the generating seed")
        obj = LimitSampleSet(seed=seed, values=obj.samples)
    if isinstance(obj, LimitSampleSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        lines = ["seed,index,s"]
        for i, s in enumerate(obj.values):
            lines.append(f"{obj.seed},{i},{_real(s)}")
        return lines
    if isinstance(obj, ErrorRowSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        lines = ["seed,index,t,count,error,normalized"]
        t = _real(obj.t)
        for i in range(len(obj)):
            lines.append(f"{obj.seed},{i},{t},{obj.counts[i]},"
                         f"{_real(obj.errors[i])},{_real(obj.normalized[i])}")
        return lines
    if isinstance(obj, LatticeSampleSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        lines = ["seed,index,b11,b12,b21,b22"]
        for i, b in enumerate(obj.bases):
            lines.append(f"{obj.seed},{i},{_real(b[0, 0])},{_real(b[0, 1])},"
                         f"{_real(b[1, 0])},{_real(b[1, 1])}")
        return lines
    if isinstance(obj, ExperimentReport):
        raise ContractViolation("reports serialize to JSON, not CSV")
    raise ContractViolation(f"cannot emit object of type {type(obj).__name__}")


def _json_payload(obj, seed) -> dict:
    if isinstance(obj, ExperimentReport):
        return report_to_dict(obj)
    if isinstance(obj, EmpiricalDistribution):
        if len(obj.samples) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        return {"kind": "limit_samples", "seed": seed,
                "n": int(obj.n), "values": [float(v) for v in obj.samples]}
    if isinstance(obj, LimitSampleSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        return {"kind": "limit_samples", "seed": obj.seed,
                "n": len(obj), "values": [float(v) for v in obj.values]}
    if isinstance(obj, ErrorRowSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        return {"kind": "error_rows", "seed": obj.seed, "t": float(obj.t),
                "n": len(obj),
                "counts": [int(c) for c in obj.counts],
                "errors": [float(e) for e in obj.errors],
                "normalized": [float(v) for v in obj.normalized]}
    if isinstance(obj, LatticeSampleSet):
        if len(obj) == 0:
            raise ContractViolation("nothing to emit: empty sample set")
        return {"kind": "lattices", "seed": obj.seed, "n": len(obj),
                "bases": [[[float(x) for x in row] for row in b]
                          for b in obj.bases]}
    raise ContractViolation(f"cannot emit object of type {type(obj).__name__}")


def render(obj, format: str, seed=None) -> str:
    """The exact csv or json text emit would write for obj."""
    if format not in ("csv", "json"):
        raise ContractViolation(f"format must be csv or json, got {format!r}")
    if format == "csv":
        return "\n".join(_csv_lines(obj, seed)) + "\n"
    return json.dumps(_json_payload(obj, seed), indent=2,
                      allow_nan=False) + "\n"


def emit(obj, path, format: str, seed=None) -> None:
    """Write a report or a sample container to path in csv or json form.

    seed labels the rows when a bare EmpiricalDistribution is given (the
    dedicated containers carry their own).  I/O failures are re-raised
    with the path attached.
    """
    text = render(obj, format, seed)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {str(path)!r}: {exc}") from exc
