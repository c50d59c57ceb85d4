"""Sweep outputs on disk: ``records.csv``, ``aggregates.csv`` and ``spec.json``.

Floats are written with 17 significant digits, which round-trips float64
exactly. Empty cells stand for missing values.
"""
from __future__ import annotations

import csv
import io
import json
import platform
import sys
from dataclasses import fields
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from .aggregate import aggregate
from .runner import ProbeRecord, SweepResult
from .spec import SweepSpec

RECORD_COLUMNS = tuple(f.name for f in fields(ProbeRecord))
AGGREGATE_COLUMNS = ("resource_value", "d", "metric", "mean", "std", "count", "flagged")
_INT = {"resource_value", "instance", "instance_seed", "d", "power_iters", "epochs_run"}
_FLOAT = {"lambda_max", "tv", "entropy"}
_BOOL = {"power_converged"}


class MalformedFile(ValueError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, tuple):
        return ";".join("%.17g" % x for x in v)
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def records_csv(records) -> str:
    rows = [[_fmt(getattr(r, c)) for c in RECORD_COLUMNS] for r in records]
    return _csv_text(RECORD_COLUMNS, rows)


def aggregates_csv(rows) -> str:
    return _csv_text(AGGREGATE_COLUMNS,
                     [[_fmt(getattr(r, c)) for c in AGGREGATE_COLUMNS] for r in rows])


def package_version() -> str:
    try:
        return metadata.version("simlearn")
    except metadata.PackageNotFoundError:
        return "unknown"


def environment() -> dict:
    return {
        "package_version": package_version(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
        "precision": "float64",
    }


def spec_document(spec: SweepSpec) -> dict:
    proj = spec.projection_kind or ("dense up to d=512, sparse above"
                                    if spec.probe in ("rso", "epochs") else None)
    return {
        "spec": spec.to_dict(),
        "spec_hash": spec.spec_hash(),
        "expected_records": spec.expected_records,
        "projection_kind": proj,
        "hessian_weighting": spec.hessian_weighting,
        "power_iteration": {"tol": spec.power_tol, "max_iter": spec.power_max_iter, "window": 3},
        "environment": environment(),
    }


def write_spec(spec: SweepSpec, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "spec.json"
    path.write_text(json.dumps(spec_document(spec), indent=2, sort_keys=True) + "\n")
    return path


def persist(result: SweepResult, out_dir) -> Path:
    """Write the three output files; refuses to overwrite results of another spec."""
    out = Path(out_dir)
    existing = out / "spec.json"
    if existing.exists():
        old = json.loads(existing.read_text()).get("spec_hash")
        if old != result.spec.spec_hash():
            raise ValueError(f"{existing} belongs to a different spec (hash {old}); refusing to merge")
    write_spec(result.spec, out)
    (out / "records.csv").write_text(records_csv(result.records))
    (out / "aggregates.csv").write_text(aggregates_csv(aggregate(result)) if result.records
                                        else aggregates_csv([]))
    return out


def _parse(col: str, text: str, where: str):
    if text == "":
        return None
    try:
        if col in _INT:
            return int(text)
        if col in _FLOAT:
            return float(text)
        if col in _BOOL:
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if col == "entropy_profile":
            return tuple(float(x) for x in text.split(";"))
    except ValueError:
        raise MalformedFile(f"{where}, column {col!r}: cannot parse {text!r}") from None
    return text


def parse_records(text: str, source: str = "records.csv") -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedFile(f"{source}: empty file") from None
    if tuple(header) != RECORD_COLUMNS:
        raise MalformedFile(f"{source}, row 1: header {header} does not match {list(RECORD_COLUMNS)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        where = f"{source}, row {lineno}"
        if len(row) != len(RECORD_COLUMNS):
            raise MalformedFile(f"{where}: expected {len(RECORD_COLUMNS)} columns, found {len(row)}")
        vals = {c: _parse(c, t, where) for c, t in zip(RECORD_COLUMNS, row)}
        for c in ("dataset_kind", "resource_value", "instance", "instance_seed", "probe", "status"):
            if vals[c] is None:
                raise MalformedFile(f"{where}, column {c!r}: missing value")
        vals["error"] = vals["error"] or ""
        out.append(ProbeRecord(**vals))
    return out


def load(out_dir) -> SweepResult:
    out = Path(out_dir)
    doc = json.loads((out / "spec.json").read_text())
    spec = SweepSpec.from_dict(doc["spec"])
    if doc.get("spec_hash") != spec.spec_hash():
        raise MalformedFile(f"{out / 'spec.json'}: stored hash does not match its spec")
    path = out / "records.csv"
    records = parse_records(path.read_text(), str(path)) if path.exists() else []
    return SweepResult(spec, records)
