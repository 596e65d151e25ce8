"""Serialization: CSV for time series, JSON for reports."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .evolve import TimeSeries

SCHEMA_VERSION = 1


def _columns(series: TimeSeries) -> list[tuple[str, np.ndarray]]:
    cols = [("time", series.times)]
    for name, values in series.samples.items():
        values = np.asarray(values)
        if np.iscomplexobj(values):
            cols += [(f"{name}.re", values.real), (f"{name}.im", values.imag)]
        else:
            cols.append((name, values))
    cols.append(("leakage", series.leakage))
    return cols


def write_csv(series: TimeSeries, path) -> Path:
    """One row per sample; floats written with repr so they round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = _columns(series)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow([name for name, _ in cols])
        for i in range(series.times.size):
            writer.writerow([repr(float(values[i])) for _, values in cols])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if np.isfinite(value) else repr(value)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = _jsonable({"schema_version": SCHEMA_VERSION, **report})
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def emit(artifact, path, fmt: str | None = None) -> Path:
    """Write a TimeSeries (csv) or report mapping (json)."""
    fmt = fmt or Path(path).suffix.lstrip(".")
    if isinstance(artifact, TimeSeries):
        if fmt != "csv":
            raise ValueError("time series are written as csv")
        return write_csv(artifact, path)
    if fmt != "json":
        raise ValueError("reports are written as json")
    return write_report(artifact, path)
