"""CSV ingest and deterministic report output.

Dialect: comma separator, ``.`` decimal point, ``#`` comment lines, mandatory
header row.  Numbers are written with ``%.12g`` so identical inputs produce
byte-identical files; provenance comments carry the tool version and a sha256
of each input instead of timestamps.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from typing import Mapping, Sequence

import numpy as np

from .errors import CsvFormatError, InsufficientDataError, NonUniformTimeError
from .series import TimeSeries

NUMBER_FORMAT = "%.12g"

_REL_DT_TOL = 1e-6


def fmt(value: float) -> str:
    return NUMBER_FORMAT % float(value)


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def provenance_lines(version: str, input_paths: Sequence = ()) -> list[str]:
    """Comment lines identifying the tool version and hashed inputs."""
    lines = [f"cryoion {version}"]
    for path in input_paths:
        lines.append(f"input {os.path.basename(str(path))} sha256={sha256_of(path)}")
    return lines


def read_table(path, columns: Sequence[str]) -> dict[str, np.ndarray]:
    """Read a CSV file with exactly the expected header into named float arrays."""
    try:
        handle = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot open {path}: {exc}") from exc
    with handle:
        header = None
        data: list[list[float]] = []
        for lineno, raw in enumerate(handle, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = next(csv.reader([raw]))
            fields = [f.strip() for f in fields]
            if header is None:
                header = fields
                if header != list(columns):
                    raise CsvFormatError(
                        f"{path}: header {header} does not match expected {list(columns)}")
                continue
            if len(fields) != len(header):
                raise CsvFormatError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(fields)}")
            try:
                row = [float(f) for f in fields]
            except ValueError as exc:
                raise CsvFormatError(f"{path}: line {lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in row):
                raise CsvFormatError(f"{path}: line {lineno}: non-finite value")
            data.append(row)
    if header is None:
        raise CsvFormatError(f"{path}: missing header row")
    if not data:
        raise InsufficientDataError(f"{path}: no data rows")
    arr = np.asarray(data, dtype=float)
    return {name: arr[:, i].copy() for i, name in enumerate(columns)}


def read_timeseries(path, time_column: str, value_column: str) -> TimeSeries:
    """Read a two-column record and require a uniform time base.

    The sample interval is taken from the median of the time differences;
    any step deviating by more than 1e-6 relative is rejected.
    """
    table = read_table(path, [time_column, value_column])
    t = table[time_column]
    v = table[value_column]
    if t.size < 2:
        raise InsufficientDataError(f"{path}: need at least 2 samples")
    steps = np.diff(t)
    dt = float(np.median(steps))
    if dt <= 0:
        raise NonUniformTimeError(f"{path}: time column is not increasing")
    if np.max(np.abs(steps - dt)) > _REL_DT_TOL * dt:
        raise NonUniformTimeError(
            f"{path}: non-uniform sampling (worst step deviates by more than "
            f"{_REL_DT_TOL:g} relative)")
    return TimeSeries(t0=float(t[0]), dt=dt, samples=v)


def render_table(columns: Mapping[str, np.ndarray], comments: Sequence[str] = ()) -> str:
    """Render named columns to CSV text with leading ``#`` comment lines."""
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[n], dtype=float)) for n in names]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise CsvFormatError("all columns must have the same length")
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(names) + "\n")
    for i in range(length):
        out.write(",".join(fmt(a[i]) for a in arrays) + "\n")
    return out.getvalue()


def write_table(path, columns: Mapping[str, np.ndarray], comments: Sequence[str] = ()) -> None:
    text = render_table(columns, comments)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(text)
