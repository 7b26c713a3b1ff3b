"""Delimited-text ingestion of daily reference rates (ECB-style CSV)."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .core import DiffcastError, TimeSeries

Column = Union[int, str]


class IngestionError(DiffcastError, ValueError):
    def __init__(self, message: str, diagnostics: Optional[list[str]] = None):
        self.diagnostics = list(diagnostics or [])
        if self.diagnostics:
            message = message + "\n  " + "\n  ".join(self.diagnostics)
        super().__init__(message)


@dataclass(frozen=True)
class IngestSpec:
    """Where to read from and how to interpret the columns.

    Exactly one of ``path`` and ``url`` is set.  Columns are 0-based indices
    or header names.  ``header=None`` detects a header row from the first
    line; ``delimiter=None`` picks ``;``, tab or ``,`` from the first line.
    """

    path: Optional[str] = None
    url: Optional[str] = None
    date_column: Column = 0
    value_column: Column = 1
    skip_rows: int = 0
    reverse: bool = False
    decimal_separator: str = "."
    delimiter: Optional[str] = None
    header: Optional[bool] = None
    drop_invalid: bool = False

    def __post_init__(self):
        if (self.path is None) == (self.url is None):
            raise IngestionError("exactly one of path and url must be given")
        if self.decimal_separator not in (".", ","):
            raise IngestionError(f"decimal separator must be '.' or ',', got {self.decimal_separator!r}")
        if self.skip_rows < 0:
            raise IngestionError("skip_rows must be non-negative")

    @property
    def source(self) -> str:
        return self.path if self.path is not None else self.url


def _detect_delimiter(line: str) -> str:
    for cand in (";", "\t"):
        if cand in line:
            return cand
    return ","


def _parse_number(text: str, decimal: str) -> float:
    s = text.strip()
    if decimal == ",":
        s = s.replace(",", ".")
    value = float(s)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _resolve(column: Column, header: Optional[list[str]], what: str) -> int:
    if isinstance(column, int):
        return column
    if isinstance(column, str) and column.lstrip("-").isdigit():
        return int(column)
    if header is None:
        raise IngestionError(f"{what} column {column!r} given by name but the file has no header")
    names = [h.strip() for h in header]
    if column not in names:
        raise IngestionError(f"{what} column {column!r} not in header {names}")
    return names.index(column)


def parse_text(text: str, spec: IngestSpec) -> tuple[TimeSeries, list[str]]:
    """Parse CSV text; returns the oldest-first series and per-row diagnostics.

    Row numbers in diagnostics are 1-based line numbers in the original text.
    Invalid rows raise :class:`IngestionError` unless ``spec.drop_invalid``,
    in which case they are left out and only reported.
    """
    lines = text.splitlines()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if i >= spec.skip_rows]
    body = [(no, ln) for no, ln in body if ln.strip()]
    if not body:
        raise IngestionError(f"{spec.source}: no data rows after skipping {spec.skip_rows}")
    delim = spec.delimiter or _detect_delimiter(body[0][1])
    rows = [(no, row) for (no, _), row in
            zip(body, csv.reader((ln for _, ln in body), delimiter=delim))]

    header = None
    first_no, first = rows[0]
    has_header = spec.header
    if has_header is None:
        if isinstance(spec.value_column, str) and not spec.value_column.lstrip("-").isdigit():
            has_header = True
        else:
            vi = spec.value_column if isinstance(spec.value_column, int) else int(spec.value_column)
            try:
                _parse_number(first[vi], spec.decimal_separator)
                has_header = False
            except (ValueError, IndexError):
                has_header = True
    if has_header:
        header = first
        rows = rows[1:]
    di = _resolve(spec.date_column, header, "date")
    vi = _resolve(spec.value_column, header, "value")

    diagnostics: list[str] = []
    dates: list[str] = []
    values: list[float] = []
    for no, row in rows:
        if max(di, vi) >= len(row):
            diagnostics.append(f"row {no}: expected at least {max(di, vi) + 1} fields, got {len(row)}")
            continue
        date, raw = row[di].strip(), row[vi].strip()
        if not date:
            diagnostics.append(f"row {no}: empty date")
            continue
        if not raw:
            diagnostics.append(f"row {no}: empty value for {date}")
            continue
        try:
            values.append(_parse_number(raw, spec.decimal_separator))
        except ValueError:
            diagnostics.append(f"row {no}: value {raw!r} for {date} is not numeric")
            continue
        dates.append(date)

    if diagnostics and not spec.drop_invalid:
        raise IngestionError(f"{spec.source}: {len(diagnostics)} invalid row(s)", diagnostics)

    if spec.reverse:
        dates.reverse()
        values.reverse()
    seen: dict[str, int] = {}
    for d in dates:
        seen[d] = seen.get(d, 0) + 1
    dupes = sorted(d for d, c in seen.items() if c > 1)
    if dupes:
        raise IngestionError(f"{spec.source}: duplicate dates", [f"date {d} appears {seen[d]} times" for d in dupes])
    disorder = [f"{a} precedes {b}" for a, b in zip(dates, dates[1:]) if b < a]
    if disorder:
        hint = " (newest-first file? set reverse)" if not spec.reverse else ""
        raise IngestionError(f"{spec.source}: dates are not in ascending order{hint}", disorder[:10])
    if len(values) < 2:
        raise IngestionError(f"{spec.source}: fewer than 2 valid rows", diagnostics)
    return TimeSeries(values, 0, dates), diagnostics


def ingest_with_diagnostics(spec: IngestSpec, cache_dir=None) -> tuple[TimeSeries, list[str]]:
    if spec.url is not None:
        from .fetch import fetch
        path = fetch(spec.url, cache_dir)
    else:
        path = Path(spec.path)
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise IngestionError(f"cannot read {spec.source}: {exc}") from exc
    return parse_text(text, spec)


def ingest(spec: IngestSpec, cache_dir=None) -> TimeSeries:
    """Read a gapless, oldest-first series with date labels."""
    return ingest_with_diagnostics(spec, cache_dir)[0]


def series_digest(series: TimeSeries) -> str:
    """Content hash of values, labels and start index."""
    payload = json.dumps(
        {"start": series.start_index,
         "values": [repr(float(v)) for v in series.values],
         "labels": list(series.labels) if series.labels is not None else None},
        separators=(",", ":"),
    )
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()


def write_series_csv(series: TimeSeries, stream: io.TextIOBase) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["date", "value"])
    for t, v in zip(series.times, series.values):
        w.writerow([series.label_at(int(t)) or int(t), repr(float(v))])
