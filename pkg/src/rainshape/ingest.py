"""Tabular precipitation records and per-pass gridded snapshots.

The ingestion format is a comma separated UTF-8 text file with one header
line::

    pass_id,grid_i,grid_j,lat,lon,rain_rate[,group]

Every observed cell of a pass is listed, including cells with zero rain, so
that the set of rows of one pass is exactly the observed swath.  The optional
``group`` column carries a grouping key (e.g. a calendar year) that is passed
through to the downstream reports.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

REQUIRED_COLUMNS = ("pass_id", "grid_i", "grid_j", "lat", "lon", "rain_rate")
OPTIONAL_COLUMNS = ("group",)


class ParseError(ValueError):
    """Malformed input row. ``line`` is the 1-based line number in the file."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateCellError(ParseError):
    pass


@dataclass(frozen=True)
class PassRecord:
    pass_id: str
    grid_i: int
    grid_j: int
    lat: float
    lon: float
    rain_rate: float
    group: str = ""


@dataclass(frozen=True)
class Snapshot:
    """One satellite pass: every observed cell with its centre and rain rate.

    ``cells`` maps ``(grid_i, grid_j)`` to ``(lat, lon, rain_rate)`` and holds
    zero-rain cells too, so ``swath`` is simply its key set.
    """

    pass_id: str
    cells: dict
    cell_size_km: float = 5.0
    group: str = ""
    swath: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.cells:
            raise ValueError(f"snapshot {self.pass_id!r} has an empty swath")
        if not self.cell_size_km > 0:
            raise ValueError("cell_size_km must be positive")
        object.__setattr__(self, "swath", frozenset(self.cells))

    def rain(self, cell) -> float:
        return self.cells[cell][2]

    def center(self, cell) -> tuple[float, float]:
        lat, lon, _ = self.cells[cell]
        return lat, lon

    def positive_cells(self, min_rain_rate: float = 0.0) -> set:
        return {c for c, (_, _, r) in self.cells.items() if r > min_rain_rate}


def _parse_float(text: str, name: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line, f"{name} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(line, f"{name} is not finite: {text!r}")
    return value


def _parse_int(text: str, name: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(line, f"{name} is not an integer: {text!r}") from None


def parse_records(stream: IO[bytes] | IO[str] | bytes | str) -> list[PassRecord]:
    """Parse the delimited intermediate format into records, in file order.

    Accepts a binary or text stream, or the raw file contents.  Raises
    `ParseError` (with the offending line number) for malformed rows and
    `DuplicateCellError` when a ``(pass_id, grid_i, grid_j)`` repeats.
    Blank input yields no records.
    """
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    if not text.strip():
        return []
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError(1, "missing header line") from None
    if tuple(header[:6]) != REQUIRED_COLUMNS or tuple(header[6:]) not in ((), OPTIONAL_COLUMNS):
        raise ParseError(1, f"unexpected header {header!r}")
    width = len(header)
    has_group = width == 7

    records: list[PassRecord] = []
    seen: dict[tuple, int] = {}
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise ParseError(line, f"expected {width} fields, got {len(row)}")
        pass_id = row[0].strip()
        if not pass_id:
            raise ParseError(line, "empty pass_id")
        gi = _parse_int(row[1], "grid_i", line)
        gj = _parse_int(row[2], "grid_j", line)
        lat = _parse_float(row[3], "lat", line)
        lon = _parse_float(row[4], "lon", line)
        rain = _parse_float(row[5], "rain_rate", line)
        if not -90.0 <= lat <= 90.0:
            raise ParseError(line, f"lat out of range: {lat}")
        if not -180.0 <= lon <= 180.0:
            raise ParseError(line, f"lon out of range: {lon}")
        if rain < 0:
            raise ParseError(line, f"negative rain_rate: {rain}")
        key = (pass_id, gi, gj)
        if key in seen:
            raise DuplicateCellError(line, f"duplicate cell {key} (first seen on line {seen[key]})")
        seen[key] = line
        group = row[6].strip() if has_group else ""
        records.append(PassRecord(pass_id, gi, gj, lat, lon, rain, group))
    return records


def serialize_records(records: Iterable[PassRecord]) -> str:
    """Inverse of `parse_records`; floats are written with ``repr`` so the round trip is exact."""
    records = list(records)
    with_group = any(r.group for r in records)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS + (OPTIONAL_COLUMNS if with_group else ()))
    for r in records:
        row = [r.pass_id, r.grid_i, r.grid_j, repr(float(r.lat)), repr(float(r.lon)), repr(float(r.rain_rate))]
        if with_group:
            row.append(r.group)
        writer.writerow(row)
    return out.getvalue()


def group_by_pass(records: Sequence[PassRecord], cell_size_km: float = 5.0) -> list[Snapshot]:
    """One `Snapshot` per distinct pass_id, sorted by pass_id."""
    by_pass: dict[str, dict] = {}
    groups: dict[str, str] = {}
    for r in records:
        by_pass.setdefault(r.pass_id, {})[(r.grid_i, r.grid_j)] = (r.lat, r.lon, r.rain_rate)
        if r.group:
            groups.setdefault(r.pass_id, r.group)
    return [
        Snapshot(pid, by_pass[pid], cell_size_km=cell_size_km, group=groups.get(pid, ""))
        for pid in sorted(by_pass)
    ]


def read_snapshots(path, cell_size_km: float = 5.0) -> list[Snapshot]:
    with open(path, "rb") as fh:
        return group_by_pass(parse_records(fh), cell_size_km=cell_size_km)
