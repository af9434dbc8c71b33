"""CSV and JSON readers and writers.

1D functions are stored with the header ``x,value``.  2D functions put the
literal ``x\\y`` in the top-left cell, the y-grid along the first row and the
x-grid down the first column.  Lines starting with ``#`` are comments.
Floats are written with 17 significant digits so that files round-trip.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .functions import SampledFunction1D, SampledFunction2D

CORNER = "x\\y"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


@dataclass
class CsvTable:
    header: list[str]
    rows: list[list] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.header):
                raise ValueError(f"row of length {len(r)} under a header of {len(self.header)}")

    @classmethod
    def from_dicts(cls, rows: list[dict], columns=None, comments=()) -> "CsvTable":
        cols = list(columns) if columns is not None else (list(rows[0]) if rows else [])
        return cls(cols, [[r.get(c, "") for c in cols] for r in rows], list(comments))

    def to_text(self) -> str:
        buf = _io.StringIO()
        for c in self.comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def _parse_cell(text: str, line: int, source: str):
    t = text.strip()
    if t in ("true", "false"):
        return t == "true"
    if t == "":
        return ""
    try:
        return float(t)
    except ValueError:
        return t


def _records(text: str, source: str):
    """(line number, fields) for every non-comment, non-blank line."""
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        yield n, next(csv.reader([raw]))


def parse_table(text: str, source: str = "<input>") -> CsvTable:
    recs = list(_records(text, source))
    if not recs:
        raise ParseError("empty table", None, source)
    (_, header), body = recs[0], recs[1:]
    rows = []
    for n, fields in body:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}", n, source)
        rows.append([_parse_cell(f, n, source) for f in fields])
    return CsvTable([h.strip() for h in header], rows)


def read_table(path) -> CsvTable:
    return parse_table(Path(path).read_text(), str(path))


def _float(text: str, line: int, source: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text.strip()!r}", line, source) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text.strip()!r}", line, source)
    return v


def parse_function_1d(text: str, source: str = "<input>") -> SampledFunction1D:
    recs = list(_records(text, source))
    if not recs:
        raise ParseError("empty file", None, source)
    n0, header = recs[0]
    if [h.strip() for h in header] != ["x", "value"]:
        raise ParseError("1D header must be 'x,value'", n0, source)
    xs, vs = [], []
    for n, fields in recs[1:]:
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", n, source)
        xs.append(_float(fields[0], n, source))
        vs.append(_float(fields[1], n, source))
    try:
        return SampledFunction1D(np.array(xs), np.array(vs))
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None


def parse_function_2d(text: str, source: str = "<input>") -> SampledFunction2D:
    recs = list(_records(text, source))
    if len(recs) < 3:
        raise ParseError("a 2D table needs a header and at least 2 rows", None, source)
    n0, header = recs[0]
    if header[0].strip() != CORNER:
        raise ParseError(f"top-left cell must be {CORNER!r}", n0, source)
    ys = [_float(f, n0, source) for f in header[1:]]
    xs, body = [], []
    for n, fields in recs[1:]:
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}", n, source)
        xs.append(_float(fields[0], n, source))
        body.append([_float(f, n, source) for f in fields[1:]])
    try:
        return SampledFunction2D(np.array(xs), np.array(ys), np.array(body))
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None


def read_function(path):
    """1D or 2D function, chosen by the header."""
    text = Path(path).read_text()
    first = next(_records(text, str(path)), None)
    if first is None:
        raise ParseError("empty file", None, str(path))
    if first[1][0].strip() == CORNER:
        return parse_function_2d(text, str(path))
    return parse_function_1d(text, str(path))


def function_1d_text(f: SampledFunction1D) -> str:
    return CsvTable(["x", "value"], [[x, v] for x, v in zip(f.grid.points, f.values)]).to_text()


def function_2d_text(F: SampledFunction2D) -> str:
    header = [CORNER] + [fmt(y) for y in F.grid_y.points]
    rows = [[x, *F.values[i]] for i, x in enumerate(F.grid_x.points)]
    return CsvTable(header, rows).to_text()


def write_function(path, F) -> None:
    text = function_2d_text(F) if isinstance(F, SampledFunction2D) else function_1d_text(F)
    Path(path).write_text(text)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    data = obj.to_json() if hasattr(obj, "to_json") else obj
    return json.dumps(data, default=_jsonable, indent=2, allow_nan=True)
