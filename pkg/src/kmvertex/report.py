"""Relation records and their JSON / CSV / table rendering."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

FIELDS = (
    "relation",
    "tag",
    "residual",
    "tolerance",
    "central_measured",
    "central_reduced",
    "n_checked",
    "passed",
    "detail",
)
FORMATS = ("json", "csv", "table")


class ReportFormatError(ValueError):
    pass


@dataclass
class Record:
    relation: str
    tag: str
    residual: float
    tolerance: float
    central_measured: float | None = None
    central_reduced: float | None = None
    n_checked: int = 0
    passed: bool | None = None
    detail: str = ""

    def __post_init__(self):
        if self.passed is None:
            # a check that inspected nothing proves nothing
            self.passed = (
                self.n_checked > 0
                and math.isfinite(self.residual)
                and self.residual <= self.tolerance
            )

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FIELDS}


@dataclass
class Report:
    records: list[Record] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    def extend(self, other: "Report") -> "Report":
        self.records.extend(other.records)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def __getitem__(self, relation: str) -> Record:
        for r in self.records:
            if r.relation == relation:
                return r
        raise KeyError(relation)

    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            return str(v)
        return float(format(v, ".12g"))
    return v


def render(report: Report, fmt: str) -> str:
    if fmt not in FORMATS:
        raise ReportFormatError(f"unknown output format {fmt!r}; choose from {', '.join(FORMATS)}")
    rows = [r.as_dict() for r in report.records]
    if fmt == "json":
        payload = {
            "metadata": report.metadata,
            "records": [{k: _json_value(v) for k, v in row.items()} for row in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for row in rows:
            w.writerow([_fmt(row[k]) for k in FIELDS])
        return buf.getvalue()
    cols = ("relation", "residual", "tolerance", "central_measured", "central_reduced", "n_checked", "passed")
    cells = [[_fmt(row[k]) for k in cols] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(cols)]
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()
    out = [line(cols), line(["-" * w for w in widths])]
    out += [line(r) for r in cells]
    return "\n".join(out) + "\n"
