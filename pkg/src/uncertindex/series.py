"""Month-indexed series, their CSV form, and joining several series on a common index."""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, ParseError

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def parse_month(text: str) -> int:
    """Return a month key (``year * 12 + month - 1``) for ``YYYY-MM``."""
    m = _MONTH_RE.match(text.strip())
    if m is None:
        raise ValueError(f"invalid month {text!r}, expected YYYY-MM")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise ValueError(f"invalid month {text!r}, month out of range")
    return year * 12 + month - 1


def format_month(key: int) -> str:
    year, month0 = divmod(int(key), 12)
    return f"{year:04d}-{month0 + 1:02d}"


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of months from ``start`` to ``end``."""
    a, b = parse_month(start), parse_month(end)
    if b < a:
        raise ValueError(f"empty month range {start}..{end}")
    return [format_month(k) for k in range(a, b + 1)]


@dataclass(frozen=True)
class MonthlySeries:
    """A labelled series indexed by strictly increasing ``YYYY-MM`` months.

    ``bounded`` marks proportion series whose values must lie in [0, 1];
    imported external indices leave it False.
    """

    label: str
    months: tuple[str, ...]
    values: np.ndarray
    bounded: bool = False

    def __post_init__(self) -> None:
        months = tuple(self.months)
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if len(months) != values.shape[0]:
            raise ValueError("months and values differ in length")
        keys = [parse_month(m) for m in months]
        for i in range(1, len(keys)):
            if keys[i] <= keys[i - 1]:
                raise ValueError(
                    f"{self.label}: months not strictly increasing at {months[i]}"
                )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.label}: non-finite value")
        if self.bounded and values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValueError(f"{self.label}: proportion outside [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "months", tuple(format_month(k) for k in keys))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.months)

    @property
    def start(self) -> str:
        return self.months[0]

    @property
    def end(self) -> str:
        return self.months[-1]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.months, self.values.tolist()))

    def scaled(self, factor: float) -> "MonthlySeries":
        return MonthlySeries(self.label, self.months, self.values * factor)

    def relabel(self, label: str) -> "MonthlySeries":
        return MonthlySeries(label, self.months, self.values, self.bounded)

    def slice(self, start: str | None = None, end: str | None = None) -> "MonthlySeries":
        lo = parse_month(start) if start else -np.inf
        hi = parse_month(end) if end else np.inf
        keep = [i for i, m in enumerate(self.months) if lo <= parse_month(m) <= hi]
        return MonthlySeries(
            self.label, tuple(self.months[i] for i in keep), self.values[keep], self.bounded
        )


def write_series_csv(series: MonthlySeries, target: str | os.PathLike | io.TextIOBase) -> None:
    """Write ``month,value`` rows with values to 8 decimal places."""
    lines = ["month,value"]
    lines += [f"{m},{v:.8f}" for m, v in zip(series.months, series.values)]
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, os.PathLike)):
        Path(target).write_text(text, encoding="utf-8", newline="")
    else:
        target.write(text)


def read_series_csv(
    source: str | os.PathLike | io.TextIOBase,
    label: str | None = None,
    bounded: bool = False,
) -> MonthlySeries:
    """Read a ``month,value`` CSV. The label defaults to the file stem."""
    if isinstance(source, (str, os.PathLike)):
        name = str(source)
        if label is None:
            label = Path(source).stem
        with open(source, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        name = getattr(source, "name", "<stream>")
        rows = list(csv.reader(source))
    if label is None:
        label = "series"
    if not rows or [c.strip().lower() for c in rows[0]] != ["month", "value"]:
        raise ParseError("expected header 'month,value'", line=1, source=name)
    months: list[str] = []
    values: list[float] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno, source=name)
        try:
            parse_month(row[0])
            value = float(row[1])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, source=name) from None
        months.append(row[0].strip())
        values.append(value)
    try:
        return MonthlySeries(label, tuple(months), np.array(values), bounded)
    except ValueError as exc:
        raise ParseError(str(exc), source=name) from None


@dataclass(frozen=True)
class AlignedSeries:
    """K series on one gap-free monthly index, stored as a T x K matrix."""

    labels: tuple[str, ...]
    months: tuple[str, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        if data.shape != (len(self.months), len(self.labels)):
            raise ValueError(
                f"data shape {data.shape} does not match "
                f"{len(self.months)} months x {len(self.labels)} labels"
            )
        keys = [parse_month(m) for m in self.months]
        for i in range(1, len(keys)):
            if keys[i] != keys[i - 1] + 1:
                raise AlignmentError(
                    f"months not consecutive between {self.months[i - 1]} and {self.months[i]}"
                )
        if not np.all(np.isfinite(data)):
            raise ValueError("aligned data contains missing or non-finite cells")
        data.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "months", tuple(self.months))
        object.__setattr__(self, "data", data)

    @property
    def nobs(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]

    def column(self, label: str) -> np.ndarray:
        return self.data[:, self.labels.index(label)]


def align(
    series: Sequence[MonthlySeries],
    start: str | None = None,
    end: str | None = None,
) -> AlignedSeries:
    """Join series on every month of a closed range.

    The range defaults to the overlap of the inputs. Every series must cover
    every month of the range; otherwise the missing months are reported.
    """
    if len(series) < 1:
        raise AlignmentError("no series to align")
    labels = [s.label for s in series]
    if len(set(labels)) != len(labels):
        raise AlignmentError(f"duplicate series labels {labels}")
    empty = [s.label for s in series if len(s) == 0]
    if empty:
        raise AlignmentError(f"empty series {empty}")
    lo = parse_month(start) if start else max(parse_month(s.start) for s in series)
    hi = parse_month(end) if end else min(parse_month(s.end) for s in series)
    if hi < lo:
        raise AlignmentError(
            f"series do not overlap (range {format_month(lo)}..{format_month(hi)})"
        )
    months = [format_month(k) for k in range(lo, hi + 1)]
    missing: dict[str, list[str]] = {}
    columns = []
    for s in series:
        lookup = s.as_dict()
        gaps = [m for m in months if m not in lookup]
        if gaps:
            missing[s.label] = gaps
            continue
        columns.append([lookup[m] for m in months])
    if missing:
        raise AlignmentError("series do not cover the sample", missing)
    return AlignedSeries(tuple(labels), tuple(months), np.array(columns).T)


def split_ranges(start: str, end: str, split: Iterable[str]) -> list[tuple[str, str]]:
    """Full sample followed by the sub-periods cut at each split month.

    ``split_ranges("1996-01", "2020-05", ["2008-01"])`` gives the full range
    plus 1996-01..2007-12 and 2008-01..2020-05.
    """
    a, b = parse_month(start), parse_month(end)
    cuts = sorted(parse_month(s) for s in split)
    for c in cuts:
        if not a < c <= b:
            raise ValueError(f"split month {format_month(c)} outside ({start}, {end}]")
    ranges = [(format_month(a), format_month(b))]
    if cuts:
        edges = [a] + cuts + [b + 1]
        ranges += [
            (format_month(edges[i]), format_month(edges[i + 1] - 1)) for i in range(len(edges) - 1)
        ]
    return ranges
