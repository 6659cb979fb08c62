"""Dated articles -> daily match counts -> monthly proportion series."""

from __future__ import annotations

import datetime as dt
import io
import json
import os
import re
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Literal

import numpy as np

from .embedding import Lexicon
from .errors import ParseError
from .series import MonthlySeries

# letters only: \w minus digits and underscore
_WORD_RE = re.compile(r"[^\W\d_]+")


@dataclass(frozen=True)
class Article:
    date: dt.date
    text: str
    id: str | None = None


@dataclass(frozen=True)
class DailyCount:
    date: dt.date
    matched: int
    total: int

    def __post_init__(self) -> None:
        if not 0 <= self.matched <= self.total:
            raise ValueError(f"{self.date}: need 0 <= matched <= total")

    @property
    def proportion(self) -> float:
        return self.matched / self.total


def _parse_record(line: str) -> Article:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON ({exc.msg})") from None
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    if "date" not in rec:
        raise ValueError("missing 'date'")
    if "text" not in rec:
        raise ValueError("missing 'text'")
    date, text, ident = rec["date"], rec["text"], rec.get("id")
    if not isinstance(date, str) or not re.fullmatch(r"\d{4}-\d{2}-\d{2}", date):
        raise ValueError(f"invalid date {date!r}, expected YYYY-MM-DD")
    try:
        day = dt.date.fromisoformat(date)
    except ValueError:
        raise ValueError(f"invalid calendar date {date!r}") from None
    if not isinstance(text, str):
        raise ValueError("'text' is not a string")
    if ident is not None and not isinstance(ident, (str, int)):
        raise ValueError("'id' is not a string")
    return Article(day, text, None if ident is None else str(ident))


class ArticleReader:
    """Iterate articles from a JSON-lines stream.

    In strict mode the first malformed line raises :class:`ParseError`; in
    lenient mode it is skipped and counted in ``skipped``. Blank lines are
    ignored. ``count`` is the number of articles yielded so far.
    """

    def __init__(self, source: str | os.PathLike | IO, strict: bool = True):
        self.source = source
        self.strict = strict
        self.count = 0
        self.skipped = 0
        self.skipped_lines: list[int] = []

    @property
    def name(self) -> str:
        if isinstance(self.source, (str, os.PathLike)):
            return str(self.source)
        return getattr(self.source, "name", "<stream>")

    def _lines(self) -> Iterator[str]:
        if isinstance(self.source, (str, os.PathLike)):
            with open(self.source, encoding="utf-8") as fh:
                yield from fh
        elif isinstance(self.source, io.TextIOBase):
            yield from self.source
        else:
            for raw in self.source:
                yield raw.decode("utf-8") if isinstance(raw, bytes) else raw

    def __iter__(self) -> Iterator[Article]:
        for lineno, line in enumerate(self._lines(), start=1):
            if not line.strip():
                continue
            try:
                article = _parse_record(line)
            except ValueError as exc:
                if self.strict:
                    raise ParseError(str(exc), line=lineno, source=self.name) from None
                self.skipped += 1
                self.skipped_lines.append(lineno)
                continue
            self.count += 1
            yield article


def parse_articles(source, strict: bool = True) -> ArticleReader:
    return ArticleReader(source, strict=strict)


def tokenize(text: str) -> list[str]:
    """Case-fold, then split on anything that is not a letter."""
    return _WORD_RE.findall(text.casefold())


def _word_set(lexicon: Lexicon | Iterable[str]) -> frozenset[str]:
    words = lexicon.words if isinstance(lexicon, Lexicon) else lexicon
    return frozenset(w.casefold() for w in words)


def article_matches(article: Article | str, lexicon: Lexicon | Iterable[str]) -> bool:
    """Whole-word match of any lexicon word in the article text."""
    text = article.text if isinstance(article, Article) else article
    words = _word_set(lexicon)
    return any(tok in words for tok in tokenize(text))


class DailyCounter:
    """Accumulates per-date (matched, total); partial counters merge by addition."""

    def __init__(self, lexicon: Lexicon | Iterable[str]):
        self._words = _word_set(lexicon)
        self.matched: dict[dt.date, int] = defaultdict(int)
        self.total: dict[dt.date, int] = defaultdict(int)

    def add(self, article: Article) -> bool:
        hit = any(tok in self._words for tok in tokenize(article.text))
        self.total[article.date] += 1
        if hit:
            self.matched[article.date] += 1
        return hit

    def update(self, articles: Iterable[Article]) -> "DailyCounter":
        for a in articles:
            self.add(a)
        return self

    def merge(self, other: "DailyCounter") -> "DailyCounter":
        for day, n in other.total.items():
            self.total[day] += n
        for day, n in other.matched.items():
            self.matched[day] += n
        return self

    def counts(self) -> list[DailyCount]:
        return [
            DailyCount(day, self.matched.get(day, 0), self.total[day]) for day in sorted(self.total)
        ]


def daily_counts(articles: Iterable[Article], lexicon: Lexicon | Iterable[str]) -> list[DailyCount]:
    return DailyCounter(lexicon).update(articles).counts()


def aggregate_monthly(
    daily: Iterable[DailyCount],
    label: str = "UNCERT",
    weighting: Literal["count", "mean"] = "count",
) -> MonthlySeries:
    """Monthly share of matching articles.

    ``weighting="count"`` pools the month (sum matched / sum total).
    ``weighting="mean"`` averages the daily proportions of days with articles.
    Months whose total is zero are dropped with a warning.
    """
    daily = list(daily)
    if not daily:
        raise ValueError("no daily counts to aggregate")
    if weighting not in ("count", "mean"):
        raise ValueError(f"unknown weighting {weighting!r}")
    matched: dict[str, int] = defaultdict(int)
    total: dict[str, int] = defaultdict(int)
    props: dict[str, list[float]] = defaultdict(list)
    for dc in daily:
        month = f"{dc.date.year:04d}-{dc.date.month:02d}"
        matched[month] += dc.matched
        total[month] += dc.total
        if dc.total > 0:
            props[month].append(dc.matched / dc.total)
    months, values = [], []
    for month in sorted(total):
        if total[month] == 0:
            warnings.warn(f"{month}: no articles, month omitted", stacklevel=2)
            continue
        months.append(month)
        if weighting == "count":
            values.append(matched[month] / total[month])
        else:
            values.append(float(np.mean(props[month])))
    if not months:
        raise ValueError("every month has zero articles")
    return MonthlySeries(label, tuple(months), np.array(values), bounded=True)


def standardize(series: MonthlySeries) -> MonthlySeries:
    """z-score with the sample standard deviation."""
    v = series.values
    if v.size < 2:
        raise ValueError("need at least 2 points to standardize")
    sd = v.std(ddof=1)
    if not sd > 0:
        raise ValueError(f"{series.label}: zero variance, cannot standardize")
    return MonthlySeries(series.label, series.months, (v - v.mean()) / sd)
