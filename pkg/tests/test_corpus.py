import datetime as dt
import io
import json
import re
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monthly
from uncertindex.corpus import (
    Article,
    DailyCount,
    DailyCounter,
    aggregate_monthly,
    article_matches,
    daily_counts,
    parse_articles,
    standardize,
    tokenize,
)
from uncertindex.embedding import Lexicon
from uncertindex.errors import ParseError

LEX = Lexicon("uncertainty", ("uncertainties", "uncertain", "unpredictability", "ambiguity"))
WORDS = ["the", "market", "rose", "certain", "certainty", "policy", "ambiguity", "uncertain"]


def jsonl(*records):
    return io.StringIO("".join(json.dumps(r) + "\n" for r in records))


def hand_match(text, words):
    """Oracle tokenizer: walk characters, cut at every non-letter."""
    toks, cur = [], []
    for ch in text.casefold():
        if ch.isalpha():
            cur.append(ch)
        elif cur:
            toks.append("".join(cur))
            cur = []
    if cur:
        toks.append("".join(cur))
    return any(t in set(words) for t in toks)


def random_articles(rng, n, days=20):
    base = dt.date(2018, 1, 1)
    out = []
    for i in range(n):
        day = base + dt.timedelta(days=int(rng.integers(0, days)))
        text = " ".join(rng.choice(WORDS, size=int(rng.integers(0, 8))))
        out.append(Article(day, text, f"a{i}"))
    return out


class TestParseArticles:
    def test_three_lines(self):
        reader = parse_articles(
            jsonl(
                {"date": "2020-01-01", "text": "a"},
                {"date": "2020-01-02", "text": "b", "id": "x"},
                {"date": "2020-01-02", "text": ""},
            )
        )
        arts = list(reader)
        assert len(arts) == 3 and reader.count == 3
        assert arts[1] == Article(dt.date(2020, 1, 2), "b", "x")

    def test_missing_date_strict(self):
        src = jsonl({"date": "2020-01-01", "text": "a"}, {"text": "b"})
        with pytest.raises(ParseError, match="line 2.*date"):
            list(parse_articles(src))

    def test_lenient_skips_and_counts(self):
        src = io.StringIO(
            '{"date": "2020-01-01", "text": "a"}\nnot json\n{"date": "2020-02-30", "text": "x"}\n'
            '{"date": "2020-01-03", "text": "c"}\n'
        )
        reader = parse_articles(src, strict=False)
        assert [a.text for a in reader] == ["a", "c"]
        assert reader.skipped == 2 and reader.skipped_lines == [2, 3]

    def test_empty(self):
        reader = parse_articles(io.StringIO(""))
        assert list(reader) == [] and reader.count == 0

    @pytest.mark.parametrize(
        "line",
        ['{"date": "2020-1-01", "text": "a"}', '{"date": "2020-01-01"}', '[1, 2]', '{"date": "2020-01-01", "text": 5}'],
    )
    def test_malformed(self, line):
        with pytest.raises(ParseError):
            list(parse_articles(io.StringIO(line + "\n")))

    def test_bytes_stream(self):
        src = io.BytesIO(b'{"date": "2020-01-01", "text": "\xc3\xa9t\xc3\xa9"}\n')
        assert [a.text for a in parse_articles(src)] == ["été"]


class TestMatching:
    def test_seed_present(self):
        assert article_matches("Uncertainty rose.", LEX)

    def test_substring_is_not_match(self):
        assert not article_matches("the certain outcome", LEX)
        assert not article_matches("uncertaintyish times", LEX)

    def test_case_folding(self):
        text = "AMBIGUITY everywhere"
        assert article_matches(text, LEX) == hand_match(text, LEX.words) is True

    def test_hyphen_splits(self):
        assert tokenize("un-certain, 2020's") == ["un", "certain", "s"]
        assert not article_matches("un-certain", LEX)

    def test_digits_and_underscore_split(self):
        assert tokenize("abc1def_ghi") == ["abc", "def", "ghi"]

    def test_unicode_letters(self):
        assert tokenize("Straße naïve") == ["strasse", "naïve"]

    def test_article_object(self):
        assert article_matches(Article(dt.date(2020, 1, 1), "uncertain."), LEX)

    @given(st.text(alphabet=st.sampled_from(list("uncertaiyAMBIGUTY .,-!é1")), max_size=60))
    def test_against_hand_tokenizer(self, text):
        assert article_matches(text, LEX) == hand_match(text, LEX.words)

    @given(st.lists(st.sampled_from(WORDS + ["Uncertain", "AmBiGuItY"]), max_size=10))
    def test_case_invariance(self, words):
        text = " ".join(words)
        assert article_matches(text, LEX) == article_matches(text.upper(), LEX) == article_matches(
            text.lower(), LEX
        )


class TestDailyCounts:
    def test_same_day(self):
        d = dt.date(2020, 3, 4)
        got = daily_counts([Article(d, "uncertain times"), Article(d, "calm")], LEX)
        assert got == [DailyCount(d, 1, 2)]

    def test_no_articles_no_entry(self):
        got = daily_counts([Article(dt.date(2020, 1, 1), "x"), Article(dt.date(2020, 1, 3), "y")], LEX)
        assert [c.date for c in got] == [dt.date(2020, 1, 1), dt.date(2020, 1, 3)]

    def test_empty_text_counts_toward_total(self):
        assert daily_counts([Article(dt.date(2020, 1, 1), "")], LEX) == [DailyCount(dt.date(2020, 1, 1), 0, 1)]

    def test_brute_force_recount(self, rng):
        arts = random_articles(rng, 100)
        oracle = defaultdict(lambda: [0, 0])
        for a in arts:
            oracle[a.date][1] += 1
            oracle[a.date][0] += hand_match(a.text, LEX.words)
        got = daily_counts(arts, LEX)
        assert [(c.date, c.matched, c.total) for c in got] == [
            (d, m, t) for d, (m, t) in sorted(oracle.items())
        ]

    def test_permutation_invariance(self, rng):
        arts = random_articles(rng, 80)
        perm = [arts[i] for i in rng.permutation(len(arts))]
        assert daily_counts(arts, LEX) == daily_counts(perm, LEX)

    def test_merge_independent_of_partition(self, rng):
        arts = random_articles(rng, 90)
        whole = daily_counts(arts, LEX)
        parts = [DailyCounter(LEX).update(arts[i::3]) for i in range(3)]
        merged = parts[0].merge(parts[1]).merge(parts[2])
        assert merged.counts() == whole

    def test_non_matching_article(self, rng):
        arts = random_articles(rng, 30)
        before = {c.date: c for c in daily_counts(arts, LEX)}
        day = arts[0].date
        after = {c.date: c for c in daily_counts(arts + [Article(day, "calm markets")], LEX)}
        assert after[day].matched == before[day].matched
        assert after[day].total == before[day].total + 1

    def test_invariant(self):
        with pytest.raises(ValueError):
            DailyCount(dt.date(2020, 1, 1), 3, 2)


class TestAggregate:
    def test_one_month(self):
        daily = [DailyCount(dt.date(2020, 1, d), m, t) for d, m, t in [(1, 2, 20), (2, 3, 30)]]
        s = aggregate_monthly(daily)
        assert s.months == ("2020-01",)
        assert s.values[0] == pytest.approx(0.1, abs=1e-15)

    def test_all_match(self):
        s = aggregate_monthly([DailyCount(dt.date(2020, 1, 5), 7, 7)])
        assert s.values[0] == 1.0

    def test_spreadsheet_recount(self):
        # 3 months, hand arithmetic
        rows = [
            ("2019-11-02", 1, 4), ("2019-11-30", 0, 6),
            ("2019-12-01", 3, 3), ("2019-12-15", 1, 9), ("2019-12-31", 0, 0),
            ("2020-01-10", 2, 5),
        ]
        daily = [DailyCount(dt.date.fromisoformat(d), m, t) for d, m, t in rows]
        s = aggregate_monthly(daily)
        np.testing.assert_allclose(s.values, [1 / 10, 4 / 12, 2 / 5], rtol=0, atol=1e-15)
        mean = aggregate_monthly(daily, weighting="mean")
        np.testing.assert_allclose(mean.values, [(0.25 + 0) / 2, (1 + 1 / 9) / 2, 0.4], atol=1e-15)

    def test_zero_month_dropped_with_warning(self):
        daily = [DailyCount(dt.date(2020, 1, 1), 0, 0), DailyCount(dt.date(2020, 2, 1), 1, 2)]
        with pytest.warns(UserWarning, match="2020-01"):
            s = aggregate_monthly(daily)
        assert s.months == ("2020-02",)

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate_monthly([])

    def test_bad_weighting(self):
        with pytest.raises(ValueError):
            aggregate_monthly([DailyCount(dt.date(2020, 1, 1), 0, 1)], weighting="median")

    def test_between_daily_extremes(self, rng):
        daily = []
        for day in range(1, 29):
            t = int(rng.integers(1, 40))
            daily.append(DailyCount(dt.date(2021, 6, day), int(rng.integers(0, t + 1)), t))
        p = [c.proportion for c in daily]
        for w in ("count", "mean"):
            v = aggregate_monthly(daily, weighting=w).values[0]
            assert min(p) <= v <= max(p)

    def test_bounded(self, rng):
        s = aggregate_monthly(daily_counts(random_articles(rng, 60, days=90), LEX))
        assert s.bounded and np.all((s.values >= 0) & (s.values <= 1))


class TestStandardize:
    def test_constant(self):
        with pytest.raises(ValueError, match="zero variance"):
            standardize(monthly("c", [2.0, 2.0, 2.0]))

    def test_two_points(self):
        z = standardize(monthly("s", [1.0, 3.0]))
        np.testing.assert_allclose(z.values, [-np.sqrt(0.5), np.sqrt(0.5)], rtol=1e-15)

    def test_random(self, rng):
        z = standardize(monthly("s", rng.gamma(2.0, size=24)))
        assert abs(z.values.mean()) < 1e-12
        assert abs(z.values.std(ddof=1) - 1) < 1e-12

    def test_too_short(self):
        with pytest.raises(ValueError):
            standardize(monthly("s", [1.0]))


class TestFixtureCorpus:
    def test_recount(self, data_dir):
        """Monthly proportions against a recount that shares no code with the package."""
        words = {"uncertainty", "uncertainties", "uncertain", "unpredictability", "ambiguity"}
        hits, totals = defaultdict(int), defaultdict(int)
        with open(data_dir / "corpus.jsonl", encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                month = rec["date"][:7]
                totals[month] += 1
                hits[month] += bool(words & set(re.findall(r"[a-z]+", rec["text"].lower())))
        with open(data_dir / "corpus.jsonl", encoding="utf-8") as fh:
            s = aggregate_monthly(daily_counts(parse_articles(fh), LEX))
        assert list(s.months) == sorted(totals)
        assert len(s) == 36
        np.testing.assert_allclose(s.values, [hits[m] / totals[m] for m in s.months], rtol=0, atol=1e-12)

    def test_size(self, data_dir):
        with open(data_dir / "corpus.jsonl", encoding="utf-8") as fh:
            reader = parse_articles(fh)
            for _ in reader:
                pass
        assert 450 <= reader.count <= 550
