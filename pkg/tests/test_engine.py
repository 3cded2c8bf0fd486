import random

import pytest
from hypothesis import given, strategies as st

from scorequery.encode import Encoding, QueryClass
from scorequery.engine import (
    CorpusIndex,
    MatchDecision,
    contains_run,
    evaluate_matcher,
    match_query,
    search,
)
from scorequery.errors import ClassMismatch, DuplicateDecision, UnknownClass, UnknownQueryId
from scorequery.kern import Corpus
from scorequery.metrics import aggregate
from scorequery.querygen import LabeledQuery, Source


def naive_contains(haystack, needle):
    n, m = len(haystack), len(needle)
    return any(all(haystack[i + j] == needle[j] for j in range(m)) for i in range(n - m + 1))


def q(tokens, qc=QueryClass.PITCH, label=False, qid="q", staff="s"):
    source = Source.EXTRACTED if label else Source.CROSS_STAFF
    return LabeledQuery(qid, staff, qc, tokens, label, source)


def test_match_examples():
    enc = Encoding(QueryClass.PITCH, ["C4", "D4", "E4"])
    assert match_query(enc, q(["D4", "E4"]))
    assert not match_query(enc, q(["C4", "E4"]))
    assert not match_query(Encoding(QueryClass.CLEF, ["*clefG2"]), q(["*clefF4"], QueryClass.CLEF))


def test_single_symbol_membership_is_order_free():
    enc = Encoding(QueryClass.METER, ["*M6/8", "*M2/4"])
    assert match_query(enc, q(["*M2/4", "*M6/8"], QueryClass.METER))
    assert not match_query(enc, q(["*M2/4", "*M3/4"], QueryClass.METER))


def test_class_mismatch():
    with pytest.raises(ClassMismatch):
        match_query(Encoding(QueryClass.PITCH, ["C4"]), q(["C4"], QueryClass.PITCH_CLASS))


def test_token_boundaries_are_respected():
    # "+1" must not be found inside "+11"; "1/4" not inside "11/4"
    assert not contains_run(["+11", "-2"], ["+1"])
    assert not contains_run(["11/4"], ["1/4"])
    assert contains_run(["+11", "+1"], ["+1"])


tokens = st.lists(st.sampled_from(["a", "b", "c", "ab", "+1", "+11"]), max_size=30)


@given(tokens, tokens)
def test_contains_matches_sliding_window(hay, needle):
    assert contains_run(hay, needle) == naive_contains(hay, needle)


@given(tokens.filter(bool), st.sampled_from(["a", "b", "c"]))
def test_monotone_under_extension(needle, extra):
    rng = random.Random(len(needle))
    hay = [rng.choice("abc") for _ in range(40)]
    if contains_run(hay, needle + [extra]):
        assert contains_run(hay, needle)


def test_search_examples(small_corpus, small_dataset):
    empty = CorpusIndex(Corpus([]))
    assert search(empty, q(["C4"])) == []
    index = CorpusIndex(small_corpus)
    for query in small_dataset[:200]:
        if query.label:
            assert query.staff_id in search(index, query)
    longest = max(len(index[QueryClass.PITCH, sid]) for sid in small_corpus.ids)
    assert search(index, q(["C4"] * (longest + 1))) == []


def test_search_brute_force(small_corpus, small_dataset):
    index = CorpusIndex(small_corpus)
    for query in small_dataset[::37]:
        expected = [
            s.id for s in small_corpus
            if (set(query.tokens) <= set(index[query.query_class, s.id].tokens)
                if query.query_class.single_symbol
                else naive_contains(index[query.query_class, s.id].tokens, query.tokens))
        ]
        assert search(index, query) == expected


def test_search_unknown_class(small_corpus):
    index = CorpusIndex(small_corpus, [QueryClass.PITCH])
    with pytest.raises(UnknownClass):
        search(index, q(["*clefG2"], QueryClass.CLEF))


def test_generated_queries_match_only_their_positives(small_corpus, small_dataset):
    index = CorpusIndex(small_corpus)
    for query in small_dataset:
        assert index.matches(query.staff_id, query) == (query.source is Source.EXTRACTED)


def _two_class_dataset():
    return [
        q(["C4", "D4"], QueryClass.PITCH, True, "p1"),
        q(["E4", "D4"], QueryClass.PITCH, False, "p2"),
        q(["C4"], QueryClass.PITCH, True, "p3"),
        q(["*M3/4"], QueryClass.METER, True, "m1"),
        q(["*M2/4"], QueryClass.METER, False, "m2"),
    ]


def test_evaluate_gold_decisions():
    ds = _two_class_dataset()
    joined = evaluate_matcher(ds, [MatchDecision(x.query_id, x.label) for x in ds])
    report = aggregate(joined.pairs)
    assert not joined.missing
    for score in report.per_class.values():
        assert score.counts.fp == score.counts.fn == 0


def test_evaluate_all_true():
    ds = _two_class_dataset()
    report = aggregate(evaluate_matcher(ds, [MatchDecision(x.query_id, True) for x in ds]).pairs)
    assert report.per_class[QueryClass.PITCH].recall == 100.0
    assert report.per_class[QueryClass.PITCH].precision == pytest.approx(100 * 2 / 3)
    assert report.per_class[QueryClass.METER].precision == pytest.approx(50.0)


def test_evaluate_errors_and_missing():
    ds = _two_class_dataset()
    with pytest.raises(UnknownQueryId):
        evaluate_matcher(ds, [MatchDecision("nope", True)])
    with pytest.raises(DuplicateDecision):
        evaluate_matcher(ds, [MatchDecision("p1", True), MatchDecision("p1", False)])
    joined = evaluate_matcher(ds, [MatchDecision("p1", True)])
    assert joined.missing == ["p2", "p3", "m1", "m2"]
    assert joined.pairs == [(QueryClass.PITCH, True, True)]
