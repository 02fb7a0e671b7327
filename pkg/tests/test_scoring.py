import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from docgen import random_corpus
from eventgrid.corpus import Argument, Document, Event, Nugget
from eventgrid.scoring import METRICS, extract_items, score
from eventgrid.schema import default_schema


def ev(eid, etype, trigger, args=()):
    return Event(
        event_id=eid,
        event_type=etype,
        trigger=Nugget(token_indices=tuple(trigger)),
        arguments=tuple(Argument(role=r, nugget=Nugget(token_indices=tuple(s))) for r, s in args),
    )


def doc(events, doc_id="d", n=12):
    return Document(doc_id=doc_id, tokens=tuple(f"w{i}" for i in range(n)), events=tuple(events))


# one document, four spans: a FIN event whose Content argument is itself a
# FAC trigger (sub-event), plus that FAC event with one Subject argument
GOLD = doc([
    ev("e1", "FIN", [0], [("Finder", [2, 3]), ("Content", [5])]),
    ev("e2", "FAC", [5], [("Subject", [7])]),
])


class TestItemExtraction:
    def test_item_sets(self, schema):
        assert extract_items([GOLD], "TI", schema) == {("d", (0,)), ("d", (5,))}
        assert extract_items([GOLD], "TC", schema) == {("d", (0,), "FIN"), ("d", (5,), "FAC")}
        assert extract_items([GOLD], "AI", schema) == {
            ("d", (0,), "FIN", (2, 3)),
            ("d", (0,), "FIN", (5,)),
            ("d", (5,), "FAC", (7,)),
        }
        assert extract_items([GOLD], "AC", schema) == {
            ("d", (0,), "FIN", (2, 3), "Finder"),
            ("d", (0,), "FIN", (5,), "Content"),
            ("d", (5,), "FAC", (7,), "Subject"),
        }
        assert extract_items([GOLD], "EC", schema) == {
            ("d", (0,), "FIN", (5,), "Content", "FAC"),
        }

    def test_duplicate_events_merge(self, schema):
        d = doc([
            ev("a", "PUR", [0], [("Aim", [2])]),
            ev("b", "PUR", [0], [("Aim", [2])]),
        ])
        assert len(extract_items([d], "TI", schema)) == 1
        assert len(extract_items([d], "AC", schema)) == 1

    def test_unknown_metric(self, schema):
        with pytest.raises(ValueError):
            extract_items([GOLD], "XX", schema)


class TestScore:
    def test_perfect_self_score(self, schema):
        report = score([GOLD], [GOLD], schema)
        for m in METRICS:
            s = report[m]
            assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0), m

    def test_one_argument_deleted(self, schema):
        pred = doc([
            ev("e1", "FIN", [0], [("Finder", [2, 3])]),
            ev("e2", "FAC", [5], [("Subject", [7])]),
        ])
        report = score([pred], [GOLD], schema)
        assert report["TI"].f1 == 1.0
        assert report["TC"].f1 == 1.0
        assert report["AI"].precision == 1.0
        assert report["AI"].recall == pytest.approx(2 / 3)
        assert report["AI"].f1 == pytest.approx(0.8)
        assert report["AC"].f1 == pytest.approx(0.8)
        assert report["EC"].predicted == 0
        assert report["EC"].gold == 1
        assert (report["EC"].precision, report["EC"].recall, report["EC"].f1) == (0.0, 0.0, 0.0)

    def test_span_comparison_is_ordered(self, schema):
        pred = doc([ev("e1", "PUR", [7, 2])])
        gold = doc([ev("e1", "PUR", [2, 7])])
        report = score([pred], [gold], schema)
        assert report["TI"].matched == 0
        assert report["TI"].f1 == 0.0

    def test_na_when_both_empty(self, schema):
        d1, d2 = doc([], doc_id="a"), doc([], doc_id="a")
        report = score([d1], [d2], schema)
        for m in METRICS:
            assert report[m].precision is None
            assert report[m].f1 is None
            assert not report[m].defined

    def test_ec_na_when_no_subevents_either_side(self, schema):
        d = doc([ev("e1", "PUR", [0])])
        report = score([d], [d], schema)
        assert report["TI"].f1 == 1.0
        assert report["EC"].f1 is None

    def test_zero_division_sides(self, schema):
        empty = doc([])
        some = doc([ev("e1", "PUR", [0])])
        r = score([empty], [some], schema)
        assert (r["TI"].precision, r["TI"].recall, r["TI"].f1) == (0.0, 0.0, 0.0)
        r = score([some], [empty], schema)
        assert (r["TI"].precision, r["TI"].recall, r["TI"].f1) == (0.0, 0.0, 0.0)

    def test_doc_id_mismatch_rejected(self, schema):
        with pytest.raises(ValueError, match="ids differ"):
            score([doc([], doc_id="a")], [doc([], doc_id="b")], schema)

    def test_token_length_mismatch_rejected(self, schema):
        with pytest.raises(ValueError, match="tokens"):
            score([doc([], n=5)], [doc([], n=6)], schema)

    def test_token_text_may_differ(self, schema):
        pred = Document(doc_id="d", tokens=("x",) * 12, events=GOLD.events)
        assert score([pred], [GOLD], schema)["AC"].f1 == 1.0

    def test_report_json_and_table(self, schema):
        report = score([GOLD], [GOLD], schema)
        obj = report.to_json_obj()
        assert list(obj) == list(METRICS)
        assert obj["TI"]["f1"] == 1.0
        table = report.format_table(percent=True)
        assert "100.00" in table
        empty_report = score([doc([])], [doc([])], schema)
        assert "NA" in empty_report.format_table()


SCHEMA = default_schema()
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_self_score_is_perfect_or_na(seed):
    docs = random_corpus(random.Random(seed), SCHEMA, 3)
    report = score(docs, docs, SCHEMA)
    for m in METRICS:
        s = report[m]
        assert s.f1 == 1.0 or (s.f1 is None and s.predicted == s.gold == 0)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_subset_predictions_keep_precision_one(seed):
    rng = random.Random(seed)
    docs = random_corpus(rng, SCHEMA, 3)
    pruned = [
        Document(d.doc_id, d.tokens, tuple(e for e in d.events if rng.random() < 0.6))
        for d in docs
    ]
    report = score(pruned, docs, SCHEMA)
    # dropping whole events (arguments intact) can only lose items, even for
    # EC: every surviving link pairs two surviving untouched events
    for m in METRICS:
        s = report[m]
        assert s.predicted == 0 or s.precision == 1.0
        if s.defined:
            assert s.matched == s.predicted


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_order_invariance(seed):
    rng = random.Random(seed)
    docs = random_corpus(rng, SCHEMA, 4)
    shuffled = list(docs)
    rng.shuffle(shuffled)
    shuffled = [
        Document(d.doc_id, d.tokens, tuple(reversed(d.events))) for d in shuffled
    ]
    assert score(docs, docs, SCHEMA).to_json_obj() == score(shuffled, docs, SCHEMA).to_json_obj()


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_metric_hierarchy(seed):
    rng = random.Random(seed)
    gold = random_corpus(rng, SCHEMA, 3)
    pred = random_corpus(random.Random(seed + 1), SCHEMA, 3)
    pred = [Document(g.doc_id, g.tokens, p.events) for g, p in zip(gold, pred)]
    report = score(pred, gold, SCHEMA)
    assert report["TC"].matched <= report["TI"].matched
    assert report["AC"].matched <= report["AI"].matched
