"""Hand-built corpora with independently computed statistics.

The five-document corpus below was tallied by hand before the stats module
existed; the expected numbers frozen in test_stats.py come from that tally,
not from running the code.

Tally (for the reader, not the tests):
  tokens 40+50+30+60+20 = 200, events 8, arguments 12
  covered positions 9+6+4+0+6 = 25
  nugget population 5+4+3+0+5 = 17
  discontinuous spans: B (12,15), C (7,2)            -> 2
  reverse-order spans: C (7,2), C (11,10)            -> 2
  overlapping spans:   C (7,2) with (2,)             -> 2
  distinct sub-side events: B e2, E e2               -> 2 of 8
"""

from __future__ import annotations

from eventgrid.corpus import Argument, Document, Event, Nugget


def ev(event_id, event_type, trigger, args=(), trigger_type=None):
    return Event(
        event_id=event_id,
        event_type=event_type,
        trigger=Nugget(token_indices=tuple(trigger), nugget_type=trigger_type),
        arguments=tuple(
            Argument(role=r, nugget=Nugget(token_indices=tuple(idx), nugget_type=nt))
            for r, idx, nt in args
        ),
    )


def doc(doc_id, n_tokens, events):
    return Document(
        doc_id=doc_id,
        tokens=tuple(f"w{i}" for i in range(n_tokens)),
        events=tuple(events),
    )


def stats_corpus() -> list[Document]:
    return [
        doc("A", 40, [
            ev("e1", "PUR", [0, 1], [
                ("Aim", [3, 4, 5], "MOD"),
                ("Condition", [10], "LIM"),
            ]),
            ev("e2", "ITT", [20], [("Target", [22, 23], "TAK")]),
        ]),
        doc("B", 50, [
            ev("e1", "PRP", [5], [
                ("Proposer", [0], "OG"),
                ("Target", [8, 9], None),
            ]),
            ev("e2", "PUR", [8, 9], [("Aim", [12, 15], "MOD")]),
        ]),
        doc("C", 30, [
            ev("e1", "FAC", [7, 2], [
                ("Subject", [2], "APP"),
                ("Object", [11, 10], "STR"),
            ]),
        ]),
        doc("D", 60, []),
        doc("E", 20, [
            ev("e1", "FIN", [0], [("Content", [4], None)]),
            ev("e2", "FAC", [4], [("Subject", [6, 7], "APP")]),
            ev("e3", "FIN", [10], [
                ("Content", [4], None),
                ("Finder", [15], "OG"),
            ]),
        ]),
    ]
