"""Error taxonomy and confusion matrices for predicted vs gold corpora.

The identification breakdown is gold-centric: every gold item lands in exactly
one of {exact, missed, predicted_long, predicted_short, other_overlap}. A
prediction-centric view (spurious predictions) is deliberately out of scope;
precision already prices those in.

Span relations are computed on token sets. A prediction whose set strictly
contains the gold set is "long", one strictly contained is "short"; disjoint
sets mean "missed". When several predictions overlap a gold span, the one
with the largest intersection decides the class, and a tie between distinct
candidate sets falls back to other_overlap.

For argument items the candidate predictions default to those attached to the
same trigger context (trigger span plus event type) when that context exists
on the prediction side; otherwise, and always under arg_context="any", every
predicted argument span in the document competes. Role mistakes never show up
here: they belong to the argument_role confusion matrix.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from .corpus import Document
from .schema import Schema
from .scoring import _check_alignment, extract_items

ERROR_CLASSES = ("missed", "predicted_long", "predicted_short", "other_overlap")


@dataclass(frozen=True)
class ErrorBreakdown:
    metric: str
    gold_items: int
    exact: int
    missed: int
    predicted_long: int
    predicted_short: int
    other_overlap: int

    @property
    def errors(self) -> int:
        return self.gold_items - self.exact

    def percentages(self) -> dict[str, float | None]:
        """Share of each class among gold items lacking an exact match."""
        n = self.errors
        return {
            cls: (100.0 * getattr(self, cls) / n if n else None)
            for cls in ERROR_CLASSES
        }

    def to_json_obj(self) -> dict:
        return {
            "metric": self.metric,
            "gold_items": self.gold_items,
            "exact": self.exact,
            "counts": {cls: getattr(self, cls) for cls in ERROR_CLASSES},
            "percentages": self.percentages(),
        }


def _classify(gold_span: tuple, pool: set[frozenset]) -> str:
    gset = set(gold_span)
    overlapping = {c: len(gset & c) for c in pool if gset & c}
    if not overlapping:
        return "missed"
    best = max(overlapping.values())
    top = [c for c, n in overlapping.items() if n == best]
    if len(top) > 1:
        return "other_overlap"
    if gset < top[0]:
        return "predicted_long"
    if top[0] < gset:
        return "predicted_short"
    return "other_overlap"


def identification_errors(
    pred: list[Document],
    gold: list[Document],
    schema: Schema,
    metric: str = "TI",
    arg_context: str = "matched",
) -> ErrorBreakdown:
    if metric not in ("TI", "AI"):
        raise ValueError(f"metric must be 'TI' or 'AI', got {metric!r}")
    if arg_context not in ("matched", "any"):
        raise ValueError(f"arg_context must be 'matched' or 'any', got {arg_context!r}")
    _check_alignment(pred, gold)
    pred_items = extract_items(pred, metric, schema)
    gold_items = extract_items(gold, metric, schema)

    spans_by_doc: dict[str, set[frozenset]] = {}
    args_by_context: dict[tuple, set[frozenset]] = {}
    contexts: set[tuple] = set()
    if metric == "TI":
        for doc_id, span in pred_items:
            spans_by_doc.setdefault(doc_id, set()).add(frozenset(span))
    else:
        # contexts come from events, so a matched trigger with no predicted
        # arguments yields an empty pool (missed), not the any-span fallback
        for d in pred:
            for e in d.events:
                contexts.add((d.doc_id, e.trigger.token_indices, e.event_type))
        for doc_id, trig, etype, aspan in pred_items:
            fs = frozenset(aspan)
            args_by_context.setdefault((doc_id, trig, etype), set()).add(fs)
            spans_by_doc.setdefault(doc_id, set()).add(fs)

    tally = Counter()
    exact = 0
    for item in gold_items:
        if item in pred_items:
            exact += 1
            continue
        if metric == "TI":
            pool = spans_by_doc.get(item[0], set())
        else:
            doc_id, trig, etype, span = item
            ctx = (doc_id, trig, etype)
            if arg_context == "matched" and ctx in contexts:
                pool = args_by_context.get(ctx, set())
            else:
                pool = spans_by_doc.get(doc_id, set())
        tally[_classify(item[-1], pool)] += 1

    return ErrorBreakdown(
        metric=metric,
        gold_items=len(gold_items),
        exact=exact,
        missed=tally["missed"],
        predicted_long=tally["predicted_long"],
        predicted_short=tally["predicted_short"],
        other_overlap=tally["other_overlap"],
    )


@dataclass(frozen=True)
class ConfusionMatrix:
    """Misclassification counts; correct labels are excluded by construction.

    Axis labels keep schema order and list only labels involved in at least
    one confusion, so a perfect system yields an empty matrix.
    """

    level: str
    gold_labels: tuple[str, ...]
    pred_labels: tuple[str, ...]
    counts: dict[tuple[str, str], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_json_obj(self) -> dict:
        return {
            "level": self.level,
            "cells": [
                {"gold": g, "predicted": p, "count": self.counts[(g, p)]}
                for g in self.gold_labels
                for p in self.pred_labels
                if (g, p) in self.counts
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gold\\predicted", *self.pred_labels])
        for g in self.gold_labels:
            writer.writerow([g, *(self.counts.get((g, p), 0) for p in self.pred_labels)])
        return buf.getvalue()


def confusion(
    pred: list[Document],
    gold: list[Document],
    schema: Schema,
    level: str = "event_type",
) -> ConfusionMatrix:
    """Count label mistakes between otherwise identical items.

    event_type compares event types of triggers with the same span;
    argument_role compares roles of arguments sharing trigger context and
    span. With several labels on one side, each unmatched gold label pairs
    with each unmatched predicted label.
    """
    if level == "event_type":
        items_metric, order = "TC", schema.event_types
    elif level == "argument_role":
        items_metric, order = "AC", schema.argument_roles
    else:
        raise ValueError(f"level must be 'event_type' or 'argument_role', got {level!r}")
    _check_alignment(pred, gold)

    gold_by_ctx: dict[tuple, set[str]] = {}
    pred_by_ctx: dict[tuple, set[str]] = {}
    for it in extract_items(gold, items_metric, schema):
        gold_by_ctx.setdefault(it[:-1], set()).add(it[-1])
    for it in extract_items(pred, items_metric, schema):
        pred_by_ctx.setdefault(it[:-1], set()).add(it[-1])

    counts: Counter = Counter()
    for ctx, gl in gold_by_ctx.items():
        pl = pred_by_ctx.get(ctx)
        if not pl:
            continue
        for g in gl - pl:
            for p in pl - gl:
                counts[(g, p)] += 1

    rank = {label: i for i, label in enumerate(order)}

    def key(label: str) -> tuple:
        return rank.get(label, len(rank)), label

    return ConfusionMatrix(
        level=level,
        gold_labels=tuple(sorted({g for g, _ in counts}, key=key)),
        pred_labels=tuple(sorted({p for _, p in counts}, key=key)),
        counts=dict(counts),
    )
