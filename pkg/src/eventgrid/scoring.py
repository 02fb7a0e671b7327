"""Set-based precision/recall/F1 over five views of the event structure.

Items are tuples pooled over the corpus (micro-average); duplicates inside a
document collapse by set semantics. Span comparison is exact on the ordered
index sequence: [7, 2] and [2, 7] are different spans.

TI  trigger identification        (doc, trigger span)
TC  trigger classification        (doc, trigger span, event type)
AI  argument identification       (doc, trigger span, event type, argument span)
AC  argument classification       AI plus the role
EC  sub-event classification      (doc, main span, main type, sub span, role, sub type)

A metric where both sides are empty over the whole corpus is reported as NA
(None fields), not as a perfect score.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document, find_subevents
from .schema import Schema

METRICS = ("TI", "TC", "AI", "AC", "EC")


def extract_items(docs: list[Document], metric: str, schema: Schema) -> set[tuple]:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    items: set[tuple] = set()
    for doc in docs:
        if metric == "EC":
            by_id = {e.event_id: e for e in doc.events}
            for link in find_subevents(doc, schema):
                main, sub = by_id[link.main_event_id], by_id[link.sub_event_id]
                items.add((
                    doc.doc_id,
                    main.trigger.token_indices, main.event_type,
                    sub.trigger.token_indices, link.role, sub.event_type,
                ))
            continue
        for e in doc.events:
            span, etype = e.trigger.token_indices, e.event_type
            if metric == "TI":
                items.add((doc.doc_id, span))
            elif metric == "TC":
                items.add((doc.doc_id, span, etype))
            else:
                for a in e.arguments:
                    if metric == "AI":
                        items.add((doc.doc_id, span, etype, a.nugget.token_indices))
                    else:
                        items.add((doc.doc_id, span, etype, a.nugget.token_indices, a.role))
    return items


@dataclass(frozen=True)
class MetricScore:
    predicted: int
    gold: int
    matched: int
    precision: float | None
    recall: float | None
    f1: float | None

    @property
    def defined(self) -> bool:
        return self.precision is not None

    def to_json_obj(self) -> dict:
        return {
            "predicted": self.predicted,
            "gold": self.gold,
            "matched": self.matched,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def _score_sets(pred: set, gold: set) -> MetricScore:
    if not pred and not gold:
        return MetricScore(0, 0, 0, None, None, None)
    matched = len(pred & gold)
    p = matched / len(pred) if pred else 0.0
    r = matched / len(gold) if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return MetricScore(len(pred), len(gold), matched, p, r, f1)


@dataclass
class ScoreReport:
    scores: dict[str, MetricScore]

    def __getitem__(self, metric: str) -> MetricScore:
        return self.scores[metric]

    def to_json_obj(self) -> dict:
        return {m: s.to_json_obj() for m, s in self.scores.items()}

    def format_table(self, percent: bool = False) -> str:
        def fmt(v):
            if v is None:
                return "    NA"
            return f"{100 * v:6.2f}" if percent else f"{v:6.4f}"

        header = f"{'metric':<8}{'pred':>6}{'gold':>6}{'match':>6}  {'P':>6} {'R':>6} {'F1':>6}"
        lines = [header]
        for m, s in self.scores.items():
            lines.append(
                f"{m:<8}{s.predicted:>6}{s.gold:>6}{s.matched:>6}  "
                f"{fmt(s.precision)} {fmt(s.recall)} {fmt(s.f1)}"
            )
        return "\n".join(lines)


def _check_alignment(pred_docs, gold_docs) -> None:
    pred_ids = {d.doc_id for d in pred_docs}
    gold_ids = {d.doc_id for d in gold_docs}
    if pred_ids != gold_ids:
        missing = sorted(gold_ids - pred_ids)[:5]
        extra = sorted(pred_ids - gold_ids)[:5]
        raise ValueError(
            f"document ids differ between corpora (missing from predicted: {missing}, "
            f"unexpected in predicted: {extra})"
        )
    gold_len = {d.doc_id: len(d.tokens) for d in gold_docs}
    for d in pred_docs:
        if len(d.tokens) != gold_len[d.doc_id]:
            raise ValueError(
                f"{d.doc_id}: predicted has {len(d.tokens)} tokens, gold has "
                f"{gold_len[d.doc_id]}"
            )


def score(
    pred_docs: list[Document],
    gold_docs: list[Document],
    schema: Schema,
    metrics: tuple[str, ...] = METRICS,
) -> ScoreReport:
    """Score a predicted corpus against gold over aligned doc ids.

    Token lengths must agree per document; token text may differ (decoded
    documents carry placeholder tokens).
    """
    _check_alignment(pred_docs, gold_docs)
    return ScoreReport(scores={
        m: _score_sets(
            extract_items(pred_docs, m, schema),
            extract_items(gold_docs, m, schema),
        )
        for m in metrics
    })
