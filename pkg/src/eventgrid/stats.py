"""Corpus-level annotation statistics.

Density rates are per 100 tokens. The complexity percentages run over the
pooled nugget population: spans deduplicated by index sequence inside each
document, then summed across documents. The sub-event percentage instead uses
events as its denominator (an event counts once however many parents it has).
Undefined ratios (empty denominator) are None, rendered as NA.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import (
    DISCONTINUOUS,
    REVERSE_ORDER,
    Document,
    Nugget,
    classify_nugget,
    find_overlaps,
    find_subevents,
    nugget_population,
)
from .schema import Schema


def _rate(num: int, denom: int) -> float | None:
    return 100.0 * num / denom if denom else None


@dataclass(frozen=True)
class DensityStats:
    documents: int
    tokens: int
    events: int
    arguments: int
    covered_positions: int
    events_per_100_tokens: float | None
    arguments_per_100_tokens: float | None
    coverage_per_100_tokens: float | None

    def to_json_obj(self) -> dict:
        return {
            "documents": self.documents,
            "tokens": self.tokens,
            "events": self.events,
            "arguments": self.arguments,
            "covered_positions": self.covered_positions,
            "events_per_100_tokens": self.events_per_100_tokens,
            "arguments_per_100_tokens": self.arguments_per_100_tokens,
            "coverage_per_100_tokens": self.coverage_per_100_tokens,
        }


def density(docs: list[Document]) -> DensityStats:
    tokens = sum(len(d.tokens) for d in docs)
    events = sum(len(d.events) for d in docs)
    arguments = sum(len(e.arguments) for d in docs for e in d.events)
    covered = 0
    for d in docs:
        positions: set[int] = set()
        for span in nugget_population(d):
            positions.update(span)
        covered += len(positions)
    return DensityStats(
        documents=len(docs),
        tokens=tokens,
        events=events,
        arguments=arguments,
        covered_positions=covered,
        events_per_100_tokens=_rate(events, tokens),
        arguments_per_100_tokens=_rate(arguments, tokens),
        coverage_per_100_tokens=_rate(covered, tokens),
    )


@dataclass(frozen=True)
class ComplexityStats:
    nuggets: int
    events: int
    pct_discontinuous: float | None
    pct_overlapping: float | None
    pct_reverse_order: float | None
    pct_subevent: float | None

    def to_json_obj(self) -> dict:
        return {
            "nuggets": self.nuggets,
            "events": self.events,
            "pct_discontinuous": self.pct_discontinuous,
            "pct_overlapping": self.pct_overlapping,
            "pct_reverse_order": self.pct_reverse_order,
            "pct_subevent": self.pct_subevent,
        }


def complexity(docs: list[Document], schema: Schema) -> ComplexityStats:
    nuggets = discontinuous = overlapping = reverse = 0
    events = 0
    subevents = 0
    for d in docs:
        population = nugget_population(d)
        nuggets += len(population)
        for span in population:
            flags = classify_nugget(Nugget(token_indices=span))
            discontinuous += DISCONTINUOUS in flags
            reverse += REVERSE_ORDER in flags
        in_overlap = {s for pair in find_overlaps(d) for s in pair}
        overlapping += len(in_overlap)
        events += len(d.events)
        subevents += len({l.sub_event_id for l in find_subevents(d, schema)})
    return ComplexityStats(
        nuggets=nuggets,
        events=events,
        pct_discontinuous=_rate(discontinuous, nuggets),
        pct_overlapping=_rate(overlapping, nuggets),
        pct_reverse_order=_rate(reverse, nuggets),
        pct_subevent=_rate(subevents, events),
    )


@dataclass(frozen=True)
class TypeDistribution:
    event_types: dict[str, int]
    argument_roles: dict[str, int]
    nugget_types: dict[str, int]
    length_event_table: list[dict]

    def to_json_obj(self) -> dict:
        def with_pct(counts: dict[str, int]) -> dict:
            total = sum(counts.values())
            return {
                label: {"count": n, "pct": _rate(n, total)}
                for label, n in counts.items()
            }

        return {
            "event_types": with_pct(self.event_types),
            "argument_roles": with_pct(self.argument_roles),
            "nugget_types": with_pct(self.nugget_types),
            "length_event_table": self.length_event_table,
        }


def type_distribution(
    docs: list[Document],
    schema: Schema,
    length_bucket: int = 50,
) -> TypeDistribution:
    """Label usage counts plus a document-length vs event-count table.

    Labels appear in schema order with zero counts included, followed by any
    out-of-schema labels found in the corpus. Nugget types count annotations
    actually present (triggers and arguments may omit them).
    """
    etypes = dict.fromkeys(schema.event_types, 0)
    roles = dict.fromkeys(schema.argument_roles, 0)
    ntypes = dict.fromkeys(schema.nugget_types, 0)
    buckets: dict[int, list[int]] = {}
    for d in docs:
        b = len(d.tokens) // length_bucket
        stats = buckets.setdefault(b, [0, 0])
        stats[0] += 1
        stats[1] += len(d.events)
        for e in d.events:
            etypes[e.event_type] = etypes.get(e.event_type, 0) + 1
            if e.trigger.nugget_type is not None:
                ntypes[e.trigger.nugget_type] = ntypes.get(e.trigger.nugget_type, 0) + 1
            for a in e.arguments:
                roles[a.role] = roles.get(a.role, 0) + 1
                nt = a.nugget.nugget_type
                if nt is not None:
                    ntypes[nt] = ntypes.get(nt, 0) + 1
    table = [
        {
            "min_tokens": b * length_bucket,
            "max_tokens": (b + 1) * length_bucket - 1,
            "documents": buckets[b][0],
            "events": buckets[b][1],
        }
        for b in sorted(buckets)
    ]
    return TypeDistribution(
        event_types=etypes,
        argument_roles=roles,
        nugget_types=ntypes,
        length_event_table=table,
    )
