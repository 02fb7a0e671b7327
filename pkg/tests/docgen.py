"""Random schema-valid documents for property tests.

Generated documents exercise every structural form (single-token, contiguous,
discontinuous, reverse-order, overlapping nuggets, sub-events, shared spans)
while staying inside the regime where grid decoding is exact:

- distinct spans never share their head token, and a head token never occurs
  inside another span;
- two spans overlap in at most one token, each span has at most one overlap
  partner, and the shared token is never the multi-token partner's head;
- a span is the trigger of at most one event and carries at most one argument
  role across all its uses.

Violating any of these makes the grid ambiguous by construction, which the
codec handles with diagnostics but cannot round-trip.
"""

import random

from eventgrid.corpus import Argument, Document, Event, Nugget
from eventgrid.schema import Schema

SPAN_LENGTHS = (1, 1, 2, 2, 2, 2, 3, 3, 3, 4, 4, 5)


class _SpanFactory:
    def __init__(self, rng: random.Random, length: int):
        self.rng = rng
        self.free = set(range(length))
        self.partnered: set[tuple[int, ...]] = set()
        self.spans: list[tuple[int, ...]] = []

    def _take_contiguous(self, k: int) -> list[int] | None:
        starts = [s for s in self.free if all(s + d in self.free for d in range(k))]
        if not starts:
            return None
        s = self.rng.choice(sorted(starts))
        idx = [s + d for d in range(k)]
        self.free -= set(idx)
        return idx

    def _take_scattered(self, k: int) -> list[int] | None:
        if len(self.free) < k:
            return None
        idx = self.rng.sample(sorted(self.free), k)
        self.free -= set(idx)
        return idx

    def _order(self, idx: list[int]) -> list[int]:
        r = self.rng.random()
        if r < 0.72:
            idx.sort()
        elif r < 0.87:
            idx.sort(reverse=True)
        else:
            self.rng.shuffle(idx)
        return idx

    def new_span(self, allow_overlap: bool = True) -> tuple[int, ...] | None:
        rng = self.rng
        if allow_overlap and rng.random() < 0.22:
            span = self._overlap_span()
            if span is not None:
                return span
        k = rng.choice(SPAN_LENGTHS)
        idx = self._take_contiguous(k) if rng.random() < 0.55 else None
        if idx is None:
            idx = self._take_scattered(k)
        if idx is None:
            return None
        if len(idx) > 1:
            idx = self._order(idx)
        span = tuple(idx)
        self.spans.append(span)
        return span

    def _overlap_span(self) -> tuple[int, ...] | None:
        rng = self.rng
        bases = [s for s in self.spans if len(s) >= 2 and s not in self.partnered]
        if not bases:
            return None
        base = rng.choice(bases)
        shared = rng.choice(base[1:])  # never the partner's head
        if rng.random() < 0.5:
            span = (shared,)
        else:
            extra = self._take_scattered(rng.randint(1, 2))
            if extra is None:
                span = (shared,)
            else:
                idx = self._order(extra)
                idx.insert(rng.randint(1, len(idx)), shared)
                span = tuple(idx)
        self.partnered.add(base)
        self.partnered.add(span)
        self.spans.append(span)
        return span


def random_document(
    rng: random.Random,
    schema: Schema,
    *,
    doc_id: str = "doc",
    min_tokens: int = 10,
    max_tokens: int = 60,
    max_events: int = 6,
    n_events: int | None = None,
    max_args: int = 4,
) -> Document:
    length = rng.randint(min_tokens, max_tokens)
    factory = _SpanFactory(rng, length)
    if n_events is None:
        n_events = rng.randint(0, max_events)

    trigger_types: dict[tuple[int, ...], str] = {}
    arg_roles: dict[tuple[int, ...], str] = {}
    arg_fillers: dict[tuple[int, ...], str | None] = {}
    arg_mains: dict[tuple[int, ...], list[str]] = {}
    events: list[Event] = []

    def filler_ok(span, etype, role) -> bool:
        nt = arg_fillers.get(span)
        if nt is None:
            return True
        c = schema.constraint(etype, role)
        return c is not None and nt in c.fillers

    for i in range(n_events):
        etype = rng.choice(schema.event_types)
        trigger = None
        # occasionally promote an existing argument span: its event becomes a
        # sub-event of whatever already uses the span
        promotable = [s for s in arg_roles if s not in trigger_types]
        if promotable and rng.random() < 0.2:
            span = rng.choice(promotable)
            compatible = set()
            for main_type in arg_mains[span]:
                c = schema.constraint(main_type, arg_roles[span])
                compatible.update(c.subevent_types)
            if compatible and rng.random() < 0.7:
                etype = rng.choice(sorted(compatible))
            trigger = span
        if trigger is None:
            trigger = factory.new_span()
            if trigger is None:
                break
            if trigger in trigger_types or trigger in arg_roles:
                # overlap variant may reuse a singleton span already in play
                continue
        trigger_types[trigger] = etype

        roles = schema.roles_for(etype)
        args: list[Argument] = []
        used: set[tuple[str, tuple[int, ...]]] = set()
        for _ in range(rng.randint(0, max_args)):
            pick = rng.random()
            span = role = None
            if pick < 0.25:
                # attach an existing trigger as a sub-event argument
                cands = [s for s in trigger_types if s != trigger]
                if cands:
                    s = rng.choice(cands)
                    if s in arg_roles:
                        r = arg_roles[s]
                        if schema.valid(etype, r) and filler_ok(s, etype, r):
                            span, role = s, r
                    else:
                        link_roles = [
                            r for r in roles
                            if trigger_types[s] in schema.constraint(etype, r).subevent_types
                        ]
                        if link_roles and rng.random() < 0.8:
                            span, role = s, rng.choice(link_roles)
                        else:
                            span, role = s, rng.choice(roles)
            elif pick < 0.4:
                # reuse an existing argument span under its fixed role
                cands = [
                    s for s, r in arg_roles.items()
                    if s != trigger and s not in trigger_types
                    and schema.valid(etype, r) and filler_ok(s, etype, r)
                ]
                if cands:
                    span = rng.choice(cands)
                    role = arg_roles[span]
            if span is None:
                span = factory.new_span()
                if span is None:
                    continue
                if span == trigger or span in trigger_types:
                    continue
                if span in arg_roles:
                    r = arg_roles[span]
                    if not (schema.valid(etype, r) and filler_ok(span, etype, r)):
                        continue
                    role = r
                else:
                    role = rng.choice(roles)
            if (role, span) in used:
                continue
            used.add((role, span))
            if span not in arg_roles:
                arg_roles[span] = role
                c = schema.constraint(etype, role)
                nt = None
                if c.fillers and span not in trigger_types and rng.random() < 0.6:
                    nt = rng.choice(c.fillers)
                arg_fillers[span] = nt
            arg_mains.setdefault(span, []).append(etype)
            args.append(Argument(
                role=role,
                nugget=Nugget(token_indices=span, nugget_type=arg_fillers.get(span)),
            ))
        events.append(Event(
            event_id=f"ev{i}",
            event_type=etype,
            trigger=Nugget(token_indices=trigger),
            arguments=tuple(args),
        ))

    return Document(
        doc_id=doc_id,
        tokens=tuple(f"t{j}" for j in range(length)),
        events=tuple(events),
    )


def random_corpus(rng: random.Random, schema: Schema, n_docs: int, **kwargs) -> list[Document]:
    return [
        random_document(rng, schema, doc_id=f"doc{i:04d}", **kwargs)
        for i in range(n_docs)
    ]
