"""Token-pair relation grid codec for event annotations.

A document of length l maps to a sparse l x l grid of labeled cells:

- "HTL" at (a, b): a and b are successive tokens of one span, in annotation
  order. Spans have distinct indices, so HTL never sits on the diagonal.
- "ET:<type>" at (tail, head): the span read from head to tail is an event
  trigger of that type. Single-token spans put this on the diagonal.
- "AT:<role>" at (tail, head): the span is an argument with that role.
- "EAL" at (trigger head, argument head): attachment between an event and one
  of its arguments. Sub-events are arguments whose span is the sub trigger,
  so their cell carries both an "ET:" and an "AT:" label.

Lexical nugget types are not represented; decoding returns untyped spans.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Argument, Document, Event, Nugget, SubEventLink, subevent_links
from .schema import Schema

HTL = "HTL"
EAL = "EAL"
ET_PREFIX = "ET:"
AT_PREFIX = "AT:"

Cell = tuple[int, int, str]


def event_label(event_type: str) -> str:
    return ET_PREFIX + event_type


def role_label(role: str) -> str:
    return AT_PREFIX + role


@dataclass(frozen=True)
class RelationGrid:
    doc_id: str
    length: int
    cells: frozenset[Cell]

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.cells)

    def labels_at(self, row: int, col: int) -> set[str]:
        return {lbl for r, c, lbl in self.cells if r == row and c == col}

    def to_json_obj(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "length": self.length,
            "cells": [[r, c, lbl] for r, c, lbl in self.sorted_cells()],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "RelationGrid":
        if not isinstance(obj, dict):
            raise ValueError("grid record must be a JSON object")
        unknown = set(obj) - {"doc_id", "length", "cells"}
        if unknown:
            raise ValueError(f"grid record has unknown keys: {sorted(unknown)}")
        try:
            doc_id, length, cells = obj["doc_id"], obj["length"], obj["cells"]
        except KeyError as exc:
            raise ValueError(f"grid record missing key {exc}") from None
        if not isinstance(doc_id, str):
            raise ValueError("doc_id must be a string")
        if not isinstance(length, int) or isinstance(length, bool) or length < 0:
            raise ValueError("length must be a non-negative integer")
        parsed = set()
        for cell in cells:
            if not (isinstance(cell, list) and len(cell) == 3):
                raise ValueError(f"cell must be [row, col, label]: {cell!r}")
            r, c, lbl = cell
            ints = all(isinstance(v, int) and not isinstance(v, bool) for v in (r, c))
            if not ints or not isinstance(lbl, str) or not lbl:
                raise ValueError(f"cell must be [int, int, non-empty str]: {cell!r}")
            if not (0 <= r < length and 0 <= c < length):
                raise ValueError(f"cell {cell!r} out of range for length {length}")
            parsed.add((r, c, lbl))
        return cls(doc_id=doc_id, length=length, cells=frozenset(parsed))


@dataclass(frozen=True)
class GridDiff:
    only_in_a: tuple[Cell, ...]
    only_in_b: tuple[Cell, ...]
    length_a: int
    length_b: int

    @property
    def identical(self) -> bool:
        return not self.only_in_a and not self.only_in_b and self.length_a == self.length_b


def grid_diff(a: RelationGrid, b: RelationGrid) -> GridDiff:
    return GridDiff(
        only_in_a=tuple(sorted(a.cells - b.cells)),
        only_in_b=tuple(sorted(b.cells - a.cells)),
        length_a=a.length,
        length_b=b.length,
    )


def encode(doc: Document, schema: Schema | None = None) -> RelationGrid:
    """Write a document's events into grid cells.

    Identical spans are encoded once; their labels accumulate on the shared
    (tail, head) cell. With a schema given, unknown event types or roles
    raise ValueError up front instead of producing an undecodable grid.
    """
    length = len(doc.tokens)
    cells: set[Cell] = set()
    span_labels: dict[tuple[int, ...], set[str]] = {}

    def add_span(nugget: Nugget, label: str) -> None:
        idx = nugget.token_indices
        if any(i >= length for i in idx):
            raise ValueError(f"span {idx} out of range for {length} tokens")
        span_labels.setdefault(idx, set()).add(label)

    for e in doc.events:
        if schema is not None and e.event_type not in schema.event_types:
            raise ValueError(f"unknown event type: {e.event_type!r}")
        add_span(e.trigger, event_label(e.event_type))
        for arg in e.arguments:
            if schema is not None and arg.role not in schema.argument_roles:
                raise ValueError(f"unknown role: {arg.role!r}")
            add_span(arg.nugget, role_label(arg.role))
            cells.add((e.trigger.head, arg.nugget.head, EAL))

    for idx, labels in span_labels.items():
        for a, b in zip(idx, idx[1:]):
            cells.add((a, b, HTL))
        for lbl in labels:
            cells.add((idx[-1], idx[0], lbl))

    return RelationGrid(doc_id=doc.doc_id, length=length, cells=frozenset(cells))


@dataclass(frozen=True)
class DecodeConfig:
    """Bounds for decoding adversarial or model-made grids.

    Per head, mention enumeration stops after max_paths_per_head recovered
    mentions or after max_paths_per_head * max_nugget_length DFS expansions,
    whichever comes first; paths are never extended past max_nugget_length
    tokens. Events stop accepting arguments at max_arguments_per_event, so a
    near-dense grid decodes in polynomial time and bounded memory instead of
    multiplying every role mention into every compatible event.
    """
    max_nugget_length: int = 30
    max_paths_per_head: int = 16
    max_arguments_per_event: int = 64


@dataclass
class DecodeDiagnostics:
    unknown_labels: int = 0
    diagonal_htl_ignored: int = 0
    paths_truncated_at_length: int = 0
    heads_truncated: int = 0
    multi_mention_heads: int = 0
    arguments_dropped: int = 0
    arguments_capped: int = 0
    subevent_roles_inferred: int = 0
    subevent_roles_ambiguous: int = 0

    def to_json_obj(self) -> dict:
        return {
            "unknown_labels": self.unknown_labels,
            "diagonal_htl_ignored": self.diagonal_htl_ignored,
            "paths_truncated_at_length": self.paths_truncated_at_length,
            "heads_truncated": self.heads_truncated,
            "multi_mention_heads": self.multi_mention_heads,
            "arguments_dropped": self.arguments_dropped,
            "arguments_capped": self.arguments_capped,
            "subevent_roles_inferred": self.subevent_roles_inferred,
            "subevent_roles_ambiguous": self.subevent_roles_ambiguous,
        }


@dataclass
class DecodeResult:
    doc_id: str
    length: int
    events: list[Event]
    subevent_links: list[SubEventLink]
    diagnostics: DecodeDiagnostics

    def to_document(self, tokens: list[str] | None = None) -> Document:
        """Build a Document, with placeholder tokens unless real ones are given."""
        if tokens is None:
            tokens = [f"w{i}" for i in range(self.length)]
        elif len(tokens) != self.length:
            raise ValueError(
                f"{self.doc_id}: got {len(tokens)} tokens for grid of length {self.length}"
            )
        return Document(doc_id=self.doc_id, tokens=tuple(tokens), events=tuple(self.events))


def _enumerate_mentions(head, tails, forward, config, diag):
    """All simple HTL paths from head ending at a closure tail, bounded."""
    kept: list[tuple[int, ...]] = []
    budget = config.max_paths_per_head * config.max_nugget_length
    steps = 0
    stack: list[tuple[int, tuple[int, ...]]] = [(head, (head,))]
    while stack:
        node, path = stack.pop()
        steps += 1
        if steps > budget:
            diag.heads_truncated += 1
            break
        if node in tails:
            if len(kept) >= config.max_paths_per_head:
                diag.heads_truncated += 1
                break
            kept.append(path)
        if len(path) >= config.max_nugget_length:
            if forward.get(node):
                diag.paths_truncated_at_length += 1
            continue
        for nxt in reversed(forward.get(node, ())):
            if nxt not in path:
                stack.append((nxt, path + (nxt,)))
    return kept


def decode(grid: RelationGrid, schema: Schema, config: DecodeConfig = DecodeConfig()) -> DecodeResult:
    """Read events back out of a grid.

    Tolerates arbitrary cell sets: unlabeled structure is skipped and counted
    in diagnostics rather than raised. Two pruning rules shape the output:
    a head-to-tail path only becomes a mention if its (tail, head) cell holds
    a type or role label, and role mentions with no compatible attachment are
    dropped. Sub-event attachments missing their role label get the first
    schema-order role compatible with the two event types.
    """
    diag = DecodeDiagnostics()
    forward: dict[int, list[int]] = {}
    closure_labels: dict[tuple[int, int], set[str]] = {}
    links: set[tuple[int, int]] = set()

    for r, c, lbl in grid.sorted_cells():
        if lbl == HTL:
            if r == c:
                diag.diagonal_htl_ignored += 1
            else:
                forward.setdefault(r, []).append(c)
        elif lbl == EAL:
            links.add((r, c))
        elif lbl.startswith(ET_PREFIX) and lbl[len(ET_PREFIX):] in schema.event_types:
            closure_labels.setdefault((r, c), set()).add(lbl)
        elif lbl.startswith(AT_PREFIX) and lbl[len(AT_PREFIX):] in schema.argument_roles:
            closure_labels.setdefault((r, c), set()).add(lbl)
        else:
            diag.unknown_labels += 1

    tails_by_head: dict[int, set[int]] = {}
    for (t, h) in closure_labels:
        tails_by_head.setdefault(h, set()).add(t)

    # Step 1: span recovery
    mentions: list[tuple[int, ...]] = []
    for head in sorted(tails_by_head):
        kept = _enumerate_mentions(head, tails_by_head[head], forward, config, diag)
        if len(kept) > 1:
            diag.multi_mention_heads += 1
        mentions.extend(kept)

    # Step 2: attach labels to recovered spans
    trigger_mentions: list[tuple[tuple[int, ...], str]] = []
    role_mentions: list[tuple[tuple[int, ...], str]] = []
    span_roles: dict[tuple[int, ...], set[str]] = {}
    for span in mentions:
        for lbl in sorted(closure_labels[(span[-1], span[0])]):
            if lbl.startswith(ET_PREFIX):
                trigger_mentions.append((span, lbl[len(ET_PREFIX):]))
            else:
                role_mentions.append((span, lbl[len(AT_PREFIX):]))
                span_roles.setdefault(span, set()).add(lbl[len(AT_PREFIX):])

    # Step 3: events, then argument attachment via EAL cells
    events: dict[tuple[str, tuple[int, ...]], set[tuple[str, tuple[int, ...]]]] = {}
    triggers_by_head: dict[int, list[tuple[tuple[int, ...], str]]] = {}
    for span, et in trigger_mentions:
        events.setdefault((et, span), set())
        triggers_by_head.setdefault(span[0], []).append((span, et))

    links_by_arg_head: dict[int, set[int]] = {}
    for i, j in links:
        links_by_arg_head.setdefault(j, set()).add(i)

    # arg sets compatible with a (head, role) pair; cached because dense
    # grids repeat the same pair across many role mentions
    arg_cap = config.max_arguments_per_event
    compat: dict[tuple[int, str], list[set]] = {}

    def compatible_arg_sets(arg_head: int, role: str) -> list[set]:
        cached = compat.get((arg_head, role))
        if cached is None:
            cached = [
                events[(et, t_span)]
                for trig_head in sorted(links_by_arg_head.get(arg_head, ()))
                for t_span, et in triggers_by_head.get(trig_head, ())
                if schema.valid(et, role)
            ]
            compat[(arg_head, role)] = cached
        return cached

    for span, role in role_mentions:
        attached = False
        for arg_set in compatible_arg_sets(span[0], role):
            attached = True
            if len(arg_set) < arg_cap:
                arg_set.add((role, span))
            elif (role, span) not in arg_set:
                diag.arguments_capped += 1
        if not attached:
            diag.arguments_dropped += 1

    # Sub-event attachments whose role label is missing from the grid
    for i, j in sorted(links):
        subs = [(s, et) for s, et in triggers_by_head.get(j, ()) if not span_roles.get(s)]
        for sub_span, sub_et in subs:
            for main_span, main_et in triggers_by_head.get(i, ()):
                if (main_et, main_span) == (sub_et, sub_span):
                    continue
                roles = schema.roles_for_subevent(main_et, sub_et)
                if not roles:
                    continue
                if len(roles) > 1:
                    diag.subevent_roles_ambiguous += 1
                arg_set = events[(main_et, main_span)]
                if len(arg_set) < arg_cap:
                    arg_set.add((roles[0], sub_span))
                    diag.subevent_roles_inferred += 1
                elif (roles[0], sub_span) not in arg_set:
                    diag.arguments_capped += 1

    out_events: list[Event] = []
    for n, (et, t_span) in enumerate(sorted(events, key=lambda k: (k[1], k[0]))):
        args = tuple(
            Argument(role=r, nugget=Nugget(token_indices=s))
            for r, s in sorted(events[(et, t_span)])
        )
        out_events.append(Event(
            event_id=f"e{n:03d}",
            event_type=et,
            trigger=Nugget(token_indices=t_span),
            arguments=args,
        ))

    out_links = subevent_links(out_events, schema)
    return DecodeResult(
        doc_id=grid.doc_id,
        length=grid.length,
        events=out_events,
        subevent_links=out_links,
        diagnostics=diag,
    )
