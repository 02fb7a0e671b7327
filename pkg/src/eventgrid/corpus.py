"""Document data model: tokens, event annotations, and structural checks.

Spans are "nuggets": ordered lists of distinct token indices. The order is the
annotation's reading order, so a nugget may be discontinuous ([3, 4, 9, 10])
or reverse-order ([7, 2]); [7, 2] and [2, 7] are different nuggets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .schema import Schema

# structural-form flags returned by classify_nugget
DISCONTINUOUS = "discontinuous"
REVERSE_ORDER = "reverse_order"
SINGLE_TOKEN = "single_token"


@dataclass(frozen=True)
class Nugget:
    token_indices: tuple[int, ...]
    nugget_type: str | None = None

    def __post_init__(self):
        idx = tuple(self.token_indices)
        object.__setattr__(self, "token_indices", idx)
        if not idx:
            raise ValueError("nugget needs at least one token index")
        if not all(isinstance(i, int) and not isinstance(i, bool) and i >= 0 for i in idx):
            raise ValueError(f"token indices must be non-negative integers: {idx}")
        if len(set(idx)) != len(idx):
            raise ValueError(f"token indices must be distinct: {idx}")

    @property
    def head(self) -> int:
        """First index in annotation order."""
        return self.token_indices[0]

    @property
    def tail(self) -> int:
        """Last index in annotation order."""
        return self.token_indices[-1]


@dataclass(frozen=True)
class Argument:
    role: str
    nugget: Nugget


@dataclass(frozen=True)
class Event:
    event_id: str
    event_type: str
    trigger: Nugget
    arguments: tuple[Argument, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arguments", tuple(self.arguments))

    def key(self) -> tuple:
        """Identity for set comparisons: type, trigger span, argument set."""
        return (
            self.event_type,
            self.trigger.token_indices,
            frozenset((a.role, a.nugget.token_indices) for a in self.arguments),
        )


@dataclass(frozen=True)
class Document:
    doc_id: str
    tokens: tuple[str, ...]
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.tokens)

    def event_set(self) -> frozenset:
        return frozenset(e.key() for e in self.events)


@dataclass(frozen=True)
class SubEventLink:
    main_event_id: str
    sub_event_id: str
    role: str


def classify_nugget(nugget: Nugget) -> frozenset[str]:
    """Structural-form flags of a span; empty for plain contiguous spans.

    discontinuous: sorted indices leave gaps. reverse_order: annotation order
    is not strictly increasing. single_token: exactly one index.
    """
    idx = nugget.token_indices
    flags = set()
    if len(idx) == 1:
        flags.add(SINGLE_TOKEN)
        return frozenset(flags)
    if max(idx) - min(idx) + 1 != len(idx):
        flags.add(DISCONTINUOUS)
    if any(a >= b for a, b in zip(idx, idx[1:])):
        flags.add(REVERSE_ORDER)
    return frozenset(flags)


def nugget_population(doc: Document) -> list[tuple[int, ...]]:
    """Deduplicated spans of a document (triggers and arguments pooled).

    Two annotations with identical index sequences are one population member,
    even if their nugget types differ. Sorted for deterministic output.
    """
    spans = {e.trigger.token_indices for e in doc.events}
    spans.update(a.nugget.token_indices for e in doc.events for a in e.arguments)
    return sorted(spans)


def find_overlaps(doc: Document) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs of distinct population spans sharing at least one token index."""
    spans = nugget_population(doc)
    by_token: dict[int, list[int]] = {}
    for si, span in enumerate(spans):
        for t in span:
            by_token.setdefault(t, []).append(si)
    pairs = set()
    for members in by_token.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                pairs.add((spans[a], spans[b]))
    return sorted(pairs)


def subevent_links(events: tuple[Event, ...] | list[Event], schema: Schema) -> list[SubEventLink]:
    """Sub-event links: an argument whose span equals another event's trigger.

    A link (main, sub, role) is emitted when main has an argument with role
    `role` whose index sequence equals sub's trigger index sequence and the
    role admits sub's event type as a sub-event. Equality is exact, order
    included. One argument can link several events (same trigger span), and
    several arguments of one main can link the same sub under different roles.
    """
    by_trigger: dict[tuple[int, ...], list[Event]] = {}
    for e in events:
        by_trigger.setdefault(e.trigger.token_indices, []).append(e)
    links: list[SubEventLink] = []
    seen = set()
    for main in events:
        for arg in main.arguments:
            for sub in by_trigger.get(arg.nugget.token_indices, ()):
                if sub.event_id == main.event_id:
                    continue
                c = schema.constraint(main.event_type, arg.role)
                if c is None or sub.event_type not in c.subevent_types:
                    continue
                key = (main.event_id, sub.event_id, arg.role)
                if key not in seen:
                    seen.add(key)
                    links.append(SubEventLink(*key))
    return links


def find_subevents(doc: Document, schema: Schema) -> list[SubEventLink]:
    """Sub-event links of one document; see subevent_links."""
    return subevent_links(doc.events, schema)


@dataclass(frozen=True)
class ValidationIssue:
    doc_id: str
    severity: str  # "error" | "warning"
    code: str
    message: str

    def to_json_obj(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json_obj(self) -> dict:
        return {
            "ok": self.ok,
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "issues": [i.to_json_obj() for i in self.issues],
        }


def _check_nugget_labels(report, doc, schema, nugget, where):
    if nugget.nugget_type is not None and nugget.nugget_type not in schema.nugget_types:
        report.issues.append(ValidationIssue(
            doc.doc_id, "error", "unknown_nugget_type",
            f"{where}: unknown nugget type {nugget.nugget_type!r}",
        ))


def _check_range(report, doc, nugget, where):
    bad = [i for i in nugget.token_indices if i >= len(doc.tokens)]
    if bad:
        report.issues.append(ValidationIssue(
            doc.doc_id, "error", "index_out_of_range",
            f"{where}: indices {bad} out of range for {len(doc.tokens)} tokens",
        ))


def validate_corpus(docs: list[Document], schema: Schema) -> ValidationReport:
    """Check documents against a schema; never raises on annotation content.

    Errors: out-of-range indices, unknown labels, roles not defined for the
    event type, nugget-type fillers outside the role's allowed set, duplicate
    event ids, duplicate doc ids. Warning: two events in one document sharing
    (event type, trigger span), which downstream set semantics will merge.
    """
    report = ValidationReport()
    seen_docs = set()
    for doc in docs:
        if doc.doc_id in seen_docs:
            report.issues.append(ValidationIssue(
                doc.doc_id, "error", "duplicate_doc_id",
                f"doc id {doc.doc_id!r} appears more than once",
            ))
        seen_docs.add(doc.doc_id)
        seen_events = set()
        seen_type_trigger = set()
        for e in doc.events:
            where = f"event {e.event_id}"
            if e.event_id in seen_events:
                report.issues.append(ValidationIssue(
                    doc.doc_id, "error", "duplicate_event_id",
                    f"{where}: id appears more than once",
                ))
            seen_events.add(e.event_id)
            if e.event_type not in schema.event_types:
                report.issues.append(ValidationIssue(
                    doc.doc_id, "error", "unknown_event_type",
                    f"{where}: unknown event type {e.event_type!r}",
                ))
                continue
            tt = (e.event_type, e.trigger.token_indices)
            if tt in seen_type_trigger:
                report.issues.append(ValidationIssue(
                    doc.doc_id, "warning", "duplicate_type_trigger",
                    f"{where}: repeats (type, trigger span) {tt}; "
                    "set semantics merge such events",
                ))
            seen_type_trigger.add(tt)
            _check_range(report, doc, e.trigger, f"{where} trigger")
            _check_nugget_labels(report, doc, schema, e.trigger, f"{where} trigger")
            for k, arg in enumerate(e.arguments):
                aw = f"{where} argument {k} ({arg.role})"
                _check_range(report, doc, arg.nugget, aw)
                _check_nugget_labels(report, doc, schema, arg.nugget, aw)
                if arg.role not in schema.argument_roles:
                    report.issues.append(ValidationIssue(
                        doc.doc_id, "error", "unknown_role",
                        f"{aw}: unknown role {arg.role!r}",
                    ))
                    continue
                if not schema.valid(e.event_type, arg.role):
                    report.issues.append(ValidationIssue(
                        doc.doc_id, "error", "invalid_role",
                        f"{aw}: role not defined for event type {e.event_type}",
                    ))
                    continue
                nt = arg.nugget.nugget_type
                if nt is not None and nt in schema.nugget_types:
                    c = schema.constraint(e.event_type, arg.role)
                    if nt not in c.fillers:
                        report.issues.append(ValidationIssue(
                            doc.doc_id, "error", "filler_violation",
                            f"{aw}: nugget type {nt} not allowed "
                            f"(allowed: {', '.join(c.fillers) or 'sub-events only'})",
                        ))
    return report
