"""JSONL readers and writers for corpora and grids.

One JSON object per line. Corpus lines:

    {"doc_id": ..., "tokens": [...], "events": [{"event_id": ..., "event_type": ...,
     "trigger": {"indices": [...], "nugget_type": ...}, "arguments": [...]}]}

nugget_type is optional everywhere. Grid lines: {"doc_id", "length", "cells"}
with cells as [row, col, label] triples. Writers emit a fixed key order and
sorted cells so outputs diff cleanly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable

from .corpus import Argument, Document, Event, Nugget
from .grid import RelationGrid


class CorpusFormatError(Exception):
    """Structural problem in an input file, with file/line context."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise CorpusFormatError(f"{where}: missing key {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise CorpusFormatError(f"{where}: {key!r} must be {kind.__name__}")
    return value


def _check_keys(obj: dict, allowed: set[str], where: str, strict: bool):
    if strict:
        unknown = set(obj) - allowed
        if unknown:
            raise CorpusFormatError(f"{where}: unknown keys {sorted(unknown)}")


def _nugget_from_obj(obj, where: str, strict: bool) -> Nugget:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: must be an object")
    _check_keys(obj, {"indices", "nugget_type"}, where, strict)
    indices = _require(obj, "indices", list, where)
    nt = obj.get("nugget_type")
    if nt is not None and not isinstance(nt, str):
        raise CorpusFormatError(f"{where}: nugget_type must be a string")
    try:
        return Nugget(token_indices=tuple(indices), nugget_type=nt)
    except ValueError as exc:
        raise CorpusFormatError(f"{where}: {exc}") from None


def document_from_json_obj(obj, *, strict: bool = True, where: str = "document") -> Document:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: must be an object")
    _check_keys(obj, {"doc_id", "tokens", "events"}, where, strict)
    doc_id = _require(obj, "doc_id", str, where)
    tokens = _require(obj, "tokens", list, where)
    if not all(isinstance(t, str) for t in tokens):
        raise CorpusFormatError(f"{where}: tokens must all be strings")
    raw_events = _require(obj, "events", list, where)
    events = []
    for k, raw in enumerate(raw_events):
        ew = f"{where} event[{k}]"
        if not isinstance(raw, dict):
            raise CorpusFormatError(f"{ew}: must be an object")
        _check_keys(raw, {"event_id", "event_type", "trigger", "arguments"}, ew, strict)
        event_id = _require(raw, "event_id", str, ew)
        event_type = _require(raw, "event_type", str, ew)
        trigger = _nugget_from_obj(raw.get("trigger"), f"{ew} trigger", strict)
        args = []
        for m, raw_arg in enumerate(raw.get("arguments", [])):
            aw = f"{ew} argument[{m}]"
            if not isinstance(raw_arg, dict):
                raise CorpusFormatError(f"{aw}: must be an object")
            _check_keys(raw_arg, {"role", "indices", "nugget_type"}, aw, strict)
            role = _require(raw_arg, "role", str, aw)
            args.append(Argument(role=role, nugget=_nugget_from_obj(
                {k2: v for k2, v in raw_arg.items() if k2 != "role"}, aw, strict)))
        events.append(Event(
            event_id=event_id, event_type=event_type,
            trigger=trigger, arguments=tuple(args),
        ))
    return Document(doc_id=doc_id, tokens=tuple(tokens), events=tuple(events))


def document_to_json_obj(doc: Document) -> dict:
    def nugget_obj(n: Nugget) -> dict:
        obj = {"indices": list(n.token_indices)}
        if n.nugget_type is not None:
            obj["nugget_type"] = n.nugget_type
        return obj

    return {
        "doc_id": doc.doc_id,
        "tokens": list(doc.tokens),
        "events": [
            {
                "event_id": e.event_id,
                "event_type": e.event_type,
                "trigger": nugget_obj(e.trigger),
                "arguments": [
                    {"role": a.role, **nugget_obj(a.nugget)} for a in e.arguments
                ],
            }
            for e in doc.events
        ],
    }


def _iter_jsonl(path: str | Path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(str(exc), path=path) from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc}", path=path, line=lineno) from None


def read_corpus(path: str | Path, *, strict: bool = True) -> list[Document]:
    """Read a corpus file; strict mode rejects unknown keys, lenient ignores them."""
    docs = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        try:
            doc = document_from_json_obj(obj, strict=strict)
        except CorpusFormatError as exc:
            raise CorpusFormatError(str(exc), path=path, line=lineno) from None
        if doc.doc_id in seen:
            raise CorpusFormatError(
                f"duplicate doc_id {doc.doc_id!r}", path=path, line=lineno)
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def write_corpus(target: str | Path | IO, docs: Iterable[Document]) -> None:
    _write_jsonl(target, (document_to_json_obj(d) for d in docs))


def read_grids(path: str | Path) -> list[RelationGrid]:
    grids = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        try:
            grid = RelationGrid.from_json_obj(obj)
        except ValueError as exc:
            raise CorpusFormatError(str(exc), path=path, line=lineno) from None
        if grid.doc_id in seen:
            raise CorpusFormatError(
                f"duplicate doc_id {grid.doc_id!r}", path=path, line=lineno)
        seen.add(grid.doc_id)
        grids.append(grid)
    return grids


def write_grids(target: str | Path | IO, grids: Iterable[RelationGrid]) -> None:
    _write_jsonl(target, (g.to_json_obj() for g in grids))


def _write_jsonl(target: str | Path | IO, objs: Iterable[dict]) -> None:
    if hasattr(target, "write"):
        for obj in objs:
            target.write(dumps_canonical(obj) + "\n")
    else:
        with open(target, "w", encoding="utf-8") as fh:
            for obj in objs:
                fh.write(dumps_canonical(obj) + "\n")


def dumps_canonical(obj) -> str:
    """Single-line JSON with stable separators; key order is the caller's."""
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))
