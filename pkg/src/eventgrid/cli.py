"""Command-line front end.

Subcommands: validate, encode, decode, score, stats, errors, split, schema.
Exit codes: 0 success, 1 validation failures, 2 usage or data errors,
3 I/O and file-format errors. All JSON output is canonically ordered so
reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import analysis, stats
from .corpus import validate_corpus
from .grid import DecodeConfig, decode, encode
from .io import CorpusFormatError, dumps_canonical, read_corpus, read_grids, write_corpus, write_grids
from .schema import Schema, SchemaError, default_schema, load_schema
from .scoring import score


def _schema_from(args) -> Schema:
    return load_schema(args.schema) if args.schema else default_schema()


def _read_corpus(path: str, args) -> list:
    return read_corpus(path, strict=not getattr(args, "lenient", False))


def _emit(obj) -> None:
    print(dumps_canonical(obj))


def cmd_validate(args) -> int:
    docs = _read_corpus(args.corpus, args)
    report = validate_corpus(docs, _schema_from(args))
    _emit(report.to_json_obj())
    return 0 if report.ok or args.lenient else 1


def cmd_encode(args) -> int:
    schema = _schema_from(args)
    grids = [encode(d, schema) for d in _read_corpus(args.corpus, args)]
    write_grids(args.output if args.output else sys.stdout, grids)
    return 0


def cmd_decode(args) -> int:
    schema = _schema_from(args)
    config = DecodeConfig(
        max_nugget_length=args.max_nugget_length,
        max_paths_per_head=args.max_paths_per_head,
        max_arguments_per_event=args.max_arguments_per_event,
    )
    tokens_by_id = {}
    if args.tokens:
        tokens_by_id = {d.doc_id: d.tokens for d in _read_corpus(args.tokens, args)}
    docs = []
    diagnostics = []
    anomalies = 0
    for grid in read_grids(args.grids):
        if args.tokens and grid.doc_id not in tokens_by_id:
            raise ValueError(f"--tokens corpus has no document {grid.doc_id!r}")
        result = decode(grid, schema, config)
        docs.append(result.to_document(tokens_by_id.get(grid.doc_id)))
        diag = result.diagnostics.to_json_obj()
        anomalies += sum(diag.values())
        diagnostics.append({"doc_id": grid.doc_id, **diag})
    write_corpus(args.output if args.output else sys.stdout, docs)
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as fh:
            for entry in diagnostics:
                fh.write(dumps_canonical(entry) + "\n")
    if anomalies:
        print(f"decode: {anomalies} anomalies across {len(docs)} documents", file=sys.stderr)
    return 0


def cmd_score(args) -> int:
    schema = _schema_from(args)
    pred = _read_corpus(args.pred, args)
    gold = _read_corpus(args.gold, args)
    report = score(pred, gold, schema)
    if args.json:
        _emit(report.to_json_obj())
    else:
        print(report.format_table(percent=args.percent))
    return 0


def cmd_stats(args) -> int:
    schema = _schema_from(args)
    docs = _read_corpus(args.corpus, args)
    _emit({
        "density": stats.density(docs).to_json_obj(),
        "complexity": stats.complexity(docs, schema).to_json_obj(),
        "type_distribution": stats.type_distribution(
            docs, schema, length_bucket=args.length_bucket
        ).to_json_obj(),
    })
    return 0


def cmd_errors(args) -> int:
    schema = _schema_from(args)
    pred = _read_corpus(args.pred, args)
    gold = _read_corpus(args.gold, args)
    matrices = {
        level: analysis.confusion(pred, gold, schema, level=level)
        for level in ("event_type", "argument_role")
    }
    _emit({
        "arg_context": args.args_context,
        "TI": analysis.identification_errors(pred, gold, schema, metric="TI").to_json_obj(),
        "AI": analysis.identification_errors(
            pred, gold, schema, metric="AI", arg_context=args.args_context
        ).to_json_obj(),
        "confusion": {level: m.to_json_obj() for level, m in matrices.items()},
    })
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        for level, m in matrices.items():
            path = os.path.join(args.csv_dir, f"confusion_{level}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(m.to_csv())
    return 0


def cmd_split(args) -> int:
    a, b, c = args.ratios
    if min(a, b, c) < 0 or abs(a + b + c - 1.0) > 1e-9:
        raise ValueError(f"split ratios must be non-negative and sum to 1, got {args.ratios}")
    docs = _read_corpus(args.corpus, args)
    ids = [d.doc_id for d in docs]
    random.Random(args.seed).shuffle(ids)
    n = len(ids)
    n_train, n_dev = int(n * a), int(n * b)
    membership = {
        "train": set(ids[:n_train]),
        "dev": set(ids[n_train:n_train + n_dev]),
        "test": set(ids[n_train + n_dev:]),
    }
    os.makedirs(args.out_dir, exist_ok=True)
    for name, chosen in membership.items():
        path = os.path.join(args.out_dir, f"{name}.jsonl")
        write_corpus(path, [d for d in docs if d.doc_id in chosen])
        print(f"{name}: {len(chosen)} documents -> {path}", file=sys.stderr)
    return 0


def cmd_schema(args) -> int:
    schema = _schema_from(args)
    if args.json:
        _emit(schema.to_json_obj())
        return 0
    print(f"event types ({len(schema.event_types)}): {' '.join(schema.event_types)}")
    print(f"argument roles ({len(schema.argument_roles)}): {' '.join(schema.argument_roles)}")
    print(f"nugget types ({len(schema.nugget_types)}): {' '.join(schema.nugget_types)}")
    print(f"constraints ({len(schema.constraints)}):")
    for con in schema.constraints:
        line = f"  {con.event_type}.{con.role}"
        if con.fillers:
            line += f"  fillers: {' '.join(con.fillers)}"
        if con.subevent_types:
            line += f"  sub-events: {' '.join(con.subevent_types)}"
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventgrid",
        description="Encode, decode, validate, and evaluate event-annotated corpora.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schema", metavar="PATH",
                        help="ontology JSON (default: embedded SciEvents)")
    common.add_argument("--lenient", action="store_true",
                        help="tolerate unknown JSON keys; validate also exits 0 on violations")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common],
                       help="check a corpus against the ontology")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("encode", parents=[common],
                       help="corpus JSONL to relation-grid JSONL")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", metavar="PATH", help="default: stdout")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common],
                       help="relation-grid JSONL back to corpus JSONL")
    p.add_argument("grids")
    p.add_argument("-o", "--output", metavar="PATH", help="default: stdout")
    p.add_argument("--tokens", metavar="CORPUS",
                   help="take token text from this corpus instead of placeholders")
    p.add_argument("--max-nugget-length", type=int,
                   default=DecodeConfig.max_nugget_length, metavar="N")
    p.add_argument("--max-paths-per-head", type=int,
                   default=DecodeConfig.max_paths_per_head, metavar="N")
    p.add_argument("--max-arguments-per-event", type=int,
                   default=DecodeConfig.max_arguments_per_event, metavar="N")
    p.add_argument("--diagnostics", metavar="PATH",
                   help="write per-document decode diagnostics JSONL here")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", parents=[common],
                       help="evaluate predictions against gold")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--json", action="store_true", help="JSON instead of a table")
    p.add_argument("--percent", action="store_true", help="table values as percentages")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", parents=[common],
                       help="density, complexity, and label distributions")
    p.add_argument("corpus")
    p.add_argument("--length-bucket", type=int, default=50, metavar="N",
                   help="document-length bucket width in tokens (default 50)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("errors", parents=[common],
                       help="identification error taxonomy and confusion matrices")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--args-context", choices=("matched", "any"), default="matched",
                   help="candidate pool for argument errors (default: matched trigger)")
    p.add_argument("--csv-dir", metavar="DIR",
                   help="also write confusion matrices as CSV files here")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("split", parents=[common],
                       help="deterministic train/dev/test split by document")
    p.add_argument("corpus")
    p.add_argument("--out-dir", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratios", type=float, nargs=3, default=(0.8, 0.1, 0.1),
                   metavar=("TRAIN", "DEV", "TEST"))
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("schema", parents=[common], help="print the active ontology")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_schema)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CorpusFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
