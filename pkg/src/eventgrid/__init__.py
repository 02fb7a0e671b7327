"""Toolkit for event-annotated corpora and their word-relation grid encoding."""

from .analysis import ConfusionMatrix, ErrorBreakdown, confusion, identification_errors
from .corpus import (
    DISCONTINUOUS,
    REVERSE_ORDER,
    SINGLE_TOKEN,
    Argument,
    Document,
    Event,
    Nugget,
    SubEventLink,
    ValidationIssue,
    ValidationReport,
    classify_nugget,
    find_overlaps,
    find_subevents,
    nugget_population,
    validate_corpus,
)
from .grid import (
    DecodeConfig,
    DecodeDiagnostics,
    DecodeResult,
    GridDiff,
    RelationGrid,
    decode,
    encode,
    grid_diff,
)
from .io import (
    CorpusFormatError,
    read_corpus,
    read_grids,
    write_corpus,
    write_grids,
)
from .schema import RoleConstraint, Schema, SchemaError, default_schema, load_schema
from .scoring import METRICS, MetricScore, ScoreReport, extract_items, score
from .stats import complexity, density, type_distribution

__version__ = "0.1.0"

__all__ = [
    "DISCONTINUOUS",
    "METRICS",
    "REVERSE_ORDER",
    "SINGLE_TOKEN",
    "Argument",
    "ConfusionMatrix",
    "CorpusFormatError",
    "DecodeConfig",
    "DecodeDiagnostics",
    "DecodeResult",
    "Document",
    "ErrorBreakdown",
    "Event",
    "GridDiff",
    "MetricScore",
    "Nugget",
    "RelationGrid",
    "RoleConstraint",
    "Schema",
    "SchemaError",
    "ScoreReport",
    "SubEventLink",
    "ValidationIssue",
    "ValidationReport",
    "classify_nugget",
    "complexity",
    "confusion",
    "decode",
    "default_schema",
    "density",
    "encode",
    "extract_items",
    "find_overlaps",
    "find_subevents",
    "grid_diff",
    "identification_errors",
    "load_schema",
    "nugget_population",
    "read_corpus",
    "read_grids",
    "score",
    "type_distribution",
    "validate_corpus",
    "write_corpus",
    "write_grids",
]
