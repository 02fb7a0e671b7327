"""Event ontology: label inventories plus per-(event type, role) constraints.

A schema fixes three label inventories (event types, argument roles, nugget
types) and a constraint table. Each table row says which nugget types may fill
a role of an event type and which event types may appear there as sub-events.
Row order within an event type is meaningful: it is the tie-break order when a
role has to be inferred for an unlabeled sub-event attachment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

DEFAULT_SCHEMA_RESOURCE = "scievents.json"


class SchemaError(Exception):
    """Raised for malformed schema files and unknown-label lookups."""


@dataclass(frozen=True)
class RoleConstraint:
    event_type: str
    role: str
    fillers: tuple[str, ...]
    subevent_types: tuple[str, ...]

    def to_json_obj(self) -> dict:
        return {
            "event_type": self.event_type,
            "role": self.role,
            "fillers": list(self.fillers),
            "subevent_types": list(self.subevent_types),
        }


@dataclass(frozen=True)
class Schema:
    event_types: tuple[str, ...]
    argument_roles: tuple[str, ...]
    nugget_types: tuple[str, ...]
    constraints: tuple[RoleConstraint, ...]
    # (event_type, role) -> RoleConstraint, derived in __post_init__
    _by_pair: dict = field(default=None, repr=False, compare=False)
    _rows_by_type: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        by_pair = {(c.event_type, c.role): c for c in self.constraints}
        rows = {t: [] for t in self.event_types}
        for c in self.constraints:
            rows[c.event_type].append(c)
        object.__setattr__(self, "_by_pair", by_pair)
        object.__setattr__(self, "_rows_by_type", rows)

    def _check_event_type(self, event_type: str) -> None:
        if event_type not in self._rows_by_type:
            raise SchemaError(f"unknown event type: {event_type!r}")

    def valid(self, event_type: str, role: str) -> bool:
        """True iff the constraint table has a row for (event_type, role)."""
        self._check_event_type(event_type)
        if role not in self.argument_roles:
            raise SchemaError(f"unknown role: {role!r}")
        return (event_type, role) in self._by_pair

    def constraint(self, event_type: str, role: str) -> RoleConstraint | None:
        self._check_event_type(event_type)
        return self._by_pair.get((event_type, role))

    def roles_for(self, event_type: str) -> tuple[str, ...]:
        """Roles defined for an event type, in table row order."""
        self._check_event_type(event_type)
        return tuple(c.role for c in self._rows_by_type[event_type])

    def roles_for_subevent(self, main_type: str, sub_type: str) -> list[str]:
        """Roles of main_type that admit sub_type as a sub-event, row order."""
        self._check_event_type(main_type)
        self._check_event_type(sub_type)
        return [
            c.role
            for c in self._rows_by_type[main_type]
            if sub_type in c.subevent_types
        ]

    def to_json_obj(self) -> dict:
        return {
            "event_types": list(self.event_types),
            "argument_roles": list(self.argument_roles),
            "nugget_types": list(self.nugget_types),
            "constraints": [c.to_json_obj() for c in self.constraints],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "Schema":
        if not isinstance(obj, dict):
            raise SchemaError("schema must be a JSON object")
        inventories = {}
        for key in ("event_types", "argument_roles", "nugget_types"):
            values = obj.get(key)
            if not isinstance(values, list) or not values:
                raise SchemaError(f"{key} must be a non-empty list")
            if not all(isinstance(v, str) for v in values):
                raise SchemaError(f"{key} entries must be strings")
            if len(set(values)) != len(values):
                raise SchemaError(f"duplicate labels in {key}")
            inventories[key] = tuple(values)
        raw_rows = obj.get("constraints")
        if not isinstance(raw_rows, list):
            raise SchemaError("constraints must be a list")
        constraints = []
        seen_pairs = set()
        for row in raw_rows:
            if not isinstance(row, dict):
                raise SchemaError("constraint rows must be objects")
            try:
                c = RoleConstraint(
                    event_type=row["event_type"],
                    role=row["role"],
                    fillers=tuple(row["fillers"]),
                    subevent_types=tuple(row["subevent_types"]),
                )
            except KeyError as exc:
                raise SchemaError(f"constraint row missing key {exc}") from None
            if c.event_type not in inventories["event_types"]:
                raise SchemaError(f"constraint for unknown event type: {c.event_type!r}")
            if c.role not in inventories["argument_roles"]:
                raise SchemaError(f"constraint for unknown role: {c.role!r}")
            for f in c.fillers:
                if f not in inventories["nugget_types"]:
                    raise SchemaError(f"unknown nugget type in fillers: {f!r}")
            for t in c.subevent_types:
                if t not in inventories["event_types"]:
                    raise SchemaError(f"unknown event type in subevent_types: {t!r}")
            if (c.event_type, c.role) in seen_pairs:
                raise SchemaError(f"duplicate constraint row: ({c.event_type}, {c.role})")
            seen_pairs.add((c.event_type, c.role))
            constraints.append(c)
        return cls(
            event_types=inventories["event_types"],
            argument_roles=inventories["argument_roles"],
            nugget_types=inventories["nugget_types"],
            constraints=tuple(constraints),
        )


def load_schema(path: str | Path) -> Schema:
    """Load a schema from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read schema {path}: {exc}") from exc
    return Schema.from_json_obj(obj)


_DEFAULT: Schema | None = None


def default_schema() -> Schema:
    """The built-in scientific-abstract ontology (10 event types, 20 roles)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("eventgrid.data").joinpath(DEFAULT_SCHEMA_RESOURCE).read_text()
        _DEFAULT = Schema.from_json_obj(json.loads(text))
    return _DEFAULT
