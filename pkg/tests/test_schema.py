import json
from pathlib import Path

import pytest

from eventgrid.schema import Schema, SchemaError, default_schema, load_schema

REPO_ROOT = Path(__file__).resolve().parents[1]


class TestDefaultOntology:
    def test_label_inventory_sizes(self):
        s = default_schema()
        assert len(s.event_types) == 10
        assert len(s.argument_roles) == 20
        assert len(s.nugget_types) == 10

    def test_event_type_order(self):
        s = default_schema()
        assert s.event_types == (
            "PUR", "ITT", "RWS", "RWF", "PRP", "WKS", "MDS", "FIN", "CMP", "FAC",
        )

    def test_valid_pair_count_snapshot(self):
        # Hand tally of the constraint tables: 3+3+6+6+3+5+5+2+7+7.
        s = default_schema()
        assert len(s.constraints) == 47
        per_type = {t: len(s.roles_for(t)) for t in s.event_types}
        assert per_type == {
            "PUR": 3, "ITT": 3, "RWS": 6, "RWF": 6, "PRP": 3,
            "WKS": 5, "MDS": 5, "FIN": 2, "CMP": 7, "FAC": 7,
        }

    def test_shipped_copy_matches_embedded(self):
        shipped = REPO_ROOT / "schema" / "scievents.json"
        assert load_schema(shipped) == default_schema()


class TestValid:
    def test_membership(self):
        s = default_schema()
        assert s.valid("PUR", "Aim") is True
        assert s.valid("PUR", "Finder") is False
        assert s.valid("FIN", "Content") is True
        assert s.valid("FIN", "Aim") is False
        assert s.valid("FAC", "Reason") is True
        assert s.valid("ITT", "Target") is True
        assert s.valid("ITT", "Subject") is False

    def test_unknown_labels_raise(self):
        s = default_schema()
        with pytest.raises(SchemaError):
            s.valid("XYZ", "Aim")
        with pytest.raises(SchemaError):
            s.valid("PUR", "NotARole")

    def test_every_constraint_row_is_valid(self):
        s = default_schema()
        for c in s.constraints:
            assert s.valid(c.event_type, c.role)


class TestConstraintLookup:
    def test_fillers_and_subevents(self):
        s = default_schema()
        c = s.constraint("MDS", "Condition")
        assert c.fillers == ("LIM",)
        assert c.subevent_types == ("MDS",)
        c = s.constraint("FIN", "Content")
        assert c.fillers == ()
        assert c.subevent_types == ("FAC", "CMP")

    def test_missing_pair_returns_none(self):
        s = default_schema()
        assert s.constraint("PUR", "Finder") is None

    def test_roles_preserve_table_row_order(self):
        s = default_schema()
        assert s.roles_for("FAC") == (
            "Subject", "Object", "Condition", "Reason", "Dataset", "Target", "Extent",
        )
        assert s.roles_for("PRP") == ("Proposer", "Content", "Target")


class TestRolesForSubevent:
    def test_single_candidate(self):
        s = default_schema()
        assert s.roles_for_subevent("PRP", "PUR") == ["Target"]
        assert s.roles_for_subevent("FIN", "FAC") == ["Content"]
        assert s.roles_for_subevent("FIN", "CMP") == ["Content"]

    def test_multiple_candidates_in_row_order(self):
        s = default_schema()
        assert s.roles_for_subevent("CMP", "FAC") == ["Arg1", "Arg2", "Condition"]
        assert s.roles_for_subevent("FAC", "FAC") == ["Condition", "Reason"]

    def test_no_candidates(self):
        s = default_schema()
        assert s.roles_for_subevent("PUR", "FIN") == []
        assert s.roles_for_subevent("ITT", "PUR") == []

    def test_unknown_types_raise(self):
        s = default_schema()
        with pytest.raises(SchemaError):
            s.roles_for_subevent("PUR", "XYZ")


class TestLoadErrors:
    def _base(self):
        return {
            "event_types": ["A", "B"],
            "argument_roles": ["r1", "r2"],
            "nugget_types": ["N1"],
            "constraints": [
                {"event_type": "A", "role": "r1", "fillers": ["N1"], "subevent_types": ["B"]},
            ],
        }

    def _expect_error(self, obj, fragment):
        with pytest.raises(SchemaError, match=fragment):
            Schema.from_json_obj(obj)

    def test_well_formed_loads(self):
        s = Schema.from_json_obj(self._base())
        assert s.valid("A", "r1")
        assert not s.valid("B", "r1")

    def test_empty_event_types(self):
        obj = self._base()
        obj["event_types"] = []
        self._expect_error(obj, "event_types")

    def test_duplicate_labels(self):
        obj = self._base()
        obj["argument_roles"] = ["r1", "r1"]
        self._expect_error(obj, "duplicate")

    def test_duplicate_constraint_row(self):
        obj = self._base()
        obj["constraints"].append(dict(obj["constraints"][0]))
        self._expect_error(obj, "duplicate")

    def test_dangling_subevent_reference(self):
        obj = self._base()
        obj["constraints"][0]["subevent_types"] = ["Z"]
        self._expect_error(obj, "unknown event type")

    def test_unknown_filler(self):
        obj = self._base()
        obj["constraints"][0]["fillers"] = ["N9"]
        self._expect_error(obj, "unknown nugget type")

    def test_unknown_role_in_constraint(self):
        obj = self._base()
        obj["constraints"][0]["role"] = "r9"
        self._expect_error(obj, "unknown role")

    def test_missing_key(self):
        obj = self._base()
        del obj["nugget_types"]
        self._expect_error(obj, "nugget_types")

    def test_file_not_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("not json at all")
        with pytest.raises(SchemaError):
            load_schema(p)


class TestSerialization:
    def test_round_trip(self):
        s = default_schema()
        assert Schema.from_json_obj(s.to_json_obj()) == s

    def test_json_obj_key_order(self):
        obj = default_schema().to_json_obj()
        assert list(obj) == ["event_types", "argument_roles", "nugget_types", "constraints"]
        assert list(obj["constraints"][0]) == ["event_type", "role", "fillers", "subevent_types"]

    def test_round_trip_through_file(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(default_schema().to_json_obj()))
        assert load_schema(p) == default_schema()
