import json

import pytest

from cohortflow import (
    ModelFormatError,
    SnapshotParseError,
    default_space,
    parse_snapshot_csv,
    read_model,
    write_model,
    write_snapshot_csv,
)
from cohortflow.io import space_from_dict, term_type_of

HEADER = "term_index,term_label,student_id,state"


class TestParseSnapshotCsv:
    def test_two_rows_two_snapshots(self):
        text = f"{HEADER}\n0,F18,s1,Freshman\n1,W19,s1,Sophomore\n"
        snapshots = parse_snapshot_csv(text, default_space())
        assert len(snapshots) == 2
        assert snapshots[0].roster["s1"] == "Freshman"
        assert snapshots[1].roster["s1"] == "Sophomore"
        assert [s.term.index for s in snapshots] == [0, 1]

    def test_header_only_is_empty(self):
        assert parse_snapshot_csv(f"{HEADER}\n", default_space()) == []

    def test_unknown_state_names_label_and_line(self):
        text = f"{HEADER}\n0,F18,s1,Wizard\n"
        with pytest.raises(SnapshotParseError, match="unknown state 'Wizard' at line 2"):
            parse_snapshot_csv(text, default_space())

    def test_wrong_column_count(self):
        text = f"{HEADER}\n0,F18,s1,Freshman\n1,W19,s1\n"
        with pytest.raises(SnapshotParseError, match="line 3: expected 4 fields, got 3"):
            parse_snapshot_csv(text, default_space())

    def test_non_integer_term_index(self):
        text = f"{HEADER}\nzero,F18,s1,Freshman\n"
        with pytest.raises(SnapshotParseError, match="line 2.*not an integer"):
            parse_snapshot_csv(text, default_space())

    def test_conflicting_duplicate_rejected(self):
        text = f"{HEADER}\n0,F18,s1,Freshman\n0,F18,s1,Junior\n"
        with pytest.raises(SnapshotParseError, match="conflicting states for student 's1'"):
            parse_snapshot_csv(text, default_space())

    def test_consistent_duplicate_tolerated(self):
        text = f"{HEADER}\n0,F18,s1,Freshman\n0,F18,s1,Freshman\n"
        snapshots = parse_snapshot_csv(text, default_space())
        assert len(snapshots) == 1 and len(snapshots[0].roster) == 1

    def test_crlf_accepted(self):
        text = f"{HEADER}\r\n0,F18,s1,Freshman\r\n"
        snapshots = parse_snapshot_csv(text.encode("utf-8"), default_space())
        assert snapshots[0].roster == {"s1": "Freshman"}

    def test_bad_header_rejected(self):
        with pytest.raises(SnapshotParseError, match="bad header"):
            parse_snapshot_csv("term,label,id,state\n", default_space())

    def test_terms_sorted_ascending(self):
        text = f"{HEADER}\n1,W19,s1,Sophomore\n0,F18,s1,Freshman\n"
        snapshots = parse_snapshot_csv(text, default_space())
        assert [s.term.index for s in snapshots] == [0, 1]

    def test_term_type_derived_from_label(self):
        text = f"{HEADER}\n0,Fall2018,s1,Freshman\n1,Winter2019,s1,Sophomore\n"
        snapshots = parse_snapshot_csv(text, default_space())
        assert snapshots[0].term.term_type == "fall"
        assert snapshots[1].term.term_type == "winter"

    def test_write_then_parse_round_trip(self):
        text = f"{HEADER}\n0,F18,s1,Freshman\n0,F18,s2,Junior\n1,W19,s1,Sophomore\n"
        snapshots = parse_snapshot_csv(text, default_space())
        again = parse_snapshot_csv(write_snapshot_csv(snapshots), default_space())
        assert [dict(s.roster) for s in again] == [dict(s.roster) for s in snapshots]


def test_term_type_of_edge_cases():
    assert term_type_of("Fall2018") == "fall"
    assert term_type_of("2018") is None
    assert term_type_of("") is None


class TestModelJson:
    def test_round_trip_identity(self, three_stage_model):
        assert read_model(write_model(three_stage_model)) == three_stage_model

    def test_round_trip_preserves_full_precision(self, three_stage_space):
        from cohortflow import TransitionModel

        third = 1.0 / 3.0
        model = TransitionModel(
            three_stage_space,
            [[third, third, 1.0 - 2 * third, 0.0]] * 3,
            [0.1234567890123456, 0.0, 7e-300],
            meta={"alpha": 0.5, "term_pairs": [["T0", "T1"]], "weights": [1.0]},
        )
        assert read_model(write_model(model)) == model

    def test_row_sum_violation_names_row(self, three_stage_model):
        doc = json.loads(write_model(three_stage_model))
        doc["matrix"][0] = [0.5, 0.3, 0.1, 0.0]
        with pytest.raises(ModelFormatError, match="row 'Freshman' sums to 0.9"):
            read_model(json.dumps(doc))

    def test_empty_document_is_schema_error(self):
        with pytest.raises(ModelFormatError):
            read_model("")
        with pytest.raises(ModelFormatError, match="missing key"):
            read_model("{}")

    def test_unknown_inflow_label_rejected(self, three_stage_model):
        doc = json.loads(write_model(three_stage_model))
        doc["inflow"]["Ghost"] = 5
        with pytest.raises(ModelFormatError, match="Ghost"):
            read_model(json.dumps(doc))

    def test_missing_inflow_labels_default_to_zero(self, three_stage_model):
        doc = json.loads(write_model(three_stage_model))
        doc["inflow"] = {"Freshman": 120.0}
        model = read_model(json.dumps(doc))
        assert list(model.inflow) == [120.0, 0.0, 0.0]

    def test_bad_matrix_shape_rejected(self, three_stage_model):
        doc = json.loads(write_model(three_stage_model))
        doc["matrix"] = doc["matrix"][:2]
        with pytest.raises(ModelFormatError, match="matrix must have 3 rows"):
            read_model(json.dumps(doc))


def test_space_from_dict_round_trip():
    space = default_space()
    doc = {"states": list(space.states), "enrolled": list(space.enrolled), "absorbing": list(space.absorbing)}
    assert space_from_dict(doc) == space
    with pytest.raises(ModelFormatError):
        space_from_dict({"states": ["A"]})
