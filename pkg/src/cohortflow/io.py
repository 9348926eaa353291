"""File formats: longitudinal snapshot CSV and model JSON.

Snapshot CSV
    Header is exactly ``term_index,term_label,student_id,state``; one row per
    (term, student); UTF-8; LF or CRLF line endings; RFC-4180 quoting for
    fields containing commas. A term's type tag (used for optional
    seasonality grouping) is derived from the leading alphabetic prefix of
    its label, lowercased ("Fall2018" -> "fall").

Model JSON
    Object with keys ``states`` (ordered label array), ``enrolled``,
    ``absorbing``, ``matrix`` (rows in enrolled order, columns in state
    order), ``inflow`` (label -> number), ``meta``. Numbers are serialized
    with full double precision, so a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Iterable

import numpy as np

from .domain import EnrollmentSnapshot, StateSpace, TermId, TransitionModel, validate_model

SNAPSHOT_HEADER = ("term_index", "term_label", "student_id", "state")


class SnapshotParseError(ValueError):
    """Malformed or inconsistent snapshot CSV content."""


class ModelFormatError(ValueError):
    """Model document violates the JSON schema or the row-stochastic contract."""


def _as_text(source: str | bytes | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    return source


def term_type_of(label: str) -> str | None:
    """Leading alphabetic prefix of a term label, lowercased; None if absent."""
    i = 0
    while i < len(label) and label[i].isalpha():
        i += 1
    return label[:i].lower() or None


def parse_snapshot_csv(source: str | bytes | IO, space: StateSpace) -> list[EnrollmentSnapshot]:
    """Parse snapshot CSV into one snapshot per distinct term, sorted ascending.

    Raises SnapshotParseError with a line number for malformed rows, unknown
    state labels, and duplicate (term, student) rows with conflicting states.
    """
    text = _as_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SnapshotParseError("empty input: missing header") from None
    if tuple(h.strip() for h in header) != SNAPSHOT_HEADER:
        raise SnapshotParseError(
            f"bad header at line 1: expected {','.join(SNAPSHOT_HEADER)!r}, got {','.join(header)!r}"
        )

    labels: dict[int, str] = {}
    rosters: dict[int, dict[str, str]] = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise SnapshotParseError(f"line {line}: expected 4 fields, got {len(row)}")
        raw_index, term_label, student_id, state = (field.strip() for field in row)
        try:
            term_index = int(raw_index)
        except ValueError:
            raise SnapshotParseError(f"line {line}: term_index {raw_index!r} is not an integer") from None
        if term_index < 0:
            raise SnapshotParseError(f"line {line}: term_index must be >= 0, got {term_index}")
        if state not in space:
            raise SnapshotParseError(f"unknown state '{state}' at line {line}")
        if not student_id:
            raise SnapshotParseError(f"line {line}: empty student_id")
        roster = rosters.setdefault(term_index, {})
        previous = roster.get(student_id)
        if previous is not None and previous != state:
            raise SnapshotParseError(
                f"line {line}: conflicting states for student '{student_id}' at term "
                f"{term_index}: '{previous}' vs '{state}'"
            )
        roster[student_id] = state
        labels.setdefault(term_index, term_label)

    snapshots = []
    for term_index in sorted(rosters):
        label = labels[term_index]
        term = TermId(index=term_index, label=label, term_type=term_type_of(label))
        snapshots.append(EnrollmentSnapshot(term=term, roster=rosters[term_index]))
    return snapshots


def write_snapshot_csv(snapshots: Iterable[EnrollmentSnapshot]) -> str:
    """Render snapshots as CSV text, rows sorted by (term, student) for determinism."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SNAPSHOT_HEADER)
    for snapshot in sorted(snapshots, key=lambda s: s.term.index):
        for student_id in sorted(snapshot.roster):
            writer.writerow([snapshot.term.index, snapshot.term.label, student_id, snapshot.roster[student_id]])
    return out.getvalue()


def space_from_dict(doc: object) -> StateSpace:
    """Build a StateSpace from the {states, enrolled, absorbing} object form."""
    if not isinstance(doc, dict):
        raise ModelFormatError("state space document must be a JSON object")
    states = _require(doc, "states", list, "an array of state labels")
    enrolled = _require(doc, "enrolled", list, "an array of state labels")
    absorbing = _require(doc, "absorbing", list, "an array of state labels")
    try:
        return StateSpace(states=states, enrolled=enrolled, absorbing=absorbing)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def model_to_dict(model: TransitionModel) -> dict:
    return {
        "states": list(model.space.states),
        "enrolled": list(model.space.enrolled),
        "absorbing": list(model.space.absorbing),
        "matrix": [[float(p) for p in row] for row in model.matrix],
        "inflow": {label: float(x) for label, x in zip(model.space.enrolled, model.inflow)},
        "meta": dict(model.meta),
    }


def write_model(model: TransitionModel) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def _require(doc: dict, key: str, kind: type, kind_name: str):
    if key not in doc:
        raise ModelFormatError(f"missing key '{key}'")
    value = doc[key]
    if not isinstance(value, kind):
        raise ModelFormatError(f"key '{key}' must be {kind_name}")
    return value


def model_from_dict(doc: object) -> TransitionModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    states = _require(doc, "states", list, "an array of state labels")
    enrolled = _require(doc, "enrolled", list, "an array of state labels")
    absorbing = _require(doc, "absorbing", list, "an array of state labels")
    matrix = _require(doc, "matrix", list, "an array of probability rows")
    inflow_map = _require(doc, "inflow", dict, "an object mapping state label to number")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ModelFormatError("key 'meta' must be an object")

    try:
        space = StateSpace(states=states, enrolled=enrolled, absorbing=absorbing)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None

    if len(matrix) != space.n_enrolled:
        raise ModelFormatError(
            f"matrix must have {space.n_enrolled} rows (one per enrolled state), got {len(matrix)}"
        )
    rows = []
    for label, row in zip(space.enrolled, matrix):
        if not isinstance(row, list) or len(row) != space.n_states:
            raise ModelFormatError(f"row '{label}' must have {space.n_states} entries")
        try:
            rows.append([float(p) for p in row])
        except (TypeError, ValueError):
            raise ModelFormatError(f"row '{label}' contains a non-numeric entry") from None

    unknown = [s for s in inflow_map if s not in space.enrolled]
    if unknown:
        raise ModelFormatError(f"inflow refers to non-enrolled state '{unknown[0]}'")
    try:
        inflow = [float(inflow_map.get(s, 0.0)) for s in space.enrolled]
    except (TypeError, ValueError):
        raise ModelFormatError("inflow contains a non-numeric entry") from None

    model = TransitionModel(space=space, matrix=rows, inflow=inflow, meta=meta)
    matrix_arr = np.asarray(rows)
    for i, label in enumerate(space.enrolled):
        row_sum = float(matrix_arr[i].sum())
        if abs(row_sum - 1.0) > 1e-9:
            raise ModelFormatError(f"row '{label}' sums to {row_sum:.12g}")
    violations = validate_model(model)
    if violations:
        raise ModelFormatError("; ".join(violations))
    return model


def read_model(source: str | bytes | IO) -> TransitionModel:
    """Parse and validate a model JSON document."""
    text = _as_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"document is not valid JSON: {exc}") from None
    return model_from_dict(doc)
