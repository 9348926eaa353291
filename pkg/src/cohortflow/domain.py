"""Core types for cohort-flow modeling.

A :class:`StateSpace` splits an ordered list of stage labels into *enrolled*
states (counted in headcount, carrying a transition row) and *absorbing*
states (terminal; students never leave them). A :class:`TransitionModel`
holds one probability row per enrolled state over *all* states, so the mass
flowing into absorbing columns is the per-term outflow, plus an expected
inflow of new entrants into each enrolled state.

Headcounts are expected values (nonnegative reals) throughout; rounding is a
presentation concern only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

#: Tolerance for the row-sum-equals-one check.
ROW_SUM_TOL = 1e-9

DEFAULT_ENROLLED = ("Freshman", "Sophomore", "Junior", "Senior", "StopOut")
DEFAULT_ABSORBING = ("Graduated", "Departed")


def _float_array(values, shape_name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{shape_name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr = arr + 0.0  # normalize -0.0 to +0.0
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateSpace:
    """Ordered stage labels partitioned into enrolled and absorbing states."""

    states: tuple[str, ...]
    enrolled: tuple[str, ...]
    absorbing: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "enrolled", tuple(self.enrolled))
        object.__setattr__(self, "absorbing", tuple(self.absorbing))
        if not all(isinstance(s, str) and s for s in self.states):
            raise ValueError("state labels must be non-empty strings")
        if len(set(self.states)) != len(self.states):
            raise ValueError("state labels must be unique")
        if not self.enrolled:
            raise ValueError("need at least one enrolled state")
        if not self.absorbing:
            raise ValueError("need at least one absorbing state")
        enrolled, absorbing = set(self.enrolled), set(self.absorbing)
        both = enrolled & absorbing
        if both:
            raise ValueError(f"states classified as both enrolled and absorbing: {sorted(both)}")
        if enrolled | absorbing != set(self.states) or len(self.enrolled) + len(self.absorbing) != len(self.states):
            raise ValueError("enrolled and absorbing together must cover the state list exactly once")
        index = {label: i for i, label in enumerate(self.states)}
        enrolled_cols = np.array([index[s] for s in self.enrolled])
        absorbing_cols = np.array([index[s] for s in self.absorbing])
        enrolled_cols.setflags(write=False)
        absorbing_cols.setflags(write=False)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_enrolled_cols", enrolled_cols)
        object.__setattr__(self, "_absorbing_cols", absorbing_cols)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_enrolled(self) -> int:
        return len(self.enrolled)

    @property
    def enrolled_columns(self) -> np.ndarray:
        """Column indices of the enrolled states, in enrolled (row) order."""
        return self._enrolled_cols  # type: ignore[attr-defined]

    @property
    def absorbing_columns(self) -> np.ndarray:
        return self._absorbing_cols  # type: ignore[attr-defined]

    def index(self, label: str) -> int:
        """Position of ``label`` in the ordered state list; KeyError if unknown."""
        return self._index[label]  # type: ignore[attr-defined]

    def __contains__(self, label: str) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def is_absorbing(self, label: str) -> bool:
        return label in self.absorbing

    def is_enrolled(self, label: str) -> bool:
        return label in self.enrolled


def default_space() -> StateSpace:
    """The default five-enrolled / two-absorbing stage layout."""
    return StateSpace(
        states=DEFAULT_ENROLLED + DEFAULT_ABSORBING,
        enrolled=DEFAULT_ENROLLED,
        absorbing=DEFAULT_ABSORBING,
    )


def state_index(space: StateSpace, label: str) -> int | None:
    """Ordinal of ``label`` in the state list, or None when unknown."""
    try:
        return space.index(label)
    except KeyError:
        return None


@dataclass(frozen=True)
class TermId:
    """One observation period (a census point), ordered by ``index``."""

    index: int
    label: str = ""
    term_type: str | None = None

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"term index must be >= 0, got {self.index}")
        if not self.label:
            object.__setattr__(self, "label", f"T{self.index}")


@dataclass(frozen=True)
class EnrollmentSnapshot:
    """Roster of individual IDs to state labels at one term.

    A roster entry carrying an absorbing label records that individual's
    terminal transition at this term; they appear in no later snapshot.
    """

    term: TermId
    roster: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "roster", MappingProxyType(dict(self.roster)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Expected headcount per enrolled state (persons; nonnegative reals)."""

    space: StateSpace
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = _float_array(self.counts, "counts", ndim=1)
        if counts.shape != (self.space.n_enrolled,):
            raise ValueError(
                f"counts must have one entry per enrolled state "
                f"({self.space.n_enrolled}), got {counts.shape[0]}"
            )
        if not np.all(np.isfinite(counts)):
            raise ValueError("headcounts must be finite")
        if np.any(counts < 0.0):
            raise ValueError("headcounts must be >= 0")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_mapping(cls, space: StateSpace, counts: Mapping[str, float]) -> "StateVector":
        unknown = [s for s in counts if s not in space.enrolled]
        if unknown:
            raise ValueError(f"not an enrolled state: {unknown[0]!r}")
        return cls(space, [float(counts.get(s, 0.0)) for s in space.enrolled])

    @classmethod
    def from_roster(cls, space: StateSpace, roster: Mapping[str, str]) -> "StateVector":
        """Headcount vector of a roster: one person per enrolled-state entry."""
        tallies = {s: 0 for s in space.enrolled}
        for state in roster.values():
            if state in tallies:
                tallies[state] += 1
        return cls(space, [tallies[s] for s in space.enrolled])

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def as_dict(self) -> dict[str, float]:
        return {label: float(x) for label, x in zip(self.space.enrolled, self.counts)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True, eq=False)
class TransitionModel:
    """Row-stochastic transition matrix plus expected per-term inflow.

    ``matrix`` has one row per enrolled state (in enrolled order) and one
    column per state (in state order); absorbing states have no row. ``meta``
    carries estimation provenance (term pairs used, smoothing, weights).
    """

    space: StateSpace
    matrix: np.ndarray
    inflow: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        matrix = _float_array(self.matrix, "matrix", ndim=2)
        if matrix.shape != (self.space.n_enrolled, self.space.n_states):
            raise ValueError(
                f"matrix must be {self.space.n_enrolled} x {self.space.n_states} "
                f"(enrolled rows x state columns), got {matrix.shape[0]} x {matrix.shape[1]}"
            )
        inflow = _float_array(self.inflow, "inflow", ndim=1)
        if inflow.shape != (self.space.n_enrolled,):
            raise ValueError(
                f"inflow must have one entry per enrolled state "
                f"({self.space.n_enrolled}), got {inflow.shape[0]}"
            )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "inflow", inflow)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def row(self, from_state: str) -> np.ndarray:
        """Transition probabilities out of an enrolled state, in state order."""
        try:
            i = self.space.enrolled.index(from_state)
        except ValueError:
            raise KeyError(f"no transition row for state {from_state!r}") from None
        return self.matrix[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionModel):
            return NotImplemented
        return (
            self.space == other.space
            and np.array_equal(self.matrix, other.matrix)
            and np.array_equal(self.inflow, other.inflow)
            and dict(self.meta) == dict(other.meta)
        )


def validate_model(model: TransitionModel) -> list[str]:
    """Check the row-stochastic contract; violations are data, not failures.

    Returns one message per violated invariant (with row/column coordinates);
    an empty list means the model is valid. Shape mismatches are rejected at
    construction and cannot reach this function.
    """
    violations: list[str] = []
    for i, prob_row in enumerate(model.matrix):
        for j, p in enumerate(prob_row):
            if not np.isfinite(p) or p < 0.0 or p > 1.0:
                violations.append(f"entry ({i}, {j}) is {p!r}, outside [0, 1]")
        row_sum = float(prob_row.sum())
        if not np.isfinite(row_sum) or abs(row_sum - 1.0) > ROW_SUM_TOL:
            violations.append(f"row {i} sums to {row_sum:.12g}")
    for i, x in enumerate(model.inflow):
        if not np.isfinite(x) or x < 0.0:
            violations.append(f"inflow[{i}] is {x!r}, must be finite and >= 0")
    return violations
