"""Reconstruct per-student stage trajectories from longitudinal snapshots.

Observed roster cells are kept verbatim. Missing cells are synthesized so
every trajectory covers consecutive terms from first appearance to either a
terminal absorbing state or the final observed term (right-censored):

* a gap (absent at term t, present at some later term) is filled with the
  stop-out state — historical reconstruction may look ahead;
* a student absent after their last observed term is assigned the departed
  state at last+1, unless their last observed state is already absorbing;
* students present in the final snapshot get no synthesized terminal state,
  so the data boundary does not inflate outflow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .domain import EnrollmentSnapshot, StateSpace, TermId

DEFAULT_STOP_OUT = "StopOut"
DEFAULT_DEPARTED = "Departed"


@dataclass(frozen=True)
class TrajectoryPoint:
    term: TermId
    state: str
    observed: bool  # False for synthesized stop-out gaps and departure terms


@dataclass(frozen=True)
class Trajectory:
    """One student's state per consecutive term, first appearance to exit."""

    student_id: str
    path: tuple[TrajectoryPoint, ...]

    @property
    def first_index(self) -> int:
        return self.path[0].term.index

    @property
    def last_index(self) -> int:
        return self.path[-1].term.index

    def state_at(self, term_index: int) -> str | None:
        offset = term_index - self.first_index
        if 0 <= offset < len(self.path):
            return self.path[offset].state
        return None


def build_trajectories(
    snapshots: list[EnrollmentSnapshot],
    space: StateSpace,
    *,
    stop_out_state: str = DEFAULT_STOP_OUT,
    departed_state: str = DEFAULT_DEPARTED,
) -> list[Trajectory]:
    """Reconstruct trajectories; snapshots must have consecutive term indices."""
    if not snapshots:
        return []
    ordered = sorted(snapshots, key=lambda s: s.term.index)
    indices = [s.term.index for s in ordered]
    first_term, final_term = indices[0], indices[-1]
    if indices != list(range(first_term, final_term + 1)):
        raise ValueError(f"snapshot term indices must be consecutive, got {indices}")
    terms = {s.term.index: s.term for s in ordered}

    observations: dict[str, dict[int, str]] = {}
    for snapshot in ordered:
        for student_id, state in snapshot.roster.items():
            observations.setdefault(student_id, {})[snapshot.term.index] = state

    trajectories = []
    for student_id in sorted(observations):
        seen = observations[student_id]
        first, last = min(seen), max(seen)
        for term_index in sorted(seen):
            if term_index != last and space.is_absorbing(seen[term_index]):
                raise ValueError(
                    f"student '{student_id}' reappears after absorbing state "
                    f"'{seen[term_index]}' at term {term_index}"
                )

        points = []
        for term_index in range(first, last + 1):
            if term_index in seen:
                points.append(TrajectoryPoint(terms[term_index], seen[term_index], observed=True))
            else:
                _require_state(space, stop_out_state, "stop-out")
                points.append(TrajectoryPoint(terms[term_index], stop_out_state, observed=False))

        last_state = seen[last]
        if last < final_term and not space.is_absorbing(last_state):
            _require_state(space, departed_state, "departed")
            points.append(TrajectoryPoint(terms[last + 1], departed_state, observed=False))

        trajectories.append(Trajectory(student_id=student_id, path=tuple(points)))
    return trajectories


def _require_state(space: StateSpace, label: str, role: str) -> None:
    if label not in space:
        raise ValueError(f"state space has no {role} state {label!r} needed to fill this trajectory")


def to_rosters(trajectories: list[Trajectory], observed_only: bool = True) -> dict[int, dict[str, str]]:
    """Project trajectories back to per-term rosters (synthesized cells dropped by default)."""
    rosters: dict[int, dict[str, str]] = {}
    for trajectory in trajectories:
        for point in trajectory.path:
            if observed_only and not point.observed:
                continue
            rosters.setdefault(point.term.index, {})[trajectory.student_id] = point.state
    return rosters
