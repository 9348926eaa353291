"""Seeded synthetic snapshot generator.

Simulates individual students through a known transition model so estimation
can be checked against ground truth: with enough students the re-estimated
matrix must converge to the generating one. Output is bit-reproducible for a
fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import EnrollmentSnapshot, StateVector, TermId, TransitionModel, validate_model

INFLOW_MODES = ("fixed", "stochastic")


@dataclass(frozen=True)
class SyntheticConfig:
    """Configuration for one synthetic world.

    ``inflow_mode`` controls how the model's expected per-term inflow becomes
    whole entrants: "fixed" rounds to the nearest integer every term;
    "stochastic" rounds randomly so the expectation is preserved exactly
    (floor plus a Bernoulli draw on the fractional part).
    """

    true_model: TransitionModel
    initial_counts: StateVector
    n_terms: int
    inflow_mode: str = "fixed"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_terms < 2:
            raise ValueError(f"n_terms must be >= 2, got {self.n_terms}")
        if self.inflow_mode not in INFLOW_MODES:
            raise ValueError(f"inflow_mode must be one of {INFLOW_MODES}, got {self.inflow_mode!r}")
        if self.initial_counts.space != self.true_model.space:
            raise ValueError("initial_counts and true_model use different state spaces")


def generate_synthetic(cfg: SyntheticConfig) -> list[EnrollmentSnapshot]:
    """Simulate ``cfg.n_terms`` snapshots from the configured model."""
    violations = validate_model(cfg.true_model)
    if violations:
        raise ValueError("invalid model: " + "; ".join(violations))

    model = cfg.true_model
    space = model.space
    rng = np.random.default_rng(cfg.seed)
    next_serial = 1

    def new_students(n: int) -> list[str]:
        nonlocal next_serial
        ids = [f"s{serial:06d}" for serial in range(next_serial, next_serial + n)]
        next_serial += n
        return ids

    # Enrolled-state index per active student; absorbing students drop out
    # of this map after their terminal snapshot row.
    active: dict[str, int] = {}
    for enrolled_pos, label in enumerate(space.enrolled):
        for student_id in new_students(int(np.rint(cfg.initial_counts.counts[enrolled_pos]))):
            active[student_id] = enrolled_pos

    snapshots = [
        EnrollmentSnapshot(
            term=TermId(index=0, label="T0"),
            roster={sid: space.enrolled[pos] for sid, pos in active.items()},
        )
    ]

    for term_index in range(1, cfg.n_terms):
        roster: dict[str, str] = {}
        survivors: dict[str, int] = {}

        by_state: dict[int, list[str]] = {}
        for student_id, enrolled_pos in active.items():
            by_state.setdefault(enrolled_pos, []).append(student_id)

        for enrolled_pos in sorted(by_state):
            students = sorted(by_state[enrolled_pos])
            draws = rng.multinomial(len(students), model.matrix[enrolled_pos])
            destinations = np.repeat(np.arange(space.n_states), draws)
            rng.shuffle(destinations)
            for student_id, state_col in zip(students, destinations):
                label = space.states[state_col]
                roster[student_id] = label
                if space.is_enrolled(label):
                    survivors[student_id] = space.enrolled.index(label)

        for enrolled_pos, label in enumerate(space.enrolled):
            expected = float(model.inflow[enrolled_pos])
            if cfg.inflow_mode == "fixed":
                entrants = int(np.rint(expected))
            else:
                whole = int(np.floor(expected))
                entrants = whole + int(rng.random() < expected - whole)
            for student_id in new_students(entrants):
                roster[student_id] = label
                survivors[student_id] = enrolled_pos

        snapshots.append(
            EnrollmentSnapshot(term=TermId(index=term_index, label=f"T{term_index}"), roster=roster)
        )
        active = survivors

    return snapshots
