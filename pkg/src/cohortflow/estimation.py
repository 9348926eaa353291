"""Transition-probability estimation from reconstructed trajectories.

Counting is per consecutive term pair; counts from multiple historical pairs
are pooled (uniform by default, optionally weighted or exponentially decayed
toward recency) before row normalization, so the matrix can draw on more
history than a single pair. Laplace smoothing is opt-in via ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from .domain import EnrollmentSnapshot, StateSpace, TermId, TransitionModel, validate_model
from .trajectories import DEFAULT_DEPARTED, DEFAULT_STOP_OUT, Trajectory, build_trajectories

INFLOW_POLICIES = ("mean", "weighted-mean", "last")


@dataclass(frozen=True)
class TransitionCounts:
    """Observed movements for one term pair.

    ``counts[i][j]`` is the number of students in enrolled state i at the
    from-term observed in state j at the to-term; the row total equals the
    from-term headcount of state i minus right-censored students.
    ``inflow_counts`` tallies students whose first appearance is the to-term.
    """

    term_pair: tuple[TermId, TermId]
    counts: np.ndarray
    inflow_counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        inflow = np.asarray(self.inflow_counts, dtype=np.int64)
        counts.setflags(write=False)
        inflow.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "inflow_counts", inflow)

    @property
    def empty(self) -> bool:
        """True when the pair contributed no transitions and no entrants."""
        return int(self.counts.sum()) == 0 and int(self.inflow_counts.sum()) == 0


def count_transitions(
    trajectories: Sequence[Trajectory],
    term_pair: tuple[TermId, TermId],
    space: StateSpace,
) -> TransitionCounts:
    """Tally state-to-state movements and new entrants for one consecutive pair."""
    from_term, to_term = term_pair
    if to_term.index != from_term.index + 1:
        raise ValueError(
            f"term pair must be consecutive, got indices {from_term.index} and {to_term.index}"
        )
    counts = np.zeros((space.n_enrolled, space.n_states), dtype=np.int64)
    inflow = np.zeros(space.n_enrolled, dtype=np.int64)
    enrolled_row = {label: i for i, label in enumerate(space.enrolled)}

    for trajectory in trajectories:
        state_from = trajectory.state_at(from_term.index)
        state_to = trajectory.state_at(to_term.index)
        if state_from is not None and state_to is not None:
            row = enrolled_row.get(state_from)
            if row is not None:
                counts[row, space.index(state_to)] += 1
        elif state_to is not None and trajectory.first_index == to_term.index:
            row = enrolled_row.get(state_to)
            if row is not None:  # entrants straight into an absorbing state are not inflow
                inflow[row] += 1

    return TransitionCounts(term_pair=term_pair, counts=counts, inflow_counts=inflow)


def pool_counts(per_pair: Sequence[TransitionCounts], weights: Sequence[float]) -> np.ndarray:
    """Weighted element-wise sum of per-pair counts; uniform weights = plain sum."""
    if len(per_pair) != len(weights):
        raise ValueError(f"got {len(per_pair)} count sets but {len(weights)} weights")
    if not per_pair:
        raise ValueError("nothing to pool: no term pairs")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("pooling weights must be finite and >= 0")
    if not np.any(w > 0.0):
        raise ValueError("pooling weights must not be all zero")
    pooled = np.zeros(per_pair[0].counts.shape, dtype=float)
    for weight, pair in zip(w, per_pair):
        pooled += weight * pair.counts
    return pooled


def estimate_matrix(
    pooled: np.ndarray, alpha: float, space: StateSpace
) -> tuple[np.ndarray, list[str]]:
    """Row-normalize pooled counts with Laplace smoothing ``alpha``.

    With alpha=0, rows are exact empirical frequencies; a zero-observation row
    becomes a self-loop and is reported in the returned diagnostics rather
    than raising, so sparse data still yields a usable model.
    """
    pooled = np.asarray(pooled, dtype=float)
    if pooled.shape != (space.n_enrolled, space.n_states):
        raise ValueError(
            f"pooled counts must be {space.n_enrolled} x {space.n_states}, got {pooled.shape}"
        )
    if np.any(pooled < 0.0):
        raise ValueError("pooled counts must be >= 0")
    if alpha < 0.0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")

    matrix = np.zeros_like(pooled)
    diagnostics: list[str] = []
    for i, label in enumerate(space.enrolled):
        row_total = float(pooled[i].sum())
        denominator = row_total + alpha * space.n_states
        if denominator > 0.0:
            matrix[i] = (pooled[i] + alpha) / denominator
        else:
            matrix[i, space.index(label)] = 1.0
            diagnostics.append(f"row '{label}' had no observations; assigned self-loop")
    matrix.setflags(write=False)
    return matrix, diagnostics


def estimate_inflow(
    per_pair_inflows: Sequence[Sequence[float]],
    policy: str = "mean",
    weights: Sequence[float] | None = None,
) -> np.ndarray:
    """Combine per-pair entrant counts into one expected inflow vector."""
    if len(per_pair_inflows) == 0:
        raise ValueError("need at least one term pair to estimate inflow")
    if policy not in INFLOW_POLICIES:
        raise ValueError(f"inflow policy must be one of {INFLOW_POLICIES}, got {policy!r}")
    stacked = np.asarray(per_pair_inflows, dtype=float)
    if policy == "mean":
        return stacked.mean(axis=0)
    if policy == "last":
        return stacked[-1].astype(float)
    if weights is None:
        raise ValueError("weighted-mean inflow policy requires weights")
    w = np.asarray(weights, dtype=float)
    if len(w) != len(stacked):
        raise ValueError(f"got {len(stacked)} inflow sets but {len(w)} weights")
    return (w[:, None] * stacked).sum(axis=0) / w.sum()


@dataclass(frozen=True)
class FitConfig:
    """Estimation settings.

    ``weights`` (one per term pair, chronological) and ``decay`` are mutually
    exclusive; decay d assigns weight d**age where age counts pairs back from
    the most recent one, so d=1 reduces to uniform pooling. ``term_type``
    restricts counting to pairs whose from-term carries that tag.
    """

    alpha: float = 0.0
    weights: tuple[float, ...] | None = None
    decay: float | None = None
    inflow_policy: str = "mean"
    term_type: str | None = None
    stop_out_state: str = DEFAULT_STOP_OUT
    departed_state: str = DEFAULT_DEPARTED

    def __post_init__(self) -> None:
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.weights is not None and self.decay is not None:
            raise ValueError("give explicit weights or a decay factor, not both")
        if self.decay is not None and self.decay <= 0.0:
            raise ValueError(f"decay must be > 0, got {self.decay}")
        if self.inflow_policy not in INFLOW_POLICIES:
            raise ValueError(
                f"inflow policy must be one of {INFLOW_POLICIES}, got {self.inflow_policy!r}"
            )
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


def fit(
    snapshots: Sequence[EnrollmentSnapshot],
    space: StateSpace,
    config: FitConfig = FitConfig(),
) -> TransitionModel:
    """Estimate a validated TransitionModel from longitudinal snapshots.

    Pipeline: reconstruct trajectories, count each consecutive term pair
    (optionally filtered by the from-term's type tag), pool, normalize, and
    estimate inflow. Provenance (pairs used, weights, alpha, diagnostics)
    lands in the model's meta.
    """
    ordered = sorted(snapshots, key=lambda s: s.term.index)
    if len(ordered) < 2:
        raise ValueError(f"need at least 2 snapshots to fit, got {len(ordered)}")

    trajectories = build_trajectories(
        list(ordered),
        space,
        stop_out_state=config.stop_out_state,
        departed_state=config.departed_state,
    )

    pairs = [
        (first.term, second.term)
        for first, second in zip(ordered, ordered[1:])
        if config.term_type is None
        or (first.term.term_type or "").lower() == config.term_type.lower()
    ]
    if not pairs:
        raise ValueError(f"no term pairs with from-term type {config.term_type!r}")

    per_pair = [count_transitions(trajectories, pair, space) for pair in pairs]

    if config.weights is not None:
        if len(config.weights) != len(per_pair):
            raise ValueError(f"got {len(per_pair)} term pairs but {len(config.weights)} weights")
        weights = list(config.weights)
    elif config.decay is not None:
        weights = [config.decay ** (len(per_pair) - 1 - k) for k in range(len(per_pair))]
    else:
        weights = [1.0] * len(per_pair)

    pooled = pool_counts(per_pair, weights)
    matrix, diagnostics = estimate_matrix(pooled, config.alpha, space)
    inflow = estimate_inflow(
        [pair.inflow_counts for pair in per_pair], config.inflow_policy, weights
    )

    meta = {
        "alpha": config.alpha,
        "term_pairs": [[pair[0].label, pair[1].label] for pair in pairs],
        "weights": weights,
        "inflow_policy": config.inflow_policy,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "diagnostics": diagnostics,
    }
    model = TransitionModel(space=space, matrix=matrix, inflow=inflow, meta=meta)
    violations = validate_model(model)
    if violations:  # estimation must always produce a valid model
        raise RuntimeError("fitted model failed validation: " + "; ".join(violations))
    return model
