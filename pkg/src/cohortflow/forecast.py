"""Headcount projection by iterated matrix application.

One step multiplies the current enrolled headcount vector by the transition
matrix, books the mass landing in absorbing columns as outflow, then adds the
expected inflow of new entrants (entrants do not transition in their arrival
term). Every step satisfies the flow accounting identity

    total_next = total + inflow_total - outflow_total

to within 1e-9 * (1 + total). Scenario overrides pin individual transition
probabilities and rescale the untouched cells of each edited row
proportionally, so edited rows remain row-stochastic.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .domain import ROW_SUM_TOL, StateVector, TransitionModel, validate_model

#: Upper bound on projection horizons; far beyond any planning use.
MAX_HORIZON = 1000


class ScenarioError(ValueError):
    """Scenario overrides that cannot be applied to the model."""


@dataclass(frozen=True)
class StepFlows:
    """Persons entering (inflow) and leaving (outflow) during one step."""

    inflow_total: float
    per_absorbing: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_absorbing", MappingProxyType(dict(self.per_absorbing)))

    @property
    def outflow_total(self) -> float:
        return float(sum(self.per_absorbing.values()))


@dataclass(frozen=True)
class ProjectionPoint:
    step: int
    vector: StateVector
    flows: StepFlows


@dataclass(frozen=True)
class Projection:
    """Projected headcounts over a horizon; point 0 is the initial vector."""

    points: tuple[ProjectionPoint, ...]

    @property
    def horizon(self) -> int:
        return len(self.points) - 1

    @property
    def space(self):
        return self.points[0].vector.space


def step(v: StateVector, model: TransitionModel) -> tuple[StateVector, StepFlows]:
    """Advance one term: next = v @ P (enrolled columns) + inflow."""
    if v.space != model.space:
        raise ValueError("state vector and model use different state spaces")
    space = model.space
    landed = v.counts @ model.matrix  # expected mass per state column
    next_counts = landed[space.enrolled_columns] + model.inflow
    per_absorbing = {
        label: float(landed[col]) for label, col in zip(space.absorbing, space.absorbing_columns)
    }
    flows = StepFlows(inflow_total=float(model.inflow.sum()), per_absorbing=per_absorbing)
    return StateVector(space, next_counts), flows


def project(v0: StateVector, model: TransitionModel, horizon: int) -> Projection:
    """Iterate ``step`` for ``horizon`` terms starting from ``v0``."""
    if not 1 <= horizon <= MAX_HORIZON:
        raise ValueError(f"horizon must be between 1 and {MAX_HORIZON}, got {horizon}")
    points = [ProjectionPoint(0, v0, StepFlows(0.0, {label: 0.0 for label in model.space.absorbing}))]
    current = v0
    for k in range(1, horizon + 1):
        current, flows = step(current, model)
        points.append(ProjectionPoint(k, current, flows))
    return Projection(points=tuple(points))


@dataclass(frozen=True)
class CellOverride:
    from_state: str
    to_state: str
    probability: float


@dataclass(frozen=True)
class ScenarioSpec:
    """What-if edits: pinned transition cells and/or adjusted inflow.

    ``inflow_absolute`` replaces named states' inflow; ``inflow_multiplier``
    scales the whole inflow vector; they are mutually exclusive. ``horizon``
    is optional here because callers may carry the horizon separately.
    """

    cell_overrides: tuple[CellOverride, ...] = ()
    inflow_absolute: Mapping[str, float] | None = None
    inflow_multiplier: float | None = None
    horizon: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cell_overrides", tuple(self.cell_overrides))
        if self.inflow_absolute is not None and self.inflow_multiplier is not None:
            raise ScenarioError("give per-state absolute inflow or a global multiplier, not both")
        if self.inflow_multiplier is not None and self.inflow_multiplier < 0.0:
            raise ScenarioError(f"inflow multiplier must be >= 0, got {self.inflow_multiplier}")
        if self.inflow_absolute is not None:
            for state, value in self.inflow_absolute.items():
                if value < 0.0:
                    raise ScenarioError(f"inflow for '{state}' must be >= 0, got {value}")
            object.__setattr__(self, "inflow_absolute", MappingProxyType(dict(self.inflow_absolute)))
        if self.horizon is not None and self.horizon < 1:
            raise ScenarioError(f"horizon must be >= 1, got {self.horizon}")

        row_sums: dict[str, float] = {}
        seen: set[tuple[str, str]] = set()
        for override in self.cell_overrides:
            if not 0.0 <= override.probability <= 1.0:
                raise ScenarioError(
                    f"override for '{override.from_state}' -> '{override.to_state}' "
                    f"must be in [0, 1], got {override.probability}"
                )
            cell = (override.from_state, override.to_state)
            if cell in seen:
                raise ScenarioError(
                    f"duplicate override for '{override.from_state}' -> '{override.to_state}'"
                )
            seen.add(cell)
            row_sums[override.from_state] = row_sums.get(override.from_state, 0.0) + override.probability
        for from_state, total in row_sums.items():
            if total > 1.0 + 1e-12:
                raise ScenarioError(f"overrides for row '{from_state}' sum to {total:.12g}")

    @property
    def is_identity(self) -> bool:
        return (
            not self.cell_overrides
            and self.inflow_absolute is None
            and self.inflow_multiplier is None
        )


def scenario_from_dict(doc: object) -> ScenarioSpec:
    """Build a ScenarioSpec from its JSON object form.

    Structural problems (wrong types, unknown keys) raise ValueError;
    violations of the scenario invariants raise ScenarioError.
    """
    if not isinstance(doc, dict):
        raise ValueError("scenario must be a JSON object")
    known = {"cell_overrides", "inflow_absolute", "inflow_multiplier", "horizon"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown scenario field {sorted(unknown)[0]!r}")

    overrides = []
    raw_overrides = doc.get("cell_overrides", [])
    if not isinstance(raw_overrides, list):
        raise ValueError("cell_overrides must be an array")
    for entry in raw_overrides:
        if not isinstance(entry, dict) or set(entry) != {"from_state", "to_state", "probability"}:
            raise ValueError(
                "each cell override must be an object with from_state, to_state, probability"
            )
        try:
            probability = float(entry["probability"])
        except (TypeError, ValueError):
            raise ValueError("override probability must be a number") from None
        overrides.append(CellOverride(str(entry["from_state"]), str(entry["to_state"]), probability))

    absolute = doc.get("inflow_absolute")
    if absolute is not None:
        if not isinstance(absolute, dict):
            raise ValueError("inflow_absolute must be an object mapping state label to number")
        absolute = {str(k): float(v) for k, v in absolute.items()}
    multiplier = doc.get("inflow_multiplier")
    if multiplier is not None:
        multiplier = float(multiplier)
    horizon = doc.get("horizon")
    if horizon is not None:
        if not isinstance(horizon, int) or isinstance(horizon, bool):
            raise ValueError("horizon must be an integer")

    return ScenarioSpec(
        cell_overrides=tuple(overrides),
        inflow_absolute=absolute,
        inflow_multiplier=multiplier,
        horizon=horizon,
    )


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    doc: dict = {
        "cell_overrides": [
            {"from_state": o.from_state, "to_state": o.to_state, "probability": o.probability}
            for o in spec.cell_overrides
        ]
    }
    if spec.inflow_absolute is not None:
        doc["inflow_absolute"] = dict(spec.inflow_absolute)
    if spec.inflow_multiplier is not None:
        doc["inflow_multiplier"] = spec.inflow_multiplier
    if spec.horizon is not None:
        doc["horizon"] = spec.horizon
    return doc


def apply_scenario(model: TransitionModel, spec: ScenarioSpec) -> TransitionModel:
    """Return a new model with overrides applied and edited rows renormalized.

    Non-overridden cells of an edited row are scaled by the remaining
    probability mass, preserving their relative structure; if they previously
    held zero mass, the residual is spread uniformly across them.
    """
    space = model.space
    by_row: dict[str, dict[int, float]] = {}
    for override in spec.cell_overrides:
        if override.from_state not in space:
            raise ScenarioError(f"unknown state '{override.from_state}'")
        if override.from_state not in space.enrolled:
            raise ScenarioError(f"no transition row for absorbing state '{override.from_state}'")
        if override.to_state not in space:
            raise ScenarioError(f"unknown state '{override.to_state}'")
        by_row.setdefault(override.from_state, {})[space.index(override.to_state)] = override.probability

    matrix = np.array(model.matrix)
    for from_state, cells in by_row.items():
        i = space.enrolled.index(from_state)
        overridden = np.array(sorted(cells), dtype=int)
        pinned = np.array([cells[j] for j in sorted(cells)])
        others = np.setdiff1d(np.arange(space.n_states), overridden)
        residual = 1.0 - float(pinned.sum())
        remaining_mass = float(matrix[i, others].sum()) if others.size else 0.0
        if others.size == 0:
            if abs(residual) > ROW_SUM_TOL:
                raise ScenarioError(
                    f"overrides for row '{from_state}' cover every state but sum to {pinned.sum():.12g}"
                )
        elif remaining_mass > 0.0:
            matrix[i, others] *= residual / remaining_mass
        else:
            matrix[i, others] = residual / others.size
        matrix[i, overridden] = pinned
        np.clip(matrix[i], 0.0, 1.0, out=matrix[i])  # shave float dust at the bounds

    inflow = np.array(model.inflow)
    if spec.inflow_multiplier is not None:
        inflow *= spec.inflow_multiplier
    elif spec.inflow_absolute is not None:
        for state, value in spec.inflow_absolute.items():
            if state not in space:
                raise ScenarioError(f"unknown state '{state}'")
            if state not in space.enrolled:
                raise ScenarioError(f"inflow target '{state}' is not an enrolled state")
            inflow[space.enrolled.index(state)] = value

    edited = TransitionModel(space=space, matrix=matrix, inflow=inflow, meta=dict(model.meta))
    violations = validate_model(edited)
    if violations:  # renormalization must keep the model valid
        raise RuntimeError("scenario produced an invalid model: " + "; ".join(violations))
    return edited


@dataclass(frozen=True)
class StepDelta:
    step: int
    by_state: Mapping[str, float]
    total: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "by_state", MappingProxyType(dict(self.by_state)))


def compare(baseline: Projection, scenario: Projection) -> tuple[StepDelta, ...]:
    """Per-step scenario-minus-baseline differences, per state and in total."""
    if baseline.horizon != scenario.horizon:
        raise ValueError(
            f"horizon mismatch: baseline {baseline.horizon} vs scenario {scenario.horizon}"
        )
    if baseline.space != scenario.space:
        raise ValueError("projections use different state spaces")
    deltas = []
    for base_point, scen_point in zip(baseline.points, scenario.points):
        diff = scen_point.vector.counts - base_point.vector.counts
        deltas.append(
            StepDelta(
                step=base_point.step,
                by_state={label: float(d) for label, d in zip(baseline.space.enrolled, diff)},
                total=scen_point.vector.total - base_point.vector.total,
            )
        )
    return tuple(deltas)


def projection_to_dict(projection: Projection) -> dict:
    """JSON form shared by the CLI writers and the HTTP service."""
    return {
        "horizon": projection.horizon,
        "points": [
            {
                "step": point.step,
                "counts": point.vector.as_dict(),
                "total": point.vector.total,
                "flows": {
                    "inflow_total": point.flows.inflow_total,
                    "outflow_total": point.flows.outflow_total,
                    "per_absorbing": dict(point.flows.per_absorbing),
                },
            }
            for point in projection.points
        ],
    }


def deltas_to_dicts(deltas: Sequence[StepDelta]) -> list[dict]:
    return [
        {"step": d.step, "by_state": dict(d.by_state), "total": d.total} for d in deltas
    ]
