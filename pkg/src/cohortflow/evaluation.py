"""Backtesting and projection-accuracy metrics.

The headline metric is the signed percentage difference between actual and
projected totals, (actual - projected) / projected * 100; its signed mean
across periods is the bias and the mean of its absolute values summarizes
overall accuracy. Values are exact floats; rounding to two decimals happens
only when a report is rendered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .domain import EnrollmentSnapshot, StateSpace, StateVector, TransitionModel
from .estimation import FitConfig, fit
from .forecast import project


def difference_pct(projected: float, actual: float) -> float:
    """Signed percentage deviation of the actual total from the projection."""
    if projected <= 0.0:
        raise ValueError(f"projected total must be > 0, got {projected}")
    return (actual - projected) / projected * 100.0


def bias_pct(differences: Sequence[float]) -> float:
    """Signed mean of per-period differences; systematic over/under-projection."""
    if len(differences) == 0:
        raise ValueError("need at least one difference")
    return float(sum(differences)) / len(differences)


def mean_abs_difference_pct(differences: Sequence[float]) -> float:
    """Mean magnitude of per-period differences."""
    if len(differences) == 0:
        raise ValueError("need at least one difference")
    return float(sum(abs(d) for d in differences)) / len(differences)


@dataclass(frozen=True)
class ReportRow:
    period: str
    projected: float
    actual: float
    difference_pct: float
    by_state: Mapping[str, tuple[float, float]] | None = None  # state -> (projected, actual)


@dataclass(frozen=True)
class EvaluationReport:
    """Projected vs. actual totals per held-out period, with summary metrics."""

    rows: tuple[ReportRow, ...]
    bias_pct: float
    mean_abs_difference_pct: float

    def to_dict(self) -> dict:
        doc: dict = {
            "rows": [
                {
                    "period": row.period,
                    "projected": row.projected,
                    "actual": row.actual,
                    "difference_pct": row.difference_pct,
                }
                for row in self.rows
            ],
            "bias_pct": self.bias_pct,
            "mean_abs_difference_pct": self.mean_abs_difference_pct,
        }
        if any(row.by_state is not None for row in self.rows):
            for entry, row in zip(doc["rows"], self.rows):
                if row.by_state is not None:
                    entry["by_state"] = {
                        state: {"projected": p, "actual": a} for state, (p, a) in row.by_state.items()
                    }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        """Aligned table: Year / Projected / Actual / Difference (%)."""
        header = ("Year", "Projected", "Actual", "Difference (%)")

        def pct(x: float) -> str:
            return f"{round(x, 2) + 0.0:.2f}"  # avoid a '-0.00' from float dust

        cells = [
            (row.period, f"{row.projected:,.0f}", f"{row.actual:,.0f}", pct(row.difference_pct))
            for row in self.rows
        ]
        widths = [max(len(header[c]), *(len(r[c]) for r in cells)) if cells else len(header[c]) for c in range(4)]
        lines = [
            "  ".join(h.ljust(w) if c == 0 else h.rjust(w) for c, (h, w) in enumerate(zip(header, widths))),
            "  ".join("-" * w for w in widths),
        ]
        for row_cells in cells:
            lines.append(
                "  ".join(
                    cell.ljust(w) if c == 0 else cell.rjust(w)
                    for c, (cell, w) in enumerate(zip(row_cells, widths))
                )
            )
        lines.append("")
        lines.append(f"Bias (%): {pct(self.bias_pct)}")
        lines.append(f"Mean |difference| (%): {pct(self.mean_abs_difference_pct)}")
        return "\n".join(lines) + "\n"


def _counted_total(vector_by_state: Mapping[str, float], counted: Sequence[str]) -> float:
    return float(sum(vector_by_state.get(state, 0.0) for state in counted))


def backtest(
    snapshots: Sequence[EnrollmentSnapshot],
    space: StateSpace,
    train_through: int,
    horizon: int,
    config: FitConfig = FitConfig(),
    model: TransitionModel | None = None,
    count_stop_out: bool = False,
    per_state: bool = False,
) -> EvaluationReport:
    """Chronological-split evaluation of the projection pipeline.

    Fits on snapshots up to and including term ``train_through`` (or uses the
    supplied ``model`` directly), projects ``horizon`` terms from that term's
    roster, and scores each projected total against the held-out snapshot's
    enrolled headcount. Stop-out students count toward totals only when
    ``count_stop_out`` is set; "enrollment" conventionally means actively
    enrolled.
    """
    ordered = sorted(snapshots, key=lambda s: s.term.index)
    by_index = {s.term.index: s for s in ordered}
    if train_through not in by_index:
        raise ValueError(f"train_through term {train_through} is not covered by the data")
    held_out = [by_index.get(train_through + k) for k in range(1, horizon + 1)]
    if any(s is None for s in held_out):
        available = sum(s is not None for s in held_out)
        raise ValueError(
            f"insufficient held-out terms: horizon {horizon} needs terms through "
            f"{train_through + horizon}, data has {available} after the split"
        )

    training = [s for s in ordered if s.term.index <= train_through]
    if model is None:
        model = fit(training, space, config)

    counted = [
        state
        for state in space.enrolled
        if count_stop_out or state != config.stop_out_state
    ]

    v0 = StateVector.from_roster(space, by_index[train_through].roster)
    projection = project(v0, model, horizon)

    rows = []
    differences = []
    for k, snapshot in enumerate(held_out, start=1):
        assert snapshot is not None
        projected_by_state = projection.points[k].vector.as_dict()
        actual_by_state = StateVector.from_roster(space, snapshot.roster).as_dict()
        projected_total = _counted_total(projected_by_state, counted)
        actual_total = _counted_total(actual_by_state, counted)
        diff = difference_pct(projected_total, actual_total)
        differences.append(diff)
        rows.append(
            ReportRow(
                period=snapshot.term.label,
                projected=projected_total,
                actual=actual_total,
                difference_pct=diff,
                by_state={
                    state: (projected_by_state[state], actual_by_state[state]) for state in counted
                }
                if per_state
                else None,
            )
        )

    return EvaluationReport(
        rows=tuple(rows),
        bias_pct=bias_pct(differences),
        mean_abs_difference_pct=mean_abs_difference_pct(differences),
    )
