"""Cohort projection toolkit.

Estimates stage-transition probabilities from longitudinal enrollment
snapshots, projects future headcounts with explicit inflow/outflow
accounting, supports what-if scenario analysis, and backtests projections
against held-out terms.
"""

from .domain import (
    DEFAULT_ABSORBING,
    DEFAULT_ENROLLED,
    ROW_SUM_TOL,
    EnrollmentSnapshot,
    StateSpace,
    StateVector,
    TermId,
    TransitionModel,
    default_space,
    state_index,
    validate_model,
)
from .estimation import (
    FitConfig,
    TransitionCounts,
    count_transitions,
    estimate_inflow,
    estimate_matrix,
    fit,
    pool_counts,
)
from .evaluation import (
    EvaluationReport,
    ReportRow,
    backtest,
    bias_pct,
    difference_pct,
    mean_abs_difference_pct,
)
from .forecast import (
    CellOverride,
    Projection,
    ScenarioError,
    ScenarioSpec,
    StepDelta,
    StepFlows,
    apply_scenario,
    compare,
    project,
    scenario_from_dict,
    step,
)
from .io import (
    ModelFormatError,
    SnapshotParseError,
    model_from_dict,
    model_to_dict,
    parse_snapshot_csv,
    read_model,
    write_model,
    write_snapshot_csv,
)
from .synthetic import SyntheticConfig, generate_synthetic
from .trajectories import Trajectory, TrajectoryPoint, build_trajectories

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ABSORBING",
    "DEFAULT_ENROLLED",
    "ROW_SUM_TOL",
    "CellOverride",
    "EnrollmentSnapshot",
    "EvaluationReport",
    "FitConfig",
    "ModelFormatError",
    "Projection",
    "ReportRow",
    "ScenarioError",
    "ScenarioSpec",
    "SnapshotParseError",
    "StateSpace",
    "StateVector",
    "StepDelta",
    "StepFlows",
    "SyntheticConfig",
    "TermId",
    "Trajectory",
    "TrajectoryPoint",
    "TransitionCounts",
    "TransitionModel",
    "apply_scenario",
    "backtest",
    "bias_pct",
    "build_trajectories",
    "compare",
    "count_transitions",
    "default_space",
    "difference_pct",
    "estimate_inflow",
    "estimate_matrix",
    "fit",
    "generate_synthetic",
    "mean_abs_difference_pct",
    "model_from_dict",
    "model_to_dict",
    "parse_snapshot_csv",
    "pool_counts",
    "project",
    "read_model",
    "scenario_from_dict",
    "state_index",
    "step",
    "validate_model",
    "write_model",
    "write_snapshot_csv",
]
