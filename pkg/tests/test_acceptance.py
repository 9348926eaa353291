"""Acceptance gate: one test per release criterion, each printing a verdict line.

Run standalone with ``pytest tests/test_acceptance.py -s``.
"""

import contextlib

import numpy as np
import pytest

from cohortflow import (
    CellOverride,
    EnrollmentSnapshot,
    ScenarioSpec,
    StateSpace,
    StateVector,
    SyntheticConfig,
    TermId,
    TransitionModel,
    apply_scenario,
    backtest,
    build_trajectories,
    default_space,
    difference_pct,
    fit,
    generate_synthetic,
    project,
    validate_model,
)
from cohortflow.trajectories import to_rosters

THREE_STAGE_ROWS = np.array([[0.7, 0.2, 0.1], [0.1, 0.6, 0.3], [0.3, 0.3, 0.4]])


def three_stage_space():
    return StateSpace(
        states=("Freshman", "Sophomore", "Junior", "Departed"),
        enrolled=("Freshman", "Sophomore", "Junior"),
        absorbing=("Departed",),
    )


def three_stage_model(outflow: float = 0.0, inflow=(0.0, 0.0, 0.0)) -> TransitionModel:
    matrix = np.hstack([THREE_STAGE_ROWS * (1.0 - outflow), np.full((3, 1), outflow)])
    return TransitionModel(space=three_stage_space(), matrix=matrix, inflow=inflow)


@contextlib.contextmanager
def verdict(number: int, label: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL — {label}")
        raise
    print(f"ACCEPTANCE {number}: PASS — {label}")


def test_criterion_1_known_difference_fixtures():
    with verdict(1, "published difference fixtures exact to two decimals"):
        fixtures = [
            ((10000, 9850), -1.50),
            ((10500, 10480), -0.19),
            ((11000, 10990), -0.09),
            ((12000, 11950), -0.42),
        ]
        # the fifth published row is internally inconsistent and excluded
        for (projected, actual), expected in fixtures:
            assert round(difference_pct(projected, actual), 2) == expected


def test_criterion_2_worked_matrix_projection():
    with verdict(2, "worked-matrix projection steps 1 and 2 to 1e-9"):
        v0 = StateVector(three_stage_space(), [100.0, 100.0, 100.0])
        projection = project(v0, three_stage_model(), 2)
        step1 = projection.points[1].vector.counts
        step2 = projection.points[2].vector.counts
        assert np.abs(step1 - np.array([110.0, 110.0, 80.0])).max() <= 1e-9
        assert np.abs(step2 - np.array([112.0, 112.0, 76.0])).max() <= 1e-9


def test_criterion_3_accounting_identity_over_randomized_models():
    with verdict(3, "flow accounting identity on 1,000 randomized models"):
        rng = np.random.default_rng(20240901)
        for _ in range(1000):
            n_enrolled = int(rng.integers(1, 6))
            n_absorbing = int(rng.integers(1, 4))
            enrolled = tuple(f"E{i}" for i in range(n_enrolled))
            absorbing = tuple(f"X{i}" for i in range(n_absorbing))
            space = StateSpace(states=enrolled + absorbing, enrolled=enrolled, absorbing=absorbing)
            model = TransitionModel(
                space,
                rng.dirichlet(np.ones(space.n_states), size=n_enrolled),
                rng.uniform(0.0, 500.0, size=n_enrolled),
            )
            assert validate_model(model) == []
            v = StateVector(space, rng.uniform(0.0, 10000.0, size=n_enrolled))
            projection = project(v, model, int(rng.integers(1, 5)))
            for before, after in zip(projection.points, projection.points[1:]):
                lhs = after.vector.total
                rhs = before.vector.total + after.flows.inflow_total - after.flows.outflow_total
                assert abs(lhs - rhs) <= 1e-9 * (1.0 + before.vector.total)


def test_criterion_4_estimation_recovers_generating_matrix():
    with verdict(4, "matrix recovery from a 10,000-student synthetic world (Linf <= 0.02)"):
        truth = three_stage_model()
        cfg = SyntheticConfig(
            true_model=truth,
            initial_counts=StateVector(truth.space, [3334.0, 3333.0, 3333.0]),
            n_terms=2,
            seed=1,
        )
        snapshots = generate_synthetic(cfg)
        fitted = fit(snapshots, truth.space)
        linf = float(np.abs(fitted.matrix - truth.matrix).max())
        assert linf <= 0.02, f"Linf error {linf}"


def test_criterion_5_backtest_mean_abs_difference_below_one_percent():
    with verdict(5, "backtest on in-model synthetic world: mean |difference| < 1%"):
        world = three_stage_model(outflow=0.05, inflow=(600.0, 0.0, 0.0))
        cfg = SyntheticConfig(
            true_model=world,
            initial_counts=StateVector(world.space, [3334.0, 3333.0, 3333.0]),
            n_terms=8,
            seed=7,
        )
        snapshots = generate_synthetic(cfg)
        report = backtest(snapshots, world.space, train_through=4, horizon=3)
        assert report.mean_abs_difference_pct < 1.0, (
            f"mean |difference| {report.mean_abs_difference_pct}"
        )


def test_criterion_6_property_suites():
    with verdict(6, "row-stochasticity, exact renormalization, reconstruction round-trip"):
        rng = np.random.default_rng(607)

        # estimated matrices are always row-stochastic
        space = default_space()
        for _ in range(50):
            world = TransitionModel(
                space,
                rng.dirichlet(np.ones(space.n_states), size=space.n_enrolled),
                rng.uniform(0, 50, size=space.n_enrolled),
            )
            cfg = SyntheticConfig(
                true_model=world,
                initial_counts=StateVector(space, rng.integers(20, 100, size=space.n_enrolled).astype(float)),
                n_terms=4,
                seed=int(rng.integers(0, 2**32)),
            )
            fitted = fit(generate_synthetic(cfg), space)
            assert validate_model(fitted) == []

        # scenario renormalization keeps rows stochastic, and the reference
        # edit is exact to 1e-12
        reference = three_stage_model()
        spec = ScenarioSpec(cell_overrides=(CellOverride("Freshman", "Sophomore", 0.4),))
        edited = apply_scenario(reference, spec)
        assert np.abs(edited.matrix[0] - np.array([0.525, 0.4, 0.075, 0.0])).max() <= 1e-12
        for _ in range(200):
            model = TransitionModel(
                space,
                rng.dirichlet(np.ones(space.n_states), size=space.n_enrolled),
                np.zeros(space.n_enrolled),
            )
            from_state = space.enrolled[int(rng.integers(space.n_enrolled))]
            n_cells = int(rng.integers(1, space.n_states))
            targets = rng.choice(space.n_states, size=n_cells, replace=False)
            raw = rng.uniform(0, 1, size=n_cells)
            raw *= rng.uniform(0, 1) / max(float(raw.sum()), 1e-12)
            random_spec = ScenarioSpec(
                cell_overrides=tuple(
                    CellOverride(from_state, space.states[j], float(p))
                    for j, p in zip(targets, raw)
                )
            )
            assert validate_model(apply_scenario(model, random_spec)) == []

        # trajectory reconstruction projects back to the input rosters exactly
        snapshots = [
            EnrollmentSnapshot(term=TermId(index=0, label="T0"),
                               roster={"a": "Freshman", "b": "Senior", "d": "Junior"}),
            EnrollmentSnapshot(term=TermId(index=1, label="T1"),
                               roster={"a": "Sophomore", "c": "Freshman"}),
            EnrollmentSnapshot(term=TermId(index=2, label="T2"),
                               roster={"a": "Junior", "b": "Graduated", "c": "Sophomore"}),
        ]
        trajectories = build_trajectories(snapshots, space)
        assert to_rosters(trajectories, observed_only=True) == {
            s.term.index: dict(s.roster) for s in snapshots
        }
