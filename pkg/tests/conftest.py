import numpy as np
import pytest

from cohortflow import StateSpace, StateVector, TransitionModel

# The worked three-stage example used across the suite: all outflow columns
# zero, so total headcount is conserved under projection.
THREE_STAGE_ROWS = [
    [0.7, 0.2, 0.1],
    [0.1, 0.6, 0.3],
    [0.3, 0.3, 0.4],
]


@pytest.fixture
def three_stage_space() -> StateSpace:
    return StateSpace(
        states=("Freshman", "Sophomore", "Junior", "Departed"),
        enrolled=("Freshman", "Sophomore", "Junior"),
        absorbing=("Departed",),
    )


@pytest.fixture
def three_stage_model(three_stage_space) -> TransitionModel:
    matrix = np.hstack([np.array(THREE_STAGE_ROWS), np.zeros((3, 1))])
    return TransitionModel(space=three_stage_space, matrix=matrix, inflow=[0.0, 0.0, 0.0])


@pytest.fixture
def hundreds(three_stage_space) -> StateVector:
    return StateVector(three_stage_space, [100.0, 100.0, 100.0])
