import numpy as np
import pytest

from marchenko import (ScatteringData, build_y_evaluator, exponential_potential,
                       recover_with_residual, s_matrix_table)

MODEL_DEPTH, MODEL_RATE = 3.0, 1.5
MODEL_GRID = 8.0 * np.arange(1, 41) / 40

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def model_potential():
    return exponential_potential(MODEL_DEPTH, MODEL_RATE)


@pytest.fixture(scope="session")
def model_table(model_potential):
    return s_matrix_table(model_potential, MODEL_GRID)


@pytest.fixture(scope="session")
def model_data(model_table):
    return ScatteringData.from_table(model_table)


@pytest.fixture(scope="session")
def model_y(model_data):
    return build_y_evaluator(model_data)


@pytest.fixture(scope="session")
def model_coeffs(model_y):
    """Kernel coefficients and consistency residual for the model experiment, h = 0.04, R = 4."""
    return recover_with_residual(model_y, 0.04, 100)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
