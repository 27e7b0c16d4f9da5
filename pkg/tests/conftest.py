import numpy as np
import pytest

from thermofoot.data import synthesize_dataset
from thermofoot.features import build_feature_table


@pytest.fixture(scope="session")
def small_subjects():
    return synthesize_dataset(8, 12, separation=3.0, seed=3)


@pytest.fixture(scope="session")
def small_table(small_subjects):
    return build_feature_table(small_subjects)


@pytest.fixture(scope="session")
def desk_table():
    return build_feature_table(synthesize_dataset(45, 122, separation=3.0, seed=7))


def uniform_map(value, shape=(10, 10), side="left"):
    from thermofoot.data import ThermalMap

    return ThermalMap(np.full(shape, float(value)), side)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
