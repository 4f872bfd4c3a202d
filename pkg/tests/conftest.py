import numpy as np
import pytest

from specframes import graphs, linalg


@pytest.fixture(scope="session")
def path64():
    return graphs.build_path(64)


@pytest.fixture(scope="session")
def comet64():
    return graphs.build_comet(64, 30)


@pytest.fixture(scope="session")
def sensor64():
    return graphs.build_sensor(64, seed=1)


def spectrum(g, kind="combinatorial"):
    return linalg.dense_eigh(graphs.laplacian(g, kind).matrix)


@pytest.fixture(scope="session")
def small_graphs(path64, comet64, sensor64):
    return {"path": path64, "comet": comet64, "sensor": sensor64}


@pytest.fixture(scope="session")
def small_eigs(small_graphs):
    return {k: spectrum(g) for k, g in small_graphs.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
