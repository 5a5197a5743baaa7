import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import netsig
from netsig.graph import Graph

settings.register_profile(
    "netsig", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("netsig")


def random_graph(n, p, rng, coords=False):
    rng = np.random.default_rng(rng)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    c = rng.random((n, 2)) if coords else None
    return Graph(n, np.column_stack([iu[keep], ju[keep]]), coords=c)


@pytest.fixture(scope="session")
def karate():
    return netsig.karate()


@pytest.fixture
def barbell():
    # two triangles joined by the bridge 2-3
    return Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: slow end-to-end acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
