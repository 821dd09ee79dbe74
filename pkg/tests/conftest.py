import numpy as np
import pytest

from cmcgraph import PlanarCurve, ProblemConfig, generate_mesh

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_config():
    """Cone over the unit circle with vertex (0, 0, 2), inner circle 0.6, H = 0.8."""
    return ProblemConfig(PlanarCurve.circle(), (0.0, 0.0, 2.0), PlanarCurve.circle(radius=0.6), 0.8)


@pytest.fixture(scope="session")
def demo_mesh(demo_config):
    return generate_mesh(demo_config.L, 0.05)


@pytest.fixture(scope="session")
def disk_mesh():
    return generate_mesh(PlanarCurve.circle(), 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
