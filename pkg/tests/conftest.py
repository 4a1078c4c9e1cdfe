import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from hypersig import fixtures as fx  # noqa: E402
from hypersig.model import read_artifact_profile  # noqa: E402
from hypersig.scenario import seed  # noqa: E402
from hypersig.server import EnvironmentServer  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def arm_graph():
    return fx.load(fx.ARM)


@pytest.fixture(scope="session")
def arm_profile(arm_graph):
    return read_artifact_profile(arm_graph)


@pytest.fixture
def server():
    with EnvironmentServer(port=0) as srv:
        yield srv


@pytest.fixture
def seeded(server):
    seed(server.url)
    return server


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.summary_line(number))
