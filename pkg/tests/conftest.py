import pytest

from evidentia import fixtures
from evidentia.nesting import PartitionModel


@pytest.fixture
def appendix_model():
    return PartitionModel.from_lists("burglary", ["S1", "S2", "S3", "S4"], [0.25] * 4,
                                     [0.40, 0.70, 0.90, 0.95], 0.01)


@pytest.fixture
def fixture_path():
    return fixtures.path


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
