import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import helpers  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance pass/fail lines after the run, where default
    output capture cannot hide them."""
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def weather_table():
    """Four readings: two dates, each with a Low and a High temperature."""
    return helpers.table(
        ["Date:n", "Type:n", "Temp:q"],
        [
            ["09-05", "Low", 64.4],
            ["09-05", "High", 87.8],
            ["09-06", "Low", 53.6],
            ["09-06", "High", 80.6],
        ],
    )


@pytest.fixture(scope="session")
def cities_table():
    """Six dated readings for two cities, one column per city."""
    return helpers.table(
        ["Date:t", "New York:q", "San Francisco:q"],
        [
            ["2011-10-01", 63.4, 62.7],
            ["2011-10-05", 64.2, 58.7],
            ["2011-10-10", 61.8, 59.1],
            ["2011-10-15", 59.5, 57.4],
            ["2012-09-25", 63.2, 53.3],
            ["2012-09-30", 62.3, 55.1],
        ],
    )


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def golden_dir():
    return GOLDEN
