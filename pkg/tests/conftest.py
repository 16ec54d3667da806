import pytest

from klab.systems import SystemParams, build_system_A, build_system_B

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def params():
    return SystemParams.default()


@pytest.fixture(scope="session")
def A(params):
    return build_system_A(params)


@pytest.fixture(scope="session")
def B(params):
    return build_system_B(params)


@pytest.fixture(scope="session")
def small_params():
    return SystemParams.default(stage_count=4, grid_resolution=1024)


@pytest.fixture(scope="session")
def small_A(small_params):
    return build_system_A(small_params)


@pytest.fixture(scope="session")
def small_B(small_params):
    return build_system_B(small_params)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
