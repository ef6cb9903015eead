import pytest

from mural.scenarios import example1_gadget, threshold_instance

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[2:s.index(" ")])):
            terminalreporter.write_line(line)


@pytest.fixture
def gadget():
    return example1_gadget()


@pytest.fixture
def gadget_exact():
    return example1_gadget(exact=True)


@pytest.fixture
def thresholds10():
    return threshold_instance(10, G=2, noise_spec={"kind": "agnostic", "nu": [0.1, 0.2]}, seed=3)
