import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repro", derandomize=True, max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repro")

_ACCEPTANCE: list[str] = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=0, help="seed for randomized tests")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


@pytest.fixture
def report():
    """Record one acceptance line; echoed again in the terminal summary."""

    def add(line: str):
        print(line)
        _ACCEPTANCE.append(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
