import os

import pytest
from hypothesis import HealthCheck, settings

from onpath.figures import figure

RP_SEED = os.environ.get("RP_SEED")

settings.register_profile(
    "onpath",
    deadline=None,
    max_examples=60,
    derandomize=RP_SEED is None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("onpath")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # RP_SEED feeds hypothesis the same way --hypothesis-seed would
    if RP_SEED is not None and config.getoption("hypothesis_seed", None) is None:
        config.option.hypothesis_seed = RP_SEED
    config._acceptance = {}


@pytest.fixture(scope="session")
def base_seed() -> int:
    """Seed for the seeded harnesses; RP_SEED overrides the default of 0."""
    return int(RP_SEED) if RP_SEED is not None else 0


@pytest.fixture
def fig():
    return figure


@pytest.fixture
def acceptance(request):
    """Record one criterion's outcome for the terminal summary."""
    store = request.config._acceptance

    def record(number: int, passed: bool, detail: str = "") -> None:
        store[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 12):
        if number not in store:
            terminalreporter.write_line(f"criterion {number:2d}: NOT RUN")
            continue
        ok, detail = store[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
