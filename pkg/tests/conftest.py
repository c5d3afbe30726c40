import time

import pytest
from hypothesis import HealthCheck, settings

from l2approx import FIXTURES, load_fixture
from l2approx.analysis import Study

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def complexes():
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def studies(complexes):
    return {name: Study(cx) for name, cx in complexes.items()}


@pytest.fixture(scope="session")
def circle(complexes):
    return complexes["circle"]


@pytest.fixture(scope="session")
def wedge(complexes):
    return complexes["wedge"]


@pytest.fixture(scope="session")
def torus(complexes):
    return complexes["torus"]


_RESULTS: dict[int, tuple[bool, str]] = {}
_START = time.perf_counter()
SUITE_BUDGET_S = 300.0


@pytest.fixture
def acceptance():
    """Record the outcome of an acceptance criterion for the end-of-run summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        _RESULTS[number] = (bool(ok), detail)
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    elapsed = time.perf_counter() - _START
    if 10 in _RESULTS:
        ok, detail = _RESULTS[10]
        in_budget = elapsed <= SUITE_BUDGET_S
        _RESULTS[10] = (ok and in_budget, f"{detail}; session took {elapsed:.1f}s (budget {SUITE_BUDGET_S:.0f}s)")
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, detail = _RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")
