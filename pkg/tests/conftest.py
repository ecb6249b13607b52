"""Shared fixtures plus the acceptance summary printed after a test run."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from routelab import Graph, distance_matrix

settings.register_profile(
    "routelab", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("routelab")

# number -> {"slug", "passed", "detail"}; populated by tests/test_acceptance.py
ACCEPTANCE: dict[int, dict] = {}


def record_acceptance(number: int, slug: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = {"slug": slug, "passed": bool(passed), "detail": detail}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"criterion {number} ({entry['slug']}): {status}"
        if entry["detail"]:
            line += f" | {entry['detail']}"
        terminalreporter.write_line(line)


@pytest.fixture
def unit_square_graph() -> Graph:
    # optimal tour is the perimeter, length exactly 4
    return Graph("unit-square", ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))


@pytest.fixture
def unit_square_d(unit_square_graph) -> np.ndarray:
    return distance_matrix(unit_square_graph)


@pytest.fixture
def triangle_345_d() -> np.ndarray:
    # sides 3, 4, 5; the only tour has length 12
    return distance_matrix(Graph("triangle-345", ((0.0, 0.0), (3.0, 0.0), (3.0, 4.0))))
