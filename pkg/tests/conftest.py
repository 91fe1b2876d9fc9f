import numpy as np
import pytest

from sigtest.tensor import GroupElement


def random_group_element(rng, dim, max_level, scale=1.0):
    levels = [np.ones(1)] + [
        scale * rng.normal(size=dim**m) / (m + 1) for m in range(1, max_level + 1)
    ]
    return GroupElement(dim, tuple(levels))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the terminal summary."""

    def _report(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
