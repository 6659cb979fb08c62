import shutil
from pathlib import Path

import numpy as np
import pytest

from uncertindex.series import MonthlySeries, format_month

DATA = Path(__file__).parent / "data"


def monthly(label, values, start="1996-01"):
    """Wrap an array as a MonthlySeries starting at ``start``."""
    y, m = (int(p) for p in start.split("-"))
    k0 = y * 12 + m - 1
    values = np.asarray(values, dtype=float)
    return MonthlySeries(label, tuple(format_month(k0 + i) for i in range(values.size)), values)


def causal_pair(seed, nobs=300, coef=0.4, burn=100):
    """x is a random walk; y_t = 0.5 y_{t-1} + coef * x_{t-1} + noise."""
    rng = np.random.default_rng(seed)
    n = nobs + burn
    x = np.cumsum(rng.standard_normal(n))
    e = rng.standard_normal(n)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = 0.5 * y[t - 1] + coef * x[t - 1] + e[t]
    return monthly("x", x[burn:]), monthly("y", y[burn:])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fixture_copy(tmp_path):
    """A scratch copy of tests/data so commands can write next to their inputs."""
    target = tmp_path / "fixture"
    shutil.copytree(DATA, target, ignore=shutil.ignore_patterns("out", "__pycache__", "*.py"))
    return target


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, ok, detail):
    """Log one PASS/FAIL line for the terminal summary, then assert it."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
