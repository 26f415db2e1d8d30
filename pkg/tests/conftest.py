import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from suspended_search import SearchInstance  # noqa: E402

PAGE = 5000


def random_instance(rng, n_friends=(2, 4), max_pages=3, max_total=8, rho0=1.0, rho_bar=0.0, page=PAGE):
    """Seeded instance with bounded page counts; some follower counts are exact page multiples."""
    while True:
        k = int(rng.integers(n_friends[0], n_friends[1] + 1))
        followers = []
        for _ in range(k):
            c = int(rng.integers(1, max_pages + 1))
            if rng.random() < 0.3:
                followers.append(c * page)
            else:
                followers.append(int(rng.integers((c - 1) * page + 1, c * page + 1)))
        if sum(-(-n // page) for n in followers) <= max_total:
            break
    phis = [float(p) for p in rng.uniform(0.05, 0.95, size=k)]
    return SearchInstance.from_lists(followers, phis, page_size=page, rho0=rho0, rho_bar=rho_bar)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_friends():
    return SearchInstance.from_lists([10, 10], [0.9, 0.1], ids=["a", "b"])


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
