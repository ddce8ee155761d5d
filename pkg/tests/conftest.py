import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from turanbounds.graphcore import WeightedGraph, gen_gnp  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the terminal summary prints them all."""

    def record(number, passed, detail):
        ACCEPTANCE_LINES.append((number, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")


def random_graph(seed, n_max=30):
    rng = random.Random(seed)
    n = rng.randint(1, n_max)
    p = rng.choice([0.05, 0.1, 0.2, 0.3, 0.5, 0.8])
    return gen_gnp(n, p, seed)


def random_weighted(seed, n_max=30, w_max=20):
    g = random_graph(seed, n_max)
    rng = random.Random(seed + 10_000)
    return WeightedGraph(g, tuple(rng.randint(1, w_max) for _ in range(g.n)))


@pytest.fixture
def corpus():
    return [random_graph(s) for s in range(200)]


@pytest.fixture
def weighted_corpus():
    return [random_weighted(s) for s in range(200)]
