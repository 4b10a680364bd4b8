import random

import pytest

from moroute.graph import random_connected_graph
from moroute.instances import load_bundled


def random_instances(count=50, max_vars=16, seed=2024):
    """Seeded connected graphs with at most ``max_vars`` encoding variables, plus endpoints."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        nodes = rng.randint(3, 8)
        room = max_vars + 2 - nodes - (nodes - 1)
        if room < 0:
            continue
        max_extra = min(room, nodes * (nodes - 1) // 2 - (nodes - 1))
        g = random_connected_graph(nodes, rng.randint(0, max_extra), rng)
        s, d = rng.sample(list(g.nodes), 2)
        out.append((g, s, d))
    return out


@pytest.fixture(scope="session")
def random_graphs():
    return random_instances()


@pytest.fixture(scope="session")
def k4():
    return load_bundled("k4")


@pytest.fixture(scope="session")
def square():
    return load_bundled("square")


@pytest.fixture(scope="session")
def triangular():
    return load_bundled("triangular")


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per criterion, then assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE, {})

    def report(number, ok, detail):
        lines[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[number])
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
