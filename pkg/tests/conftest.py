from __future__ import annotations

import random
from pathlib import Path

import pytest

from sandpiles.graph import Multigraph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def random_connected_graph(rng: random.Random, max_vertices: int = 7, max_mult: int = 1,
                           extra_edges: int = 3) -> Multigraph:
    """Random spanning tree on 2..max_vertices vertices plus a few extra edge copies."""
    total = rng.randint(2, max_vertices)
    edges: dict[tuple[int, int], int] = {}
    order = list(range(total))
    rng.shuffle(order)
    for k in range(1, total):
        u, v = order[k], order[rng.randrange(k)]
        edges[(min(u, v), max(u, v))] = 1
    for _ in range(rng.randint(0, extra_edges)):
        u, v = rng.sample(range(total), 2)
        key = (min(u, v), max(u, v))
        edges[key] = min(edges.get(key, 0) + 1, max_mult)
    return Multigraph(total - 1, edges)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
