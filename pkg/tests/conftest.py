from itertools import combinations

import numpy as np
import pytest
from hypothesis import strategies as st

from h2nt.graph import Graph


def brute_force_motif_counts(g: Graph) -> np.ndarray:
    """Dense triangle-per-pair counts by checking every 3-subset of nodes."""
    adj = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = True
    counts = np.zeros((g.n, g.n))
    for a, b, c in combinations(range(g.n), 3):
        if adj[a, b] and adj[a, c] and adj[b, c]:
            for x, y in ((a, b), (a, c), (b, c)):
                counts[x, y] += 1
                counts[y, x] += 1
    return counts


def random_graph(rng, n, density) -> Graph:
    edges = [(i, j) for i, j in combinations(range(n), 2) if rng.random() < density]
    return Graph.from_edges(n, edges)


@st.composite
def graphs(draw, max_nodes=12):
    n = draw(st.integers(0, max_nodes))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def double_triangle():
    # triangles {0,1,2} and {1,2,3} sharing edge (1, 2)
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def k4():
    return Graph.from_edges(4, list(combinations(range(4), 2)))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
