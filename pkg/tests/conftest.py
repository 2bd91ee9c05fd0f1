import networkx as nx
import pytest

from netexp import Graph

# Hand-drawn sample network, nodes v1..v13 -> ids 0..12.
# S = {v1, v2, v3}; frontier {v4, v5, v6}; v7, v8, v9 two hops out;
# v7 (reached through v5) exposes {v9, v11, v12}.
SAMPLE_EDGES = [
    (1, 2), (2, 3), (1, 4), (2, 5), (3, 6),
    (4, 8), (5, 7), (6, 9), (7, 9), (7, 11), (7, 12), (8, 10), (11, 13),
]


def v(i):
    return i - 1


@pytest.fixture
def sample_net():
    return Graph.from_edges(13, [(v(a), v(b)) for a, b in SAMPLE_EDGES])


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from(g.edges())
    return h


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), h.edges())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
