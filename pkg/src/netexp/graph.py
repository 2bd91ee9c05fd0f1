"""Undirected simple graphs, random generators and dominating-set machinery."""
from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

#: exhaustive CDS search is refused above this many nodes
MAX_BRUTE_FORCE_NODES = 24


class Graph:
    """Immutable undirected simple graph on node ids ``0 .. node_count-1``."""

    __slots__ = ("_adj", "_edge_count")

    def __init__(self, node_count: int, adjacency: Sequence[Iterable[int]]):
        if node_count < 1:
            raise ValueError(f"node_count must be positive, got {node_count}")
        if len(adjacency) != node_count:
            raise ValueError("adjacency must have one entry per node")
        adj = tuple(frozenset(nbrs) for nbrs in adjacency)
        total = 0
        for v, nbrs in enumerate(adj):
            for u in nbrs:
                if not 0 <= u < node_count:
                    raise ValueError(f"node {v} has out-of-range neighbor {u}")
                if u == v:
                    raise ValueError(f"self-loop at node {v}")
                if v not in adj[u]:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")
            total += len(nbrs)
        self._adj = adj
        self._edge_count = total // 2

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build from an edge list; duplicate edges collapse, self-loops are rejected."""
        adj: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            adj[u].add(v)
            adj[v].add(u)
        return cls(node_count, adj)

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def nodes(self) -> range:
        return range(len(self._adj))

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of ``(u, v)`` pairs with ``u < v``."""
        return [(u, v) for u, nbrs in enumerate(self._adj) for v in sorted(nbrs) if u < v]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(self._adj)

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count})"


@dataclass(frozen=True)
class FeatureOverlayConfig:
    """Parameters of the per-feature preferential-attachment overlay.

    ``feature_probability`` and ``attachment_links`` may be scalars (shared by
    every feature) or sequences of length ``feature_count``.
    """

    feature_count: int
    nodes_total: int
    feature_probability: float | Sequence[float] = 0.2
    attachment_links: int | Sequence[int] = 2
    thetas: tuple[float, ...] = field(init=False, repr=False)
    links: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.feature_count < 1 or self.nodes_total < 1:
            raise ValueError("feature_count and nodes_total must be positive")
        thetas = _per_feature(self.feature_probability, self.feature_count, float)
        links = _per_feature(self.attachment_links, self.feature_count, int)
        if any(not 0.0 <= t <= 1.0 for t in thetas):
            raise ValueError(f"feature probabilities must lie in [0, 1], got {thetas}")
        if any(m < 1 for m in links):
            raise ValueError(f"attachment links must be >= 1, got {links}")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "links", links)


def _per_feature(value, count, cast):
    if np.ndim(value) == 0:
        return (cast(value),) * count
    values = tuple(cast(v) for v in value)
    if len(values) != count:
        raise ValueError(f"expected {count} per-feature values, got {len(values)}")
    return values


def gen_erdos_renyi(n: int, p_edge: float, seed: int | None = None) -> Graph:
    """G(n, p): every unordered pair is an edge independently with probability ``p_edge``.

    The edge count is drawn from Binomial(n(n-1)/2, p) and that many distinct
    pairs are then sampled uniformly, which is the same distribution without
    materialising all pairs.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0.0 <= p_edge <= 1.0:
        raise ValueError(f"p_edge must lie in [0, 1], got {p_edge}")
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) // 2
    k = int(rng.binomial(pairs, p_edge)) if pairs else 0
    if k == 0:
        return Graph(n, [()] * n)
    if k == pairs:
        idx = np.arange(pairs, dtype=np.int64)
    else:
        idx = np.sort(rng.choice(pairs, size=k, replace=False))
    return Graph.from_edges(n, zip(*_unrank_pairs(idx, n)))


def _unrank_pairs(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row-major enumeration of (u, v), u < v; row u starts at u*n - u(u+1)/2
    idx = np.asarray(idx, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    start = u * n - u * (u + 1) // 2
    # guard against float rounding at row boundaries
    low = idx < start
    u[low] -= 1
    start = u * n - u * (u + 1) // 2
    nxt = (u + 1) * n - (u + 1) * (u + 2) // 2
    high = idx >= nxt
    u[high] += 1
    start = u * n - u * (u + 1) // 2
    v = idx - start + u + 1
    return u, v


def _preferential_attachment_edges(nodes: Sequence[int], m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Edges of a PA process over ``nodes`` in arrival order, seeded by an (m+1)-clique."""
    seed_nodes = list(nodes[: m + 1])
    edges = list(itertools.combinations(seed_nodes, 2))
    # each endpoint appears once per incident edge: sampling from it is degree-proportional
    endpoints = [v for e in edges for v in e]
    for v in nodes[m + 1:]:
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(endpoints[int(rng.integers(len(endpoints)))])
        for t in sorted(targets):
            edges.append((t, v))
            endpoints.append(t)
            endpoints.append(v)
    return edges


def gen_preferential_attachment(n: int, m: int, seed: int | None = None) -> Graph:
    """Preferential-attachment graph: (m+1)-clique seed, then m distinct degree-weighted links per arrival."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n <= m:
        raise ValueError(f"need n > m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, _preferential_attachment_edges(range(n), m, rng))


def rank_values(members: Sequence[int], degree: dict[int, int]) -> dict[int, float]:
    """Map members to ``(k - rank + 1) / k``; rank 1 is the highest degree, ties go to the lower id."""
    order = sorted(members, key=lambda v: (-degree.get(v, 0), v))
    k = len(order)
    return {v: (k - i) / k for i, v in enumerate(order)}


def gen_feature_overlay(config: FeatureOverlayConfig, seed: int | None = None):
    """Overlay of one PA graph per feature, with degree-rank feature values.

    Returns ``(graph, features)`` where ``features`` is a
    :class:`netexp.utility.FeatureTable`.
    """
    from .utility import FeatureTable

    rng = np.random.default_rng(seed)
    n = config.nodes_total
    adj: list[set[int]] = [set() for _ in range(n)]
    values: dict[int, dict[int, float]] = {}
    for x in range(config.feature_count):
        m = config.links[x]
        members = np.flatnonzero(rng.random(n) < config.thetas[x])
        # arrival order is random so hubs of different features are independent
        members = [int(v) for v in rng.permutation(members)]
        if len(members) < m + 1:
            if members:
                logger.warning("feature %d has %d members (< m+1=%d); using a clique", x, len(members), m + 1)
            else:
                logger.warning("feature %d has no members", x)
            edges = list(itertools.combinations(members, 2))
        else:
            edges = _preferential_attachment_edges(members, m, rng)
        degree: dict[int, int] = {v: 0 for v in members}
        for u, v in edges:
            degree[u] += 1
            degree[v] += 1
            adj[u].add(v)
            adj[v].add(u)
        for v, val in rank_values(members, degree).items():
            values.setdefault(v, {})[x] = val
    return Graph(n, adj), FeatureTable(values, config.feature_count)


def gen_path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def neighborhood(g: Graph, s: Iterable[int], l: int) -> set[int]:
    """All nodes within ``l`` hops of some node of ``s``, ``s`` included."""
    if l < 0:
        raise ValueError(f"hop radius must be non-negative, got {l}")
    seen = set(s)
    layer = list(seen)
    for _ in range(l):
        nxt = []
        for v in layer:
            for u in g.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        if not nxt:
            break
        layer = nxt
    return seen


def max_degree(g: Graph) -> int:
    return max((g.degree(v) for v in g.nodes()), default=0)


def is_connected_subset(g: Graph, s: Iterable[int]) -> bool:
    """True iff the subgraph induced by ``s`` is connected."""
    s = set(s)
    if not s:
        raise ValueError("connectivity of the empty set is undefined")
    start = next(iter(s))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u in s and u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == len(s)


def is_connected(g: Graph) -> bool:
    return is_connected_subset(g, g.nodes())


def is_dominating(g: Graph, s: Iterable[int]) -> bool:
    return len(neighborhood(g, s, 1)) == g.node_count


def greedy_cds(g: Graph) -> set[int]:
    """Connected dominating set by greedy growth with one node of lookahead.

    Starts from the highest-degree node. Each round adds either one dominated
    node or a dominated node plus one of its undominated neighbors, whichever
    dominates the most new nodes per node added.
    """
    if not is_connected(g):
        raise ValueError("greedy_cds requires a connected graph")
    start = max(g.nodes(), key=lambda v: (g.degree(v), -v))
    black = {start}
    covered = set(g.neighbors(start)) | {start}
    while len(covered) < g.node_count:
        best_key, best = None, None
        for u in sorted(covered - black):
            gain_u = g.neighbors(u) - covered
            key = (len(gain_u), -1, (u,))
            if best_key is None or _better(key, best_key):
                best_key, best = key, (u,)
            for w in sorted(gain_u):
                # w is newly dominated by u, so the pair gains everything new around both
                gain = len((gain_u | g.neighbors(w)) - covered)
                key = (gain / 2, -2, (u, w))
                if _better(key, best_key):
                    best_key, best = key, (u, w)
        for v in best:
            black.add(v)
            covered.add(v)
            covered |= g.neighbors(v)
    return black


def _better(a, b) -> bool:
    # higher ratio, then shorter chain, then lexicographically smaller ids
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] > b[1]
    return a[2] < b[2]


def brute_force_min_cds(g: Graph) -> tuple[set[int], int]:
    """Minimum connected dominating set by exhaustive search in increasing size."""
    n = g.node_count
    if n > MAX_BRUTE_FORCE_NODES:
        raise ValueError(f"brute force CDS refused for {n} > {MAX_BRUTE_FORCE_NODES} nodes")
    if not is_connected(g):
        raise ValueError("brute_force_min_cds requires a connected graph")
    closed = [(1 << v) | sum(1 << u for u in g.neighbors(v)) for v in range(n)]
    full = (1 << n) - 1
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            mask = 0
            for v in combo:
                mask |= closed[v]
            if mask == full and is_connected_subset(g, combo):
                return set(combo), k
    raise AssertionError("unreachable: V itself is a connected dominating set")


def cds_bound_factor(delta: int) -> float:
    """``2 + 2 ln(max(delta, e))``, the per-node CDS approximation factor used in the bound checks."""
    return 2.0 + 2.0 * math.log(max(delta, math.e))
