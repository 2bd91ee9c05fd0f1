"""Local-visibility view of a graph around a growing connected node set.

A :class:`VisibilityView` is the only window policies get on the network.
Structure (a node's adjacency) can be read only for nodes within ``l_deg``
hops of the selected set, and feature values only within ``l_val`` hops;
any other access raises :class:`VisibilityError`.

Chains are tuples of node ids. A chain ``(p1, ..., pl)`` from ``S`` satisfies

* ``p1`` is on the exposed frontier ``N(S,1) - S``;
* ``p2`` is newly exposed by ``p1``: adjacent to ``p1`` and outside ``N(S,1)``;
* ``pi`` (i >= 3) is newly exposed by ``p(i-1)`` relative to ``p(i-2)``:
  adjacent to ``p(i-1)``, outside ``N(S,1)`` and outside the closed
  neighborhood of ``p(i-2)``.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

#: longest chain the enumerators will build; enumeration is exponential in it
MAX_CHAIN_LENGTH = 3

Chain = tuple  # tuple[int, ...]


class VisibilityError(RuntimeError):
    """Raised when code asks for structure or values the model keeps hidden."""


class InvalidChain(ValueError):
    pass


class VisibilityView:
    """Selected set ``S`` plus everything the visibility model reveals about it.

    Mutated in place by :meth:`extend`; single owner.
    """

    def __init__(self, graph, v0: int, l_deg: int = 1, l_val: int = 1, features=None):
        if not 0 <= v0 < graph.node_count:
            raise ValueError(f"initial node {v0} not in graph of {graph.node_count} nodes")
        if not 1 <= l_deg <= MAX_CHAIN_LENGTH or not 1 <= l_val <= MAX_CHAIN_LENGTH:
            raise ValueError(f"l_deg and l_val must lie in [1, {MAX_CHAIN_LENGTH}], got {l_deg}, {l_val}")
        if l_val > l_deg + 1:
            # exploit chains of length l_val need the adjacency of nodes l_val-1 hops out
            raise ValueError(f"l_val={l_val} needs structure beyond l_deg={l_deg}; require l_val <= l_deg + 1")
        self.graph = graph
        self.features = features
        self.l_deg = l_deg
        self.l_val = l_val
        self.initial_node = v0
        self._radius = max(l_deg, l_val)
        self._selected: set[int] = set()
        self._order: list[int] = []
        self._dist: dict[int, int] = {v0: 0}
        self._covered: set[int] = set()
        self._frontier: set[int] = set()
        # |N(v,1) - N(S,1)| for every covered v; the single-node exposure gain
        self._exposure: dict[int, int] = {}
        self._add_nodes((v0,))

    # -- gated access -------------------------------------------------------

    def neighbors(self, v: int) -> frozenset[int]:
        if self._dist.get(v, self._radius + 1) > self.l_deg:
            raise VisibilityError(f"adjacency of node {v} is beyond {self.l_deg} hops of the selected set")
        return self.graph.neighbors(v)

    def feature_values(self, v: int) -> Mapping[int, float]:
        if self._dist.get(v, self._radius + 1) > self.l_val:
            raise VisibilityError(f"values of node {v} are beyond {self.l_val} hops of the selected set")
        if self.features is None:
            raise VisibilityError("view was built without a feature table")
        return self.features.values_of(v)

    def hop_distance(self, v: int) -> int | None:
        """Hops from the selected set, if within the view radius."""
        return self._dist.get(v)

    # -- state --------------------------------------------------------------

    @property
    def selected(self) -> frozenset[int]:
        return frozenset(self._selected)

    @property
    def selection_order(self) -> list[int]:
        return list(self._order)

    @property
    def size(self) -> int:
        return len(self._selected)

    @property
    def frontier(self) -> frozenset[int]:
        return frozenset(self._frontier)

    @property
    def exposed_size(self) -> int:
        """``|N(S,1)|``."""
        return len(self._covered)

    def frontier_exposure(self) -> dict[int, int]:
        """Single-node exposure gain of every frontier node."""
        exp = self._exposure
        return {v: exp[v] for v in self._frontier}

    def is_saturated(self) -> bool:
        exp = self._exposure
        return all(exp[v] == 0 for v in self._frontier)

    # -- chains -------------------------------------------------------------

    def chain_problem(self, chain: Iterable[int]) -> str | None:
        """Why ``chain`` is not a valid chain from the current set, or None."""
        chain = tuple(chain)
        if not 1 <= len(chain) <= MAX_CHAIN_LENGTH:
            return f"chain length {len(chain)} outside [1, {MAX_CHAIN_LENGTH}]"
        if len(set(chain)) != len(chain):
            return "chain repeats a node"
        if chain[0] not in self._frontier:
            return f"first node {chain[0]} is not on the exposed frontier"
        for i in range(1, len(chain)):
            p = chain[i]
            if p in self._covered:
                return f"node {p} at position {i + 1} is already exposed"
            if p not in self.neighbors(chain[i - 1]):
                return f"node {p} is not adjacent to {chain[i - 1]}"
            if i >= 2:
                q = chain[i - 2]
                if p == q or p in self.neighbors(q):
                    return f"node {p} was already exposed by {q}"
        return None

    def check_chain(self, chain: Iterable[int]) -> tuple[int, ...]:
        chain = tuple(chain)
        problem = self.chain_problem(chain)
        if problem is not None:
            raise InvalidChain(problem)
        return chain

    def enumerate_chains(self, max_len: int) -> list[tuple[int, ...]]:
        """Every valid chain of length 1..max_len, in lexicographic order."""
        if not 1 <= max_len <= MAX_CHAIN_LENGTH:
            raise ValueError(f"chain length bound must lie in [1, {MAX_CHAIN_LENGTH}]")
        out: list[tuple[int, ...]] = []
        covered = self._covered

        def grow(chain: tuple[int, ...]):
            out.append(chain)
            if len(chain) == max_len:
                return
            nxt = self.neighbors(chain[-1]) - covered
            if len(chain) >= 2:
                q = chain[-2]
                nxt = nxt - self.neighbors(q) - {q}
            for p in sorted(nxt):
                grow(chain + (p,))

        for v in sorted(self._frontier):
            grow((v,))
        return out

    def newly_exposed(self, chain: Iterable[int]) -> set[int]:
        """Nodes that would join the frontier if ``chain`` were added: ``N(chain) - N(S,1) - chain``."""
        chain = tuple(chain)
        new: set[int] = set()
        for p in chain:
            new |= self.neighbors(p)
        new -= self._covered
        new.difference_update(chain)
        return new

    def exposure_gain(self, chain: Iterable[int]) -> int:
        chain = tuple(chain)
        if len(chain) == 1 and chain[0] in self._frontier:
            return self._exposure[chain[0]]
        return len(self.newly_exposed(self.check_chain(chain)))

    # -- growth -------------------------------------------------------------

    def extend(self, chain: Iterable[int]) -> "VisibilityView":
        chain = self.check_chain(chain)
        self._add_nodes(chain)
        return self

    def _add_nodes(self, nodes: tuple[int, ...]) -> None:
        dist = self._dist
        radius = self._radius
        before = {v for v, d in dist.items() if d <= 1} if len(nodes) > 1 else None
        for u in nodes:
            self._selected.add(u)
            self._order.append(u)
            dist[u] = 0
            queue = deque([u])
            while queue:
                x = queue.popleft()
                d = dist[x] + 1
                if d > radius:
                    continue
                for y in self.neighbors(x):
                    if dist.get(y, radius + 1) > d:
                        dist[y] = d
                        queue.append(y)
        covered = self._covered
        if before is None:
            u = nodes[0]
            fresh = [v for v in (u, *self.neighbors(u)) if v not in covered]
        else:
            fresh = [v for v, d in dist.items() if d <= 1 and v not in before]
        covered.update(fresh)
        exp = self._exposure
        fresh_set = set(fresh)
        for u in fresh:
            nbrs = self.neighbors(u)
            exp[u] = sum(1 for w in nbrs if w not in covered)
            for w in nbrs:
                if w in covered and w not in fresh_set:
                    exp[w] -= 1
        self._frontier.update(fresh)
        self._frontier.difference_update(nodes)

    # -- debugging ----------------------------------------------------------

    def recompute_frontier(self) -> set[int]:
        """``N(S,1) - S`` from scratch, bypassing the incremental cache."""
        nbhd = set(self._selected)
        for v in self._selected:
            nbhd |= self.graph.neighbors(v)
        return nbhd - self._selected

    def check_consistency(self) -> None:
        """Compare every incremental cache against a full recomputation."""
        frontier = self.recompute_frontier()
        if frontier != self._frontier:
            raise AssertionError("frontier cache out of sync")
        covered = frontier | self._selected
        if covered != self._covered:
            raise AssertionError("exposed-set cache out of sync")
        for v in covered:
            if self._exposure[v] != len(self.graph.neighbors(v) - covered):
                raise AssertionError(f"exposure count of node {v} out of sync")


def new_view(g, v0: int, l_deg: int = 1, l_val: int = 1, features=None) -> VisibilityView:
    return VisibilityView(g, v0, l_deg, l_val, features)


def exposed_frontier(view: VisibilityView) -> set[int]:
    return set(view.frontier)


def exposure_gain(view: VisibilityView, chain) -> int:
    return view.exposure_gain(chain)


def enumerate_explore_chains(view: VisibilityView) -> list[tuple[int, ...]]:
    return view.enumerate_chains(view.l_deg)


def enumerate_exploit_chains(view: VisibilityView) -> list[tuple[int, ...]]:
    return view.enumerate_chains(view.l_val)


def extend(view: VisibilityView, chain) -> VisibilityView:
    return view.extend(chain)


def is_saturated(view: VisibilityView) -> bool:
    return view.is_saturated()
