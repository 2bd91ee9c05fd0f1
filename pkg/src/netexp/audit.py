"""Access-recording doubles for checking the visibility model from outside.

The doubles recompute the permitted region from the *unwrapped* graph on
every access, so they do not trust any bookkeeping in
:class:`~netexp.visibility.VisibilityView`.
"""
from __future__ import annotations

from .graph import Graph, neighborhood


class AccessAudit:
    """Shared state for an audited graph/feature pair during one run."""

    def __init__(self, graph: Graph, v0: int, l_deg: int, l_val: int):
        self.graph = graph
        self.l_deg = l_deg
        self.l_val = l_val
        self.view = None
        self._origin = frozenset([v0])
        self._cache_key = None
        self._deg_region: set[int] = set()
        self._val_region: set[int] = set()
        self.structural_reads = 0
        self.value_reads = 0
        self.violations: list[str] = []

    def bind(self, view) -> None:
        self.view = view

    def _regions(self):
        s = self._origin if self.view is None else self.view.selected
        key = (len(s), s) if self.view is None else len(s)
        if key != self._cache_key:
            self._deg_region = neighborhood(self.graph, s, self.l_deg)
            self._val_region = neighborhood(self.graph, s, self.l_val)
            self._cache_key = key
        return self._deg_region, self._val_region

    def structure(self, v: int) -> None:
        self.structural_reads += 1
        if v not in self._regions()[0]:
            self.violations.append(f"structural read of node {v} outside N(S,{self.l_deg})")

    def value(self, v: int) -> None:
        self.value_reads += 1
        if v not in self._regions()[1]:
            self.violations.append(f"value read of node {v} outside N(S,{self.l_val})")


class AuditedGraph:
    def __init__(self, graph: Graph, audit: AccessAudit):
        self._graph = graph
        self._audit = audit

    @property
    def node_count(self) -> int:
        return self._graph.node_count

    def neighbors(self, v: int):
        self._audit.structure(v)
        return self._graph.neighbors(v)


class AuditedFeatures:
    def __init__(self, features, audit: AccessAudit):
        self._features = features
        self._audit = audit
        self.feature_count = features.feature_count

    def values_of(self, v: int):
        self._audit.value(v)
        return self._features.values_of(v)


def audited(graph: Graph, features, v0: int, l_deg: int, l_val: int):
    """``(audit, audited_graph, audited_features)``; pass ``audit.bind`` as the run observer."""
    audit = AccessAudit(graph, v0, l_deg, l_val)
    return audit, AuditedGraph(graph, audit), AuditedFeatures(features, audit)
