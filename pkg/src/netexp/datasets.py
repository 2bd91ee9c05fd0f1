"""Dataset bundles: graph + feature table + metadata, and the synthetic builders.

On disk a bundle ``<prefix>`` is four whitespace-delimited text files:

``<prefix>.labels``    ``label id`` per node, defining the node universe
``<prefix>.edges``     ``u v`` per edge, in labels
``<prefix>.features``  ``node feature value``; a ``#feature_count=K`` header
``<prefix>.meta``      ``key=value``

Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import FeatureOverlayConfig, Graph, gen_erdos_renyi, gen_feature_overlay
from .utility import FeatureTable

logger = logging.getLogger(__name__)


class BundleFormatError(ValueError):
    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason


@dataclass
class DatasetBundle:
    graph: Graph
    features: FeatureTable
    metadata: dict[str, str] = field(default_factory=dict)
    labels: list[str] | None = None

    def __post_init__(self):
        n = self.graph.node_count
        bad = [v for v in self.features.nodes() if not 0 <= v < n]
        if bad:
            raise ValueError(f"features reference nodes outside the graph: {bad[:5]}")
        if self.labels is not None:
            if len(self.labels) != n or len(set(self.labels)) != n:
                raise ValueError("labels must be distinct and one per node")
            if any(not lab or any(c.isspace() for c in lab) for lab in self.labels):
                raise ValueError("labels must be non-empty and contain no whitespace")

    def node_labels(self) -> list[str]:
        return self.labels if self.labels is not None else [str(v) for v in range(self.graph.node_count)]

    def __eq__(self, other):
        if not isinstance(other, DatasetBundle):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.features == other.features
            and self.metadata == other.metadata
            and self.node_labels() == other.node_labels()
        )


def _paths(prefix) -> dict[str, Path]:
    prefix = os.fspath(prefix)
    return {ext: Path(f"{prefix}.{ext}") for ext in ("labels", "edges", "features", "meta")}


def save_bundle(bundle: DatasetBundle, prefix) -> None:
    paths = _paths(prefix)
    paths["labels"].parent.mkdir(parents=True, exist_ok=True)
    labels = bundle.node_labels()
    with open(paths["labels"], "w") as fh:
        for v, lab in enumerate(labels):
            fh.write(f"{lab} {v}\n")
    with open(paths["edges"], "w") as fh:
        for u, v in bundle.graph.edges():
            fh.write(f"{labels[u]} {labels[v]}\n")
    with open(paths["features"], "w") as fh:
        fh.write(f"#feature_count={bundle.features.feature_count}\n")
        for v, row in bundle.features.items():
            for x in sorted(row):
                fh.write(f"{labels[v]} {x} {row[x]:.17g}\n")
    with open(paths["meta"], "w") as fh:
        for key in sorted(bundle.metadata):
            value = str(bundle.metadata[key])
            if "=" in key or "\n" in key or "\n" in value or not key.strip():
                raise ValueError(f"metadata entry {key!r} cannot be written as key=value")
            fh.write(f"{key}={value}\n")


def _lines(path: Path):
    with open(path) as fh:
        for i, raw in enumerate(fh, 1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield i, line


def load_bundle(prefix) -> DatasetBundle:
    paths = _paths(prefix)
    ids: dict[str, int] = {}
    labels: list[str] = []
    if paths["labels"].exists():
        for i, line in _lines(paths["labels"]):
            parts = line.split()
            if len(parts) != 2:
                raise BundleFormatError(paths["labels"], i, "expected 'label id'")
            lab, raw = parts
            try:
                idx = int(raw)
            except ValueError:
                raise BundleFormatError(paths["labels"], i, f"id {raw!r} is not an integer") from None
            if idx != len(labels):
                raise BundleFormatError(paths["labels"], i, f"ids must be dense and in order; expected {len(labels)}")
            if lab in ids:
                raise BundleFormatError(paths["labels"], i, f"duplicate label {lab!r}")
            ids[lab] = idx
            labels.append(lab)
        fixed = True
    else:
        fixed = False

    def resolve(path, i, lab):
        if lab in ids:
            return ids[lab]
        if fixed:
            raise BundleFormatError(path, i, f"unknown node label {lab!r}")
        ids[lab] = len(labels)
        labels.append(lab)
        return ids[lab]

    edges = []
    for i, line in _lines(paths["edges"]):
        parts = line.split()
        if len(parts) != 2:
            raise BundleFormatError(paths["edges"], i, "expected 'u v'")
        if parts[0] == parts[1]:
            raise BundleFormatError(paths["edges"], i, f"self-loop at {parts[0]!r}")
        edges.append((resolve(paths["edges"], i, parts[0]), resolve(paths["edges"], i, parts[1])))

    feature_count = None
    rows: dict[int, dict[int, float]] = {}
    with open(paths["features"]) as fh:
        first = fh.readline().strip()
    if first.startswith("#feature_count="):
        feature_count = int(first.split("=", 1)[1])
    for i, line in _lines(paths["features"]):
        parts = line.split()
        if len(parts) != 3:
            raise BundleFormatError(paths["features"], i, "expected 'node feature value'")
        try:
            x, val = int(parts[1]), float(parts[2])
        except ValueError:
            raise BundleFormatError(paths["features"], i, "feature must be an integer and value a float") from None
        if not 0.0 < val <= 1.0:
            raise BundleFormatError(paths["features"], i, f"value {parts[2]} outside (0, 1]")
        if x < 0 or (feature_count is not None and x >= feature_count):
            raise BundleFormatError(paths["features"], i, f"feature id {x} out of range")
        v = resolve(paths["features"], i, parts[0])
        if x in rows.setdefault(v, {}):
            raise BundleFormatError(paths["features"], i, f"duplicate value for node {parts[0]!r} feature {x}")
        rows[v][x] = val
    if feature_count is None:
        feature_count = 1 + max((x for r in rows.values() for x in r), default=-1)

    metadata: dict[str, str] = {}
    if paths["meta"].exists():
        for i, line in _lines(paths["meta"]):
            if "=" not in line:
                raise BundleFormatError(paths["meta"], i, "expected key=value")
            key, value = line.split("=", 1)
            metadata[key] = value

    if not labels:
        raise BundleFormatError(paths["labels"], 0, "bundle has no nodes")
    graph = Graph.from_edges(len(labels), edges)
    custom = labels != [str(v) for v in range(len(labels))]
    return DatasetBundle(graph, FeatureTable(rows, feature_count), metadata, labels if custom else None)


def _stamp(**params) -> dict[str, str]:
    return {k: repr(v) if isinstance(v, float) else str(v) for k, v in params.items()}


def _uniform_rescaled(rng: np.random.Generator, k: int) -> np.ndarray:
    # uniform on (0, 1], divided by the max so the largest is exactly 1
    vals = 1.0 - rng.random(k)
    return vals / vals.max()


def build_er_dataset(n: int, p_edge: float, feature_count: int, p_val: float, seed: int | None = 0) -> DatasetBundle:
    """Erdos-Renyi graph with sparse uniformly valued features."""
    if not 0.0 <= p_val <= 1.0:
        raise ValueError(f"p_val must lie in [0, 1], got {p_val}")
    if feature_count < 1:
        raise ValueError("feature_count must be positive")
    ss = np.random.SeedSequence(seed)
    graph_seed, value_seed = ss.spawn(2)
    graph = gen_erdos_renyi(n, p_edge, np.random.default_rng(graph_seed))
    rng = np.random.default_rng(value_seed)
    # all draws up front: for a fixed seed, valued sets are nested in p_val
    membership = rng.random((2, feature_count, n))
    raw = 1.0 - rng.random((feature_count, n))
    rows: dict[int, dict[int, float]] = {}
    empty = []
    for x in range(feature_count):
        valued = np.flatnonzero(membership[0, x] < p_val)
        if valued.size == 0:
            valued = np.flatnonzero(membership[1, x] < p_val)
        if valued.size == 0:
            empty.append(x)
            continue
        vals = raw[x, valued] / raw[x, valued].max()
        for v, val in zip(valued.tolist(), vals.tolist()):
            rows.setdefault(v, {})[x] = val
    meta = _stamp(generator="er", n=n, p_edge=p_edge, feature_count=feature_count, p_val=p_val, seed=seed)
    meta["unachievable_features"] = ",".join(map(str, empty))
    return DatasetBundle(graph, FeatureTable(rows, feature_count), meta)


def build_pa_overlay_dataset(n: int, feature_count: int, theta: float = 0.2, m: int = 2, seed: int | None = 0) -> DatasetBundle:
    config = FeatureOverlayConfig(feature_count, n, theta, m)
    graph, features = gen_feature_overlay(config, seed)
    meta = _stamp(generator="pa_overlay", n=n, feature_count=feature_count, theta=theta, m=m, seed=seed)
    return DatasetBundle(graph, features, meta)


def build_org_hierarchy_dataset(
    total_nodes: int, expert_count: int, feature_count: int, branching: int = 4, seed: int | None = 0
) -> DatasetBundle:
    """Random rooted tree standing in for an organizational chart, with a sparse expert subset.

    Internal nodes are expanded breadth-first; each gets a number of children
    drawn uniformly from ``1..branching``. Every expert gets a score for every
    feature, uniform on (0, 1] and rescaled so each feature's best expert
    scores exactly 1.
    """
    if total_nodes < 1 or branching < 1 or feature_count < 1:
        raise ValueError("total_nodes, branching and feature_count must be positive")
    if not 0 <= expert_count <= total_nodes:
        raise ValueError(f"expert_count must lie in [0, {total_nodes}]")
    rng = np.random.default_rng(seed)
    edges = []
    nxt = 1
    parent = 0
    while nxt < total_nodes:
        kids = int(rng.integers(1, branching + 1))
        for _ in range(min(kids, total_nodes - nxt)):
            edges.append((parent, nxt))
            nxt += 1
        parent += 1
    graph = Graph.from_edges(total_nodes, edges)
    experts = np.sort(rng.choice(total_nodes, size=expert_count, replace=False)).tolist()
    rows: dict[int, dict[int, float]] = {v: {} for v in experts}
    if expert_count:
        for x in range(feature_count):
            for v, val in zip(experts, _uniform_rescaled(rng, expert_count).tolist()):
                rows[v][x] = val
    meta = _stamp(
        generator="org_hierarchy", total_nodes=total_nodes, expert_count=expert_count,
        feature_count=feature_count, branching=branching, seed=seed,
    )
    return DatasetBundle(graph, FeatureTable(rows, feature_count), meta)
