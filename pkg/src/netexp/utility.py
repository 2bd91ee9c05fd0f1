"""Tasks and the weighted probabilistic-coverage utility.

For a task with feature weights ``w`` the utility of a node set ``S`` is::

    f(S) = sum_x w_x * (1 - prod_{s in S} (1 - x_s)) / sum_x w_x

which is monotone and submodular, lies in [0, 1] and reaches 1 exactly when
every positively weighted feature is covered by a node of value 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

_EMPTY: Mapping[int, float] = MappingProxyType({})


class FeatureTable:
    """Sparse per-node feature values in (0, 1]; absent entries mean 0."""

    __slots__ = ("_values", "feature_count")

    def __init__(self, values: Mapping[int, Mapping[int, float]], feature_count: int):
        if feature_count < 0:
            raise ValueError("feature_count must be non-negative")
        clean: dict[int, Mapping[int, float]] = {}
        for v, row in values.items():
            kept = {}
            for x, val in row.items():
                if not 0 <= x < feature_count:
                    raise ValueError(f"node {v}: feature {x} out of range for {feature_count} features")
                if not (0.0 <= val <= 1.0) or math.isnan(val):
                    raise ValueError(f"node {v}: feature {x} value {val} outside (0, 1]")
                if val > 0.0:
                    kept[int(x)] = float(val)
            if kept:
                clean[int(v)] = MappingProxyType(kept)
        self._values = clean
        self.feature_count = int(feature_count)

    def values_of(self, v: int) -> Mapping[int, float]:
        return self._values.get(v, _EMPTY)

    def value(self, v: int, x: int) -> float:
        return self._values.get(v, _EMPTY).get(x, 0.0)

    def nodes(self) -> list[int]:
        """Nodes with at least one positive value, sorted."""
        return sorted(self._values)

    def members(self, x: int) -> list[int]:
        return sorted(v for v, row in self._values.items() if x in row)

    def items(self):
        for v in sorted(self._values):
            yield v, self._values[v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return self.feature_count == other.feature_count and {
            v: dict(r) for v, r in self._values.items()
        } == {v: dict(r) for v, r in other._values.items()}

    def __repr__(self) -> str:
        return f"FeatureTable(valued_nodes={len(self._values)}, feature_count={self.feature_count})"


@dataclass(frozen=True)
class Task:
    initial_node: int
    weights: Mapping[int, float]
    quota: float = 1.0
    tolerance: float = 0.05
    total_weight: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        weights = {int(x): float(w) for x, w in self.weights.items() if w != 0}
        if any(w < 0 for w in weights.values()):
            raise ValueError("feature weights must be non-negative")
        if not weights:
            raise ValueError("a task needs at least one positive feature weight")
        if self.quota <= 0:
            raise ValueError(f"quota must be positive, got {self.quota}")
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.quota > 1.0:
            logger.warning("quota %g exceeds the maximum normalized utility 1", self.quota)
        object.__setattr__(self, "weights", MappingProxyType(dict(sorted(weights.items()))))
        object.__setattr__(self, "total_weight", sum(weights.values()))

    @property
    def target(self) -> float:
        """Utility level at which a run stops, ``(1 - tolerance) * quota``."""
        return (1.0 - self.tolerance) * self.quota


def feature_coverage(values: Iterable[float]) -> float:
    """``1 - prod(1 - x)`` over ``values``; 0 for no values."""
    residual = 1.0
    for x in values:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"feature value {x} outside [0, 1]")
        residual *= 1.0 - x
    return 1.0 - residual


def task_utility(task: Task, s: Iterable[int], ft: FeatureTable) -> float:
    s = set(s)
    total = 0.0
    for x, w in task.weights.items():
        total += w * feature_coverage(ft.value(v, x) for v in s)
    return total / task.total_weight


def marginal_gain(task: Task, s: Iterable[int], ft: FeatureTable, chain: Sequence[int]) -> float:
    """``f(S + chain) - f(S)``; the chain must be disjoint from ``s``."""
    s = set(s)
    if s.intersection(chain):
        raise ValueError("chain overlaps the selected set")
    state = Coverage(task)
    for v in s:
        state.add(ft.values_of(v))
    return state.gain([ft.values_of(v) for v in chain])


class Coverage:
    """Incremental utility of a growing node set for one task.

    Tracks ``prod(1 - x_s)`` per weighted feature so the utility and the gain of
    a candidate chain cost O(chain length * features) instead of a full rescan.
    """

    __slots__ = ("task", "residual")

    def __init__(self, task: Task):
        self.task = task
        self.residual = {x: 1.0 for x in task.weights}

    def utility(self) -> float:
        w = self.task.weights
        return sum(w[x] * (1.0 - r) for x, r in self.residual.items()) / self.task.total_weight

    def gain(self, rows: Sequence[Mapping[int, float]]) -> float:
        w = self.task.weights
        total = 0.0
        if len(rows) == 1:
            for x, val in rows[0].items():
                r = self.residual.get(x)
                if r is not None:
                    total += w[x] * r * val
            return total / self.task.total_weight
        for x, r in self.residual.items():
            keep = 1.0
            for row in rows:
                val = row.get(x)
                if val:
                    keep *= 1.0 - val
            total += w[x] * r * (1.0 - keep)
        return total / self.task.total_weight

    def add(self, row: Mapping[int, float]) -> None:
        for x, val in row.items():
            r = self.residual.get(x)
            if r is not None:
                self.residual[x] = r * (1.0 - val)


def sample_tasks(
    feature_count: int,
    required_features_per_task: int,
    task_count: int,
    node_count: int,
    seed: int | None = None,
    quota: float = 1.0,
    tolerance: float = 0.05,
) -> list[Task]:
    """Tasks with ``required`` unit-weight features drawn without replacement and a uniform start node."""
    if not 1 <= required_features_per_task <= feature_count:
        raise ValueError("required features must lie in [1, feature_count]")
    rng = np.random.default_rng(seed)
    tasks = []
    for _ in range(task_count):
        feats = sorted(int(x) for x in rng.choice(feature_count, size=required_features_per_task, replace=False))
        v0 = int(rng.integers(node_count))
        tasks.append(Task(v0, {x: 1.0 for x in feats}, quota, tolerance))
    return tasks
