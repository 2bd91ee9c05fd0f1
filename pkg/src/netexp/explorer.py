"""NetExp and the comparison policies.

Every policy here sees the network only through a
:class:`~netexp.visibility.VisibilityView`. :func:`centralized_greedy` and
:func:`brute_force_min_cover` are the exceptions: they are full-visibility
references used to size the unconstrained optimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal

import numpy as np

from .utility import Coverage, FeatureTable, Task
from .visibility import VisibilityView

Action = Literal["explore", "exploit", "random_pick"]
Outcome = Literal["quota_met", "budget_exhausted", "stuck"]

#: exhaustive cover search is refused above this many relevant nodes
MAX_BRUTE_FORCE_COVER_NODES = 20


class QuotaUnachievable(ValueError):
    pass


@dataclass(frozen=True)
class NetExpParams:
    l_deg: int = 1
    l_val: int = 1
    epsilon: float = 0.5
    add_random_after_explore: bool = False
    max_selected: int | None = None
    stop_at_quota: bool = True
    seed: int | None = 0
    # None: use the task's quota and tolerance
    beta: float | None = None
    quota: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.beta is not None and not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.quota is not None and self.quota <= 0:
            raise ValueError(f"quota must be positive, got {self.quota}")
        if self.max_selected is not None and self.max_selected < 1:
            raise ValueError("max_selected must be at least 1")

    def target(self, task: Task) -> float:
        beta = task.tolerance if self.beta is None else self.beta
        quota = task.quota if self.quota is None else self.quota
        return (1.0 - beta) * quota


@dataclass(frozen=True)
class Step:
    iteration: int
    action: Action
    chain: tuple[int, ...]
    utility: float
    size: int
    exposed: int
    epsilon: float


@dataclass
class RunTrace:
    initial_node: int
    initial_utility: float
    initial_exposed: int
    steps: list[Step] = field(default_factory=list)
    outcome: Outcome | None = None
    selected: tuple[int, ...] = ()

    @property
    def final_utility(self) -> float:
        return self.steps[-1].utility if self.steps else self.initial_utility

    @property
    def size(self) -> int:
        return len(self.selected)

    def prefixes(self):
        """Selected set after the initial node and after each step, in order."""
        chosen = [self.initial_node]
        yield list(chosen)
        for step in self.steps:
            chosen.extend(step.chain)
            yield list(chosen)

    def utility_at(self, budget: int) -> float:
        """Utility of the largest recorded prefix with at most ``budget`` nodes."""
        if budget < 1:
            return 0.0
        best = self.initial_utility
        for step in self.steps:
            if step.size > budget:
                break
            best = step.utility
        return best

    def exposed_at(self, budget: int) -> int:
        if budget < 1:
            return 0
        best = self.initial_exposed
        for step in self.steps:
            if step.size > budget:
                break
            best = step.exposed
        return best

    def to_dict(self) -> dict:
        d = asdict(self)
        d["steps"] = [[s.iteration, s.action, list(s.chain), s.utility, s.size, s.exposed, s.epsilon] for s in self.steps]
        d["selected"] = list(self.selected)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunTrace":
        steps = [Step(int(i), a, tuple(c), float(u), int(n), int(e), float(eps)) for i, a, c, u, n, e, eps in d["steps"]]
        return cls(d["initial_node"], d["initial_utility"], d["initial_exposed"], steps, d["outcome"], tuple(d["selected"]))


def _argmax(scored, rng: np.random.Generator | None) -> tuple[tuple[int, ...], float]:
    """Best per-node score, then the shortest chain; remaining exact ties are
    drawn uniformly with ``rng`` (smallest ids when ``rng`` is None), so the
    choice never depends on how nodes happen to be numbered."""
    best_key, ties = None, []
    for score, chain in scored:
        key = (score, -len(chain))
        if best_key is None or key > best_key:
            best_key, ties = key, [chain]
        elif key == best_key:
            ties.append(chain)
    ties.sort()
    pick = ties[0] if rng is None or len(ties) == 1 else ties[int(rng.integers(len(ties)))]
    return pick, best_key[0]


def best_explore_chain(view: VisibilityView, rng: np.random.Generator | None = None) -> tuple[tuple[int, ...], float]:
    if view.l_deg == 1:
        return _argmax(((float(e), (u,)) for u, e in view.frontier_exposure().items()), rng)
    return _argmax(((view.exposure_gain(c) / len(c), c) for c in view.enumerate_chains(view.l_deg)), rng)


def best_exploit_chain(
    view: VisibilityView, coverage: Coverage, rng: np.random.Generator | None = None
) -> tuple[tuple[int, ...], float]:
    if view.l_val == 1:
        return _argmax(((coverage.gain((view.feature_values(u),)), (u,)) for u in view.frontier), rng)
    chains = view.enumerate_chains(view.l_val)
    return _argmax(((coverage.gain([view.feature_values(u) for u in c]) / len(c), c) for c in chains), rng)


class _Run:
    """Shared bookkeeping for one policy run."""

    def __init__(self, g, ft: FeatureTable, task: Task, params: NetExpParams, observer):
        self.view = VisibilityView(g, task.initial_node, params.l_deg, params.l_val, ft)
        if observer is not None:
            observer(self.view)
        self.coverage = Coverage(task)
        self.coverage.add(self.view.feature_values(task.initial_node))
        self.target = params.target(task)
        self.params = params
        self.trace = RunTrace(task.initial_node, self.coverage.utility(), self.view.exposed_size)

    def utility(self) -> float:
        return self.coverage.utility()

    def room(self) -> int | None:
        cap = self.params.max_selected
        return None if cap is None else cap - self.view.size

    def add(self, iteration: int, action: Action, chain: tuple[int, ...], epsilon: float) -> None:
        room = self.room()
        if room is not None and len(chain) > room:
            # a chain prefix is itself a valid chain, so truncation keeps S connected
            chain = chain[:room]
        self.view.extend(chain)
        for v in chain:
            self.coverage.add(self.view.feature_values(v))
        self.trace.steps.append(
            Step(iteration, action, chain, self.coverage.utility(), self.view.size, self.view.exposed_size, epsilon)
        )

    def should_stop(self) -> bool:
        if self.params.stop_at_quota and self.utility() >= self.target:
            self.trace.outcome = "quota_met"
            return True
        if self.room() is not None and self.room() <= 0:
            self.trace.outcome = "budget_exhausted"
            return True
        if not self.view.frontier:
            self.trace.outcome = "stuck"
            return True
        return False

    def finish(self) -> RunTrace:
        if self.trace.outcome == "stuck" and self.utility() >= self.target:
            self.trace.outcome = "quota_met"
        self.trace.selected = tuple(self.view.selection_order)
        return self.trace


def netexp(
    g,
    ft: FeatureTable,
    task: Task,
    params: NetExpParams = NetExpParams(),
    observer: Callable[[VisibilityView], None] | None = None,
) -> RunTrace:
    """Interleave exploration and exploitation until the task's quota is met.

    Each iteration flips a coin with success probability epsilon. On success
    the chain of up to ``l_deg`` nodes exposing the most new nodes per node
    is added; otherwise the chain of up to ``l_val`` nodes with the largest
    utility gain per node. Once no single frontier node can expose anything
    new, epsilon drops to 0 for the rest of the run.

    ``observer`` is called once with the freshly built view, before any
    selection; used by auditing test doubles.
    """
    run = _Run(g, ft, task, params, observer)
    rng = np.random.default_rng(params.seed)
    view = run.view
    epsilon = params.epsilon
    iteration = 0
    while not run.should_stop():
        iteration += 1
        if epsilon > 0 and view.is_saturated():
            epsilon = 0.0
        explore = rng.random() < epsilon
        if explore:
            chain, score = best_explore_chain(view, rng)
            assert score > 0, "unsaturated view must offer a positive-exposure chain"
            newly = sorted(view.newly_exposed(chain))
            run.add(iteration, "explore", chain, epsilon)
            if params.l_deg == 1 and params.add_random_after_explore and newly:
                if run.room() is None or run.room() > 0:
                    pick = newly[int(rng.integers(len(newly)))]
                    run.add(iteration, "random_pick", (pick,), epsilon)
        else:
            chain, score = best_exploit_chain(view, run.coverage, rng)
            if score <= 0.0 and epsilon == 0.0 and view.is_saturated():
                # whole component exposed and nothing left to gain
                run.trace.outcome = "stuck"
                break
            run.add(iteration, "exploit", chain, epsilon)
    return run.finish()


def random_policy(
    g,
    ft: FeatureTable,
    task: Task,
    params: NetExpParams = NetExpParams(),
    observer: Callable[[VisibilityView], None] | None = None,
) -> RunTrace:
    """Add a uniformly random frontier node each step."""
    run = _Run(g, ft, task, params, observer)
    rng = np.random.default_rng(params.seed)
    iteration = 0
    while not run.should_stop():
        iteration += 1
        frontier = sorted(run.view.frontier)
        v = frontier[int(rng.integers(len(frontier)))]
        run.add(iteration, "random_pick", (v,), 1.0)
    return run.finish()


def run_baseline(
    kind: str,
    g,
    ft: FeatureTable,
    task: Task,
    params: NetExpParams = NetExpParams(),
    observer: Callable[[VisibilityView], None] | None = None,
) -> RunTrace:
    """``random``, ``deg`` (NetExp with epsilon 1) or ``val`` (epsilon 0)."""
    if kind == "random":
        return random_policy(g, ft, task, params, observer)
    if kind == "deg":
        return netexp(g, ft, task, _with(params, epsilon=1.0), observer)
    if kind == "val":
        return netexp(g, ft, task, _with(params, epsilon=0.0), observer)
    raise ValueError(f"unknown baseline {kind!r}")


def _with(params: NetExpParams, **changes) -> NetExpParams:
    d = asdict(params)
    d.update(changes)
    return NetExpParams(**d)


def _relevant_nodes(ft: FeatureTable, task: Task) -> list[int]:
    return [v for v, row in ft.items() if any(x in task.weights for x in row)]


def centralized_greedy(ft: FeatureTable, task: Task, beta: float | None = None, quota: float | None = None) -> list[int]:
    """Full-visibility greedy: add the best marginal-gain node anywhere until the target is met.

    Ignores connectivity and visibility entirely.
    """
    target = (1.0 - (task.tolerance if beta is None else beta)) * (task.quota if quota is None else quota)
    candidates = _relevant_nodes(ft, task)
    cov = Coverage(task)
    chosen: list[int] = []
    while cov.utility() < target:
        best_v, best_gain = None, 0.0
        for v in candidates:
            gain = cov.gain((ft.values_of(v),))
            if gain > best_gain:
                best_v, best_gain = v, gain
        if best_v is None:
            break
        chosen.append(best_v)
        cov.add(ft.values_of(best_v))
        candidates.remove(best_v)
    return chosen


def brute_force_min_cover(ft: FeatureTable, task: Task, beta: float | None = None, quota: float | None = None) -> tuple[set[int], int]:
    """Smallest node set reaching the target utility, ignoring connectivity and visibility."""
    target = (1.0 - (task.tolerance if beta is None else beta)) * (task.quota if quota is None else quota)
    nodes = _relevant_nodes(ft, task)
    if len(nodes) > MAX_BRUTE_FORCE_COVER_NODES:
        raise ValueError(f"brute force cover refused for {len(nodes)} > {MAX_BRUTE_FORCE_COVER_NODES} relevant nodes")
    rows = [ft.values_of(v) for v in nodes]
    for k in range(0, len(nodes) + 1):
        for combo in itertools.combinations(range(len(nodes)), k):
            cov = Coverage(task)
            for i in combo:
                cov.add(rows[i])
            if cov.utility() >= target:
                return {nodes[i] for i in combo}, k
    raise QuotaUnachievable(f"target utility {target:g} is unreachable even with all relevant nodes")


def size_bound_lookahead(epsilon: float, delta: int, gamma: int, vopt: int, beta: float) -> float:
    """Expected-size bound for l_deg=2, l_val=1, plus one for the initial node."""
    return (1 / epsilon) * (2 + 2 * math.log(max(delta, math.e))) * gamma + (1 / (1 - epsilon)) * vopt * math.log(1 / beta) + 1


def size_bound_random_pick(epsilon: float, delta: int, gamma: int, vopt: int, beta: float) -> float:
    """Expected-size bound for l_deg=1 with the random-pick step, plus one for the initial node."""
    return (1 / epsilon) * (4 + 2 * math.log(delta)) * gamma + (1 / (1 - epsilon)) * vopt * math.log(1 / beta) + 1
