"""Randomized invariant checks shared by ``verify`` and the test-suite.

Each check returns a list of human-readable violations (empty on success);
every message carries the seed needed to reproduce it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audit import audited
from .datasets import build_er_dataset, build_pa_overlay_dataset
from .explorer import (
    NetExpParams,
    RunTrace,
    brute_force_min_cover,
    centralized_greedy,
    netexp,
    run_baseline,
    size_bound_lookahead,
    size_bound_random_pick,
)
from .graph import (
    Graph,
    brute_force_min_cds,
    cds_bound_factor,
    gen_erdos_renyi,
    gen_preferential_attachment,
    greedy_cds,
    is_connected,
    is_connected_subset,
    is_dominating,
    max_degree,
    neighborhood,
)
from .utility import FeatureTable, Task, task_utility
from .visibility import VisibilityView

TOL = 1e-12


def random_connected_graph(rng: np.random.Generator, n: int, p: float | None = None) -> Graph:
    """Erdos-Renyi draws rejected until connected."""
    p = p if p is not None else min(1.0, 2.5 * math.log(n) / n)
    while True:
        g = gen_erdos_renyi(n, p, int(rng.integers(2**31)))
        if is_connected(g):
            return g


def random_feature_table(rng: np.random.Generator, n: int, feature_count: int, density: float) -> FeatureTable:
    rows: dict[int, dict[int, float]] = {}
    for x in range(feature_count):
        for v in np.flatnonzero(rng.random(n) < density).tolist():
            rows.setdefault(v, {})[x] = float(1.0 - rng.random())
    return FeatureTable(rows, feature_count)


def random_task(rng: np.random.Generator, n: int, feature_count: int, required: int | None = None) -> Task:
    k = required or int(rng.integers(1, feature_count + 1))
    feats = rng.choice(feature_count, size=k, replace=False)
    return Task(int(rng.integers(n)), {int(x): 1.0 for x in feats})


# -- graph --------------------------------------------------------------------


def check_graph_invariants(seed: int = 0, count: int = 20) -> list[str]:
    bad = []
    rng = np.random.default_rng(seed)
    for i in range(count):
        s = int(rng.integers(2**31))
        n = int(rng.integers(2, 60))
        for name, make in (
            ("erdos_renyi", lambda: gen_erdos_renyi(n, float(rng.random()) * 0.3, s)),
            ("preferential_attachment", lambda: gen_preferential_attachment(n, int(rng.integers(1, min(4, n))), s)),
        ):
            g = make()
            for v in g.nodes():
                if v in g.neighbors(v):
                    bad.append(f"{name} seed={s}: self-loop at {v}")
                if any(v not in g.neighbors(u) for u in g.neighbors(v)):
                    bad.append(f"{name} seed={s}: asymmetric adjacency at {v}")
        if gen_erdos_renyi(n, 0.2, s) != gen_erdos_renyi(n, 0.2, s):
            bad.append(f"erdos_renyi seed={s}: not reproducible")
        if n > 3 and gen_preferential_attachment(n, 2, s) != gen_preferential_attachment(n, 2, s):
            bad.append(f"preferential_attachment seed={s}: not reproducible")
        g = gen_erdos_renyi(n, 0.1, s)
        a = set(rng.choice(n, size=min(n, 3), replace=False).tolist())
        b = set(rng.choice(n, size=min(n, 2), replace=False).tolist())
        for l in (1, 2, 3):
            if not neighborhood(g, a, l) <= neighborhood(g, a, l + 1):
                bad.append(f"neighborhood seed={s}: not monotone in radius {l}")
            if neighborhood(g, a | b, l) != neighborhood(g, a, l) | neighborhood(g, b, l):
                bad.append(f"neighborhood seed={s}: union decomposition fails at radius {l}")
    return bad


def check_cds(seed: int = 0, count: int = 30, max_n: int = 12) -> list[str]:
    """greedy_cds dominates, is connected and stays within the log-factor of the minimum."""
    bad = []
    rng = np.random.default_rng(seed)
    for _ in range(count):
        s = int(rng.integers(2**31))
        n = int(rng.integers(2, max_n + 1))
        r = np.random.default_rng(s)
        g = random_connected_graph(r, n, float(r.uniform(0.15, 0.5)))
        cds = greedy_cds(g)
        if not is_dominating(g, cds):
            bad.append(f"greedy_cds seed={s} n={n}: not dominating")
        if not is_connected_subset(g, cds):
            bad.append(f"greedy_cds seed={s} n={n}: not connected")
        _, gamma = brute_force_min_cds(g)
        if len(cds) > cds_bound_factor(max_degree(g)) * gamma:
            bad.append(f"greedy_cds seed={s} n={n}: size {len(cds)} above bound for gamma={gamma}")
    return bad


# -- utility ------------------------------------------------------------------


def check_submodularity(ft: FeatureTable, n: int, samples: int, seed: int = 0, utility=task_utility) -> list[str]:
    """Monotonicity and diminishing returns on random nested set pairs."""
    bad = []
    rng = np.random.default_rng(seed)
    valued = ft.nodes()
    pool = np.array(sorted(set(valued) | set(range(min(n, 50)))), dtype=np.int64)
    for i in range(samples):
        task = random_task(rng, n, ft.feature_count)
        big = set(rng.choice(pool, size=int(rng.integers(0, min(len(pool), 12) + 1)), replace=False).tolist())
        small = {v for v in big if rng.random() < 0.5}
        fs, fb = utility(task, small, ft), utility(task, big, ft)
        if fs > fb + TOL:
            bad.append(f"monotonicity seed={seed} sample={i}: f(S)={fs!r} > f(S')={fb!r}")
        if not -TOL <= fb <= 1.0 + TOL:
            bad.append(f"range seed={seed} sample={i}: f={fb!r} outside [0, 1]")
        outside = [int(v) for v in pool if int(v) not in big]
        if outside:
            v = outside[int(rng.integers(len(outside)))]
            gain_small = utility(task, small | {v}, ft) - fs
            gain_big = utility(task, big | {v}, ft) - fb
            if gain_small < gain_big - TOL:
                bad.append(f"submodularity seed={seed} sample={i}: gain {gain_small!r} < {gain_big!r} for node {v}")
    return bad


def submodularity_tables(seed: int = 0):
    """(name, table, node_count) for the ER and PA-overlay utility checks."""
    er = build_er_dataset(300, 0.02, 5, 0.05, seed)
    pa = build_pa_overlay_dataset(300, 10, 0.2, 2, seed)
    return [("er", er.features, 300), ("pa_overlay", pa.features, 300)]


# -- runs ---------------------------------------------------------------------


def check_chain_validity(seed: int = 0, count: int = 30) -> list[str]:
    """Every enumerated chain satisfies the constraint system evaluated from neighborhood()."""
    bad = []
    rng = np.random.default_rng(seed)
    for _ in range(count):
        s = int(rng.integers(2**31))
        g = random_connected_graph(np.random.default_rng(s), int(rng.integers(4, 25)))
        l_deg = int(rng.integers(1, 4))
        view = VisibilityView(g, 0, l_deg, 1)
        for _ in range(int(rng.integers(0, 5))):
            if not view.frontier:
                break
            view.extend((min(view.frontier),))
        sel = set(view.selected)
        chains = view.enumerate_chains(l_deg)
        expected = set(definitional_chains(g, sel, l_deg))
        if set(chains) != expected:
            bad.append(f"chains seed={s}: enumerator disagrees with definitional filter")
        for c in chains:
            gain = len(exposed(g, sel | set(c)) - exposed(g, sel))
            if view.exposure_gain(c) != gain:
                bad.append(f"exposure seed={s}: chain {c} gain {view.exposure_gain(c)} != {gain}")
            if gain > max_degree(g) * len(c):
                bad.append(f"exposure seed={s}: chain {c} gain {gain} above degree bound")
    return bad


def exposed(g: Graph, s: set[int]) -> set[int]:
    return neighborhood(g, s, 1) - s


def definitional_chains(g: Graph, s: set[int], max_len: int):
    """All chains up to ``max_len`` by brute-force filtering of ordered node tuples against the constraints."""
    out = []
    base = exposed(g, s)
    first = sorted(base)
    for p1 in first:
        out.append((p1,))
        if max_len < 2:
            continue
        second = exposed(g, s | {p1}) - base
        for p2 in sorted(second):
            out.append((p1, p2))
            if max_len < 3:
                continue
            third = exposed(g, s | {p2}) - exposed(g, s | {p1})
            for p3 in sorted(third - {p1, p2}):
                out.append((p1, p2, p3))
    return out


def check_trace(g: Graph, trace: RunTrace, v0: int) -> list[str]:
    """Connectivity and initial-node membership of every prefix, plus column monotonicity."""
    bad = []
    for prefix in trace.prefixes():
        if prefix[0] != v0:
            bad.append("initial node missing")
        if len(set(prefix)) != len(prefix):
            bad.append(f"duplicate node in prefix of size {len(prefix)}")
        if not is_connected_subset(g, prefix):
            bad.append(f"prefix of size {len(prefix)} is disconnected")
    prev_u, prev_n = trace.initial_utility, 1
    for st in trace.steps:
        if st.utility < prev_u - TOL:
            bad.append(f"utility decreased at iteration {st.iteration}")
        if st.size <= prev_n:
            bad.append(f"|S| did not grow at iteration {st.iteration}")
        prev_u, prev_n = st.utility, st.size
    saturated = False
    for st in trace.steps:
        if saturated and st.action == "explore":
            bad.append(f"explore action after epsilon was zeroed at iteration {st.iteration}")
        if st.epsilon == 0.0:
            saturated = True
    return bad


def _random_instance(rng: np.random.Generator):
    s = int(rng.integers(2**31))
    r = np.random.default_rng(s)
    kind = int(r.integers(3))
    n = int(r.integers(5, 120))
    if kind == 0:
        g = gen_erdos_renyi(n, float(r.uniform(0.02, 0.2)), s)
    elif kind == 1:
        g = gen_preferential_attachment(n, int(r.integers(1, 4)), s)
    else:
        g = random_connected_graph(r, min(n, 30))
        n = g.node_count
    ft = random_feature_table(r, n, 4, float(r.uniform(0.01, 0.2)))
    task = random_task(r, n, 4)
    return s, g, ft, task


POLICIES = ("netexp", "random", "deg", "val")


def _run(policy: str, g, ft, task, params, observer=None) -> RunTrace:
    if policy == "netexp":
        return netexp(g, ft, task, params, observer)
    return run_baseline(policy, g, ft, task, params, observer)


def check_connectivity_runs(count: int, seed: int = 0) -> list[str]:
    bad = []
    rng = np.random.default_rng(seed)
    for i in range(count):
        s, g, ft, task = _random_instance(rng)
        policy = POLICIES[i % len(POLICIES)]
        l_deg = int(rng.integers(1, 3))
        params = NetExpParams(
            l_deg=l_deg, l_val=int(rng.integers(1, l_deg + 2)), epsilon=float(rng.random()),
            add_random_after_explore=bool(rng.integers(2)), seed=s,
            max_selected=int(rng.integers(2, 60)), stop_at_quota=bool(rng.integers(2)),
        )
        trace = _run(policy, g, ft, task, params)
        bad += [f"{policy} instance seed={s}: {m}" for m in check_trace(g, trace, task.initial_node)]
    return bad


def check_visibility_runs(count: int, seed: int = 0) -> list[str]:
    """Runs NetExp against access-auditing doubles of the graph and feature table."""
    bad = []
    rng = np.random.default_rng(seed)
    for i in range(count):
        s, g, ft, task = _random_instance(rng)
        l_deg = 1 + i % 2
        l_val = int(rng.integers(1, l_deg + 2))
        params = NetExpParams(
            l_deg=l_deg, l_val=l_val, epsilon=float(rng.random()),
            add_random_after_explore=bool(rng.integers(2)), seed=s, max_selected=40,
        )
        audit, ag, af = audited(g, ft, task.initial_node, l_deg, l_val)
        trace = netexp(ag, af, task, params, observer=audit.bind)
        if audit.structural_reads == 0 or audit.value_reads == 0:
            bad.append(f"visibility seed={s}: audit saw no accesses")
        bad += [f"visibility seed={s} l_deg={l_deg} l_val={l_val}: {m}" for m in audit.violations[:3]]
        plain = netexp(g, ft, task, params)
        if plain.to_dict() != trace.to_dict():
            bad.append(f"visibility seed={s}: audited run diverged from plain run")
    return bad


def check_replay(count: int = 10, seed: int = 0) -> list[str]:
    bad = []
    rng = np.random.default_rng(seed)
    for _ in range(count):
        s, g, ft, task = _random_instance(rng)
        params = NetExpParams(l_deg=2, epsilon=0.5, seed=s, max_selected=30)
        if netexp(g, ft, task, params).to_dict() != netexp(g, ft, task, params).to_dict():
            bad.append(f"replay seed={s}: traces differ")
    return bad


# -- bounds -------------------------------------------------------------------


@dataclass
class BoundCase:
    seed: int
    n: int
    delta: int
    gamma: int
    vopt: int
    mean_size: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.mean_size <= self.bound


def size_bound_cases(
    l_deg: int, graphs: int = 50, runs: int = 200, epsilon: float = 0.5, beta: float = 0.05, seed: int = 0
) -> list[BoundCase]:
    """Mean NetExp size on small connected graphs with one hidden value-1 node, against the size bound.

    ``l_deg=2`` uses the lookahead bound; ``l_deg=1`` enables the random-pick
    step and uses the weaker constant.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(graphs):
        s = int(rng.integers(2**31))
        r = np.random.default_rng(s)
        n = int(r.integers(8, 17))
        g = random_connected_graph(r, n, float(r.uniform(0.15, 0.45)))
        v0 = int(r.integers(n))
        hidden = int(r.choice([v for v in range(n) if v != v0]))
        ft = FeatureTable({hidden: {0: 1.0}}, 1)
        task = Task(v0, {0: 1.0}, 1.0, beta)
        _, gamma = brute_force_min_cds(g)
        _, vopt = brute_force_min_cover(ft, task)
        delta = max_degree(g)
        sizes = [
            netexp(g, ft, task, NetExpParams(l_deg=l_deg, l_val=1, epsilon=epsilon,
                                             add_random_after_explore=(l_deg == 1), seed=k)).size
            for k in range(runs)
        ]
        bound = (size_bound_lookahead if l_deg >= 2 else size_bound_random_pick)(epsilon, delta, gamma, vopt, beta)
        cases.append(BoundCase(s, n, delta, gamma, vopt, float(np.mean(sizes)), bound))
    return cases


def check_oracles(count: int = 100, seed: int = 0, beta: float = 0.05) -> list[str]:
    """brute-force cover <= greedy cover <= brute * ceil(ln 1/beta) + 1 on tiny instances."""
    bad = []
    rng = np.random.default_rng(seed)
    factor = math.ceil(math.log(1 / beta))
    for i in range(count):
        s = int(rng.integers(2**31))
        r = np.random.default_rng(s)
        n = int(r.integers(3, 13))
        k = int(r.integers(1, 4))
        rows: dict[int, dict[int, float]] = {}
        for x in range(k):
            members = r.choice(n, size=int(r.integers(1, n + 1)), replace=False)
            vals = 1.0 - r.random(len(members))
            vals /= vals.max()
            for v, val in zip(members.tolist(), vals.tolist()):
                rows.setdefault(v, {})[x] = val
        ft = FeatureTable(rows, k)
        task = Task(0, {x: 1.0 for x in range(k)}, 1.0, beta)
        _, opt = brute_force_min_cover(ft, task)
        greedy = centralized_greedy(ft, task)
        if task_utility(task, greedy, ft) < task.target:
            bad.append(f"greedy cover seed={s}: target not reached")
        if not opt <= len(greedy) <= opt * factor + 1:
            bad.append(f"greedy cover seed={s}: |greedy|={len(greedy)} outside [{opt}, {opt * factor + 1}]")
    return bad + check_cds(seed=seed, count=count)
