"""Experiment runner: utility curves, epsilon and p_val sweeps, the needle probe and ``verify``.

All outputs are CSV with a header row, a fixed column order and floats at 9
significant digits, so identical configs and seeds give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import checks
from .datasets import (
    DatasetBundle,
    build_er_dataset,
    build_org_hierarchy_dataset,
    build_pa_overlay_dataset,
    load_bundle,
)
from .explorer import NetExpParams, RunTrace, netexp, run_baseline
from .graph import FeatureOverlayConfig, gen_feature_overlay, gen_path
from .utility import FeatureTable, Task, sample_tasks, task_utility

logger = logging.getLogger(__name__)

BASELINES = ("random", "deg", "val")


class ConfigError(ValueError):
    pass


def _ints(text: str) -> tuple[int, ...]:
    """``"1,2,3"`` or ``"10:100:10"`` (inclusive stop)."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        return tuple(range(parts[0], parts[1] + 1, parts[2]))
    return tuple(int(p) for p in text.split(",") if p.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip())


@dataclass
class ExperimentConfig:
    """Everything needed to regenerate an experiment.

    Either ``dataset`` names a saved bundle prefix, or ``generator`` (``er``,
    ``pa`` or ``org``) plus the matching parameters describes one to build.
    """

    dataset: str | None = None
    generator: str = "er"
    n: int = 1000
    p_edge: float = 0.01
    feature_count: int = 5
    p_val: float = 0.001
    theta: float = 0.2
    m: int = 2
    expert_count: int = 100
    branching: int = 4
    dataset_seed: int = 0
    tasks: int = 20
    required: int = 3
    task_seed: int = 0
    policies: tuple[str, ...] = ("netexp:0.5", "random", "deg", "val")
    budgets: tuple[int, ...] = tuple(range(10, 101, 10))
    mode: str = "budget"
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    l_deg: int = 1
    l_val: int = 1
    random_pick: bool = False
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.dataset is None and self.generator not in ("er", "pa", "org"):
            raise ConfigError(f"unknown generator {self.generator!r}")
        if not self.policies:
            raise ConfigError("at least one policy is required")
        for p in self.policies:
            parse_policy(p)
        if self.tasks < 1:
            raise ConfigError("at least one task is required")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if not self.budgets or min(self.budgets) < 0:
            raise ConfigError("budgets must be a non-empty list of non-negative sizes")
        if self.mode not in ("budget", "quota"):
            raise ConfigError(f"mode must be 'budget' or 'quota', got {self.mode!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for i, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{i}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ConfigError(f"{source}:{i}: unknown key {key!r}")
            try:
                values[key] = _coerce(key, kinds[key], value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{i}: bad value for {key}: {exc}") from None
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), str(path))

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(map(str, v))
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    def dataset_name(self) -> str:
        return Path(self.dataset).name if self.dataset else self.generator

    def load_dataset(self, **overrides) -> DatasetBundle:
        if self.dataset:
            return load_bundle(self.dataset)
        cfg = replace(self, **overrides) if overrides else self
        if cfg.generator == "er":
            return build_er_dataset(cfg.n, cfg.p_edge, cfg.feature_count, cfg.p_val, cfg.dataset_seed)
        if cfg.generator == "pa":
            return build_pa_overlay_dataset(cfg.n, cfg.feature_count, cfg.theta, cfg.m, cfg.dataset_seed)
        return build_org_hierarchy_dataset(cfg.n, cfg.expert_count, cfg.feature_count, cfg.branching, cfg.dataset_seed)

    def make_tasks(self, bundle: DatasetBundle) -> list[Task]:
        if self.required > bundle.features.feature_count:
            raise ConfigError("required features exceed the dataset's feature count")
        return sample_tasks(bundle.features.feature_count, self.required, self.tasks, bundle.graph.node_count, self.task_seed)


def _coerce(key, kind, value: str):
    kind = str(kind)
    if key in ("policies",):
        return tuple(p.strip() for p in value.split(",") if p.strip())
    if key in ("budgets", "seeds"):
        return _ints(value)
    if key in ("dataset", "out"):
        return value or None
    if "bool" in kind:
        if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {value!r}")
        return value.lower() in ("true", "1", "yes")
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value


def parse_policy(policy: str) -> tuple[str, float | None]:
    """``"netexp:0.3"`` -> ``("netexp", 0.3)``; bare ``"netexp"`` uses 0.5; baselines carry no epsilon."""
    name, _, arg = policy.partition(":")
    if name == "netexp":
        eps = float(arg) if arg else 0.5
        if not 0.0 <= eps <= 1.0:
            raise ConfigError(f"epsilon out of range in policy {policy!r}")
        return name, eps
    if name in BASELINES and not arg:
        return name, None
    raise ConfigError(f"unknown policy {policy!r}")


def run_seed(seed: int, task_index: int) -> int:
    """Per-(seed, task) RNG seed so runs of one seed are independent across tasks."""
    return int(np.random.SeedSequence([seed, task_index]).generate_state(1)[0])


@dataclass(frozen=True)
class RunSpec:
    policy: str
    task_index: int
    seed: int

    @property
    def run_id(self) -> str:
        return f"{self.policy}/t{self.task_index}/s{self.seed}"

    def sort_key(self):
        return (self.policy, self.task_index, self.seed)


def execute(spec: RunSpec, bundle: DatasetBundle, task: Task, base: NetExpParams) -> RunTrace:
    name, eps = parse_policy(spec.policy)
    params = replace(base, seed=run_seed(spec.seed, spec.task_index))
    if name == "netexp":
        return netexp(bundle.graph, bundle.features, task, replace(params, epsilon=eps))
    return run_baseline(name, bundle.graph, bundle.features, task, params)


_WORKER: dict = {}


def _init_worker(bundle, tasks, base):
    _WORKER.update(bundle=bundle, tasks=tasks, base=base)


def _execute_in_worker(spec: RunSpec):
    w = _WORKER
    return spec, execute(spec, w["bundle"], w["tasks"][spec.task_index], w["base"])


def run_all(specs: Sequence[RunSpec], bundle, tasks, base: NetExpParams, jobs: int = 1) -> list[tuple[RunSpec, RunTrace]]:
    """Execute every run; results come back sorted by run key regardless of completion order."""
    if jobs <= 1:
        results = [(s, execute(s, bundle, tasks[s.task_index], base)) for s in specs]
    else:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(bundle, tasks, base)) as pool:
            results = list(pool.map(_execute_in_worker, specs, chunksize=max(1, len(specs) // (4 * jobs))))
    return sorted(results, key=lambda r: r[0].sort_key())


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write_atomic(files: dict[str, str], out_dir) -> None:
    # everything is rendered before anything touches disk; each file appears via rename
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(content)
        os.replace(tmp, out / name)


def _traces_jsonl(results) -> str:
    return "".join(
        json.dumps({"run_id": s.run_id, **t.to_dict()}, sort_keys=True) + "\n" for s, t in results
    )


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
    return float(a.mean()), se


@dataclass(frozen=True)
class CurvePoint:
    policy: str
    budget: int
    mean_utility: float
    se_utility: float
    mean_exposed: float
    runs: int


CURVE_HEADER = ("dataset", "policy", "budget", "mean_utility", "se_utility", "mean_exposed", "runs")
RUN_HEADER = ("run_id", "policy", "task", "seed", "outcome", "size", "final_utility")


def _base_params(config: ExperimentConfig, max_selected: int | None, stop_at_quota: bool) -> NetExpParams:
    return NetExpParams(
        l_deg=config.l_deg, l_val=config.l_val, add_random_after_explore=config.random_pick,
        max_selected=max_selected, stop_at_quota=stop_at_quota,
    )


def _run_rows(results) -> list[tuple]:
    return [
        (s.run_id, s.policy, s.task_index, s.seed, t.outcome, t.size, t.final_utility) for s, t in results
    ]


def run_utility_curve(config: ExperimentConfig, bundle: DatasetBundle | None = None) -> list[CurvePoint]:
    """Mean utility and exposed-network size at every budget, per policy.

    Budget mode runs each policy to the largest budget ignoring the quota;
    quota mode stops at the quota (capped at the largest budget). The value
    at a smaller budget is read off the trace prefix.
    """
    bundle = bundle or config.load_dataset()
    tasks = config.make_tasks(bundle)
    top = max(config.budgets)
    base = _base_params(config, max(top, 1), config.mode == "quota")
    specs = [RunSpec(p, t, s) for p in config.policies for t in range(len(tasks)) for s in config.seeds]
    results = run_all(specs, bundle, tasks, base, config.jobs)
    points = []
    for policy in config.policies:
        mine = [t for s, t in results if s.policy == policy]
        for b in sorted(config.budgets):
            mu, se = _mean_se([t.utility_at(b) for t in mine])
            exposed = float(np.mean([t.exposed_at(b) for t in mine]))
            points.append(CurvePoint(policy, b, mu, se, exposed, len(mine)))
    if config.out:
        name = config.dataset_name()
        _write_atomic({
            "curve.csv": to_csv(CURVE_HEADER, [(name, p.policy, p.budget, p.mean_utility, p.se_utility, p.mean_exposed, p.runs) for p in points]),
            "runs.csv": to_csv(RUN_HEADER, _run_rows(results)),
            "traces.jsonl": _traces_jsonl(results),
        }, config.out)
    return points


EPSILON_HEADER = ("dataset", "epsilon", "mean_efficiency", "se_efficiency", "normalized", "runs")


def run_epsilon_sweep(
    config: ExperimentConfig, epsilons: Sequence[float], bundle: DatasetBundle | None = None
) -> list[tuple]:
    """Mean ``f(S)/|S|`` per epsilon at the largest budget, normalized to max 1 for the dataset."""
    epsilons = sorted(set(float(e) for e in epsilons))
    if not epsilons or epsilons[0] != 0.0 or epsilons[-1] != 1.0 or any(not 0 <= e <= 1 for e in epsilons):
        raise ConfigError("epsilons must lie in [0, 1] and include both 0 and 1")
    bundle = bundle or config.load_dataset()
    tasks = config.make_tasks(bundle)
    base = _base_params(config, max(max(config.budgets), 1), config.mode == "quota")
    policies = [f"netexp:{e!r}" for e in epsilons]
    specs = [RunSpec(p, t, s) for p in policies for t in range(len(tasks)) for s in config.seeds]
    results = run_all(specs, bundle, tasks, base, config.jobs)
    stats = []
    for eps, policy in zip(epsilons, policies):
        eff = [t.final_utility / t.size for s, t in results if s.policy == policy]
        stats.append((eps, *_mean_se(eff), len(eff)))
    top = max(m for _, m, _, _ in stats)
    name = config.dataset_name()
    rows = [(name, eps, m, se, (m / top if top > 0 else 0.0), k) for eps, m, se, k in stats]
    if config.out:
        _write_atomic({
            "epsilon_sweep.csv": to_csv(EPSILON_HEADER, rows),
            "runs.csv": to_csv(RUN_HEADER, _run_rows(results)),
            "traces.jsonl": _traces_jsonl(results),
        }, config.out)
    return rows


PVAL_HEADER = ("dataset", "p_val", "policy", "budget", "mean_utility", "se_utility", "runs")


def run_pval_sweep(config: ExperimentConfig, pvals: Sequence[float], budget: int = 50) -> list[tuple]:
    """Utility at a fixed set size as the fraction of valued nodes varies (ER datasets only)."""
    if config.dataset is not None or config.generator != "er":
        raise ConfigError("the p_val sweep regenerates Erdos-Renyi datasets; set generator=er and no dataset")
    if budget < 1:
        raise ConfigError("budget must be positive")
    rows = []
    all_results = []
    for p in sorted(pvals):
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"p_val {p} outside [0, 1]")
        bundle = config.load_dataset(p_val=p)
        tasks = config.make_tasks(bundle)
        base = _base_params(config, budget, config.mode == "quota")
        specs = [RunSpec(pol, t, s) for pol in config.policies for t in range(len(tasks)) for s in config.seeds]
        results = run_all(specs, bundle, tasks, base, config.jobs)
        for policy in config.policies:
            us = [t.utility_at(budget) for s, t in results if s.policy == policy]
            rows.append((config.dataset_name(), p, policy, budget, *_mean_se(us), len(us)))
        all_results += [(replace(s, policy=f"{s.policy}@p_val={p!r}"), t) for s, t in results]
    if config.out:
        _write_atomic({
            "pval_sweep.csv": to_csv(PVAL_HEADER, rows),
            "runs.csv": to_csv(RUN_HEADER, _run_rows(all_results)),
            "traces.jsonl": _traces_jsonl(all_results),
        }, config.out)
    return rows


NEEDLE_HEADER = ("kind", "n", "median_size", "mean_size", "quota_met", "runs")


def needle_instance(kind: str, n: int, seed: int, starts: int, feature_count: int = 10, theta: float = 0.2, m: int = 2):
    """Graph, needle feature table and start tasks for one needle scenario draw.

    ``pa``: per-feature PA overlay; only the top-degree node of feature 0's
    subgraph carries value (1.0), and starts are uniform members of feature 0.
    ``path``: a path with the needle at the far end from node 0.
    """
    if kind == "path":
        g = gen_path(n)
        needle = FeatureTable({n - 1: {0: 1.0}}, 1)
        return g, needle, [Task(0, {0: 1.0})] * starts
    if kind != "pa":
        raise ConfigError(f"unknown needle graph kind {kind!r}")
    rng = np.random.default_rng(seed)
    g, ft = gen_feature_overlay(FeatureOverlayConfig(feature_count, n, theta, m), int(rng.integers(2**31)))
    members = ft.members(0)
    if len(members) < 2:
        raise ConfigError(f"feature 0 has {len(members)} members at n={n}; increase n or theta")
    top = next(v for v in members if ft.value(v, 0) == 1.0)
    needle = FeatureTable({top: {0: 1.0}}, feature_count)
    starts_ = rng.choice(members, size=starts, replace=True)
    return g, needle, [Task(int(v), {0: 1.0}) for v in starts_]


def run_needle_scenario(
    n_list: Sequence[int],
    seed_count: int,
    kind: str = "pa",
    starts: int = 10,
    epsilon: float = 0.5,
    out: str | None = None,
    base_seed: int = 0,
) -> list[tuple]:
    """Median NetExp set size to reach a single hidden value-1 node, per graph size."""
    n_list = list(n_list)
    if n_list != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise ConfigError("n_list must be strictly increasing")
    rows = []
    for n in n_list:
        sizes, met = [], 0
        for k in range(seed_count):
            seed = run_seed(base_seed + k, n)
            g, ft, tasks = needle_instance(kind, n, seed, starts)
            for j, task in enumerate(tasks):
                tr = netexp(g, ft, task, NetExpParams(epsilon=epsilon, seed=run_seed(seed, j)))
                sizes.append(tr.size)
                met += tr.outcome == "quota_met"
        rows.append((kind, n, float(np.median(sizes)), float(np.mean(sizes)), met, len(sizes)))
    if out:
        _write_atomic({f"needle_{kind}.csv": to_csv(NEEDLE_HEADER, rows)}, out)
    return rows


# -- verify -------------------------------------------------------------------


@dataclass
class VerifyReport:
    level: str
    results: list[tuple[str, list[str], float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not bad for _, bad, _ in self.results)

    def failures(self) -> list[str]:
        return [name for name, bad, _ in self.results if bad]

    def render(self) -> str:
        lines = []
        for name, bad, secs in self.results:
            lines.append(f"{'PASS' if not bad else 'FAIL'} {name} ({secs:.1f}s)")
            lines += [f"    {m}" for m in bad[:10]]
            if len(bad) > 10:
                lines.append(f"    ... {len(bad) - 10} more")
        lines.append(f"verify {self.level}: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def verify(level: str = "fast", utility: Callable = task_utility, seed: int = 0) -> VerifyReport:
    """Run the invariant suites; ``full`` adds the brute-force bound checks.

    ``utility`` replaces the set function under test in the monotonicity and
    submodularity checks (used to confirm the suite catches faults).
    """
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    report = VerifyReport(level)

    def run(name, fn):
        t = time.perf_counter()
        bad = fn()
        report.results.append((name, bad, time.perf_counter() - t))

    run("graph invariants", lambda: checks.check_graph_invariants(seed))
    tables = checks.submodularity_tables(seed)
    for tname, ft, n in tables:
        run(f"monotonicity/submodularity ({tname})",
            lambda ft=ft, n=n: checks.check_submodularity(ft, n, 300, seed, utility))
    run("chain validity", lambda: checks.check_chain_validity(seed))
    run("connectivity and initial node", lambda: checks.check_connectivity_runs(80, seed))
    run("visibility compliance", lambda: checks.check_visibility_runs(20, seed))
    run("trace replay", lambda: checks.check_replay(10, seed))
    run("connected dominating set", lambda: checks.check_cds(seed, 20, 10))
    if level == "full":
        for l_deg, name, need in ((2, "size bound, lookahead exploration", 48), (1, "size bound, random-pick exploration", 46)):
            def bound(l_deg=l_deg, need=need):
                cases = checks.size_bound_cases(l_deg, 50, 200, seed=seed)
                fails = [c for c in cases if not c.ok]
                if len(cases) - len(fails) >= need:
                    return []
                return [f"graph seed={c.seed} n={c.n}: mean |S|={c.mean_size:.2f} > bound {c.bound:.2f}" for c in fails]
            run(name, bound)
        run("oracle consistency", lambda: checks.check_oracles(100, seed))
    return report
