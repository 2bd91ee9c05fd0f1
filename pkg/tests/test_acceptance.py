"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
"""
import math
import time

import pytest

from netexp.checks import (
    check_connectivity_runs,
    check_oracles,
    check_submodularity,
    check_visibility_runs,
    size_bound_cases,
    submodularity_tables,
)
from netexp.cli import main
from netexp.harness import ExperimentConfig, run_epsilon_sweep, run_needle_scenario, run_utility_curve

from conftest import ACCEPTANCE_LINES


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_submodularity_and_monotonicity():
    t = time.perf_counter()
    bad = []
    for name, ft, n in submodularity_tables(seed=0):
        bad += check_submodularity(ft, n, 1000, seed=1)
    secs = time.perf_counter() - t
    record(1, "submodularity/monotonicity, 1000 checks each on ER and PA overlay",
           not bad and secs < 10, f"{len(bad)} violations in {secs:.1f}s")


def test_02_visibility_compliance():
    bad = check_visibility_runs(100, seed=0)
    record(2, "visibility compliance over 100 audited runs", not bad, f"{len(bad)} violations {bad[:2]}")


def test_03_connectivity_and_initial_node():
    bad = check_connectivity_runs(500, seed=0)
    record(3, "connected prefixes containing the start node, 500 runs", not bad, f"{len(bad)} violations {bad[:2]}")


@pytest.mark.parametrize("l_deg, need, label", [
    (2, 48, "size bound with two-hop lookahead"),
    (1, 46, "size bound with random-pick exploration"),
])
def test_04_05_size_bounds(l_deg, need, label):
    t = time.perf_counter()
    cases = size_bound_cases(l_deg, graphs=50, runs=200, epsilon=0.5, beta=0.05, seed=0)
    secs = time.perf_counter() - t
    held = sum(c.ok for c in cases)
    worst = max(c.mean_size / c.bound for c in cases)
    record(4 if l_deg == 2 else 5, label, held >= need and secs < 300,
           f"{held}/50 graphs within bound (need {need}), worst mean/bound {worst:.3f}, {secs:.1f}s")


def test_06_utility_curve_er():
    t = time.perf_counter()
    cfg = ExperimentConfig()  # ER n=1000, p_edge=0.01, 5 features, p_val=0.001, 3 required, 20 tasks x 5 seeds
    assert (cfg.n, cfg.p_edge, cfg.feature_count, cfg.p_val, cfg.required, cfg.tasks, len(cfg.seeds)) == (
        1000, 0.01, 5, 0.001, 3, 20, 5)
    points = {(p.policy, p.budget): p for p in run_utility_curve(cfg)}
    secs = time.perf_counter() - t
    ours = points[("netexp:0.5", 100)]
    ok, parts = secs < 180, []
    for other in ("random", "deg", "val"):
        theirs = points[(other, 100)]
        margin = ours.mean_utility - theirs.mean_utility
        pooled = math.hypot(ours.se_utility, theirs.se_utility)
        ok &= margin > pooled > 0
        parts.append(f"{other} {theirs.mean_utility:.3f} (margin {margin:.3f} > se {pooled:.3f})")
    record(6, "NetExp(0.5) beats every baseline at budget 100 on ER", ok,
           f"netexp {ours.mean_utility:.3f}; " + "; ".join(parts) + f"; {secs:.1f}s")


def test_07_epsilon_sweep():
    cfg = ExperimentConfig(budgets=(100,))
    rows = run_epsilon_sweep(cfg, [i / 10 for i in range(11)])
    norm = {r[1]: r[4] for r in rows}
    best_eps = max((e for e in norm if 0 < e < 1), key=norm.get)
    ok = norm[best_eps] >= norm[0.0] and norm[best_eps] >= norm[1.0]
    record(7, "interior epsilon at least as efficient as both endpoints", ok,
           f"best interior eps={best_eps} {norm[best_eps]:.3f}, eps=0 {norm[0.0]:.3f}, eps=1 {norm[1.0]:.3f}")


def test_08_needle_scaling():
    t = time.perf_counter()
    pa = run_needle_scenario([1000, 10000], 40, kind="pa", starts=10)
    path = run_needle_scenario([1000, 10000], 1, kind="path", starts=10)
    secs = time.perf_counter() - t
    pa_ratio = pa[1][2] / pa[0][2]
    path_ratio = path[1][2] / path[0][2]
    record(8, "needle search grows slowly on PA overlay, linearly on a path",
           pa_ratio < 3 and path_ratio >= 8 and secs < 300,
           f"PA median {pa[0][2]:g} -> {pa[1][2]:g} (x{pa_ratio:.2f}), path x{path_ratio:.1f}, {secs:.1f}s")


def test_09_determinism(tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("n=400\np_edge=0.02\np_val=0.02\ntasks=3\nbudgets=10:30:10\nseeds=0,1\n")
    commands = {
        "run": ["run", "--config", str(cfg)],
        "sweep-epsilon": ["sweep-epsilon", "--config", str(cfg), "--epsilons", "0,0.5,1"],
        "sweep-pval": ["sweep-pval", "--config", str(cfg), "--pvals", "0.01,0.05", "--budget", "20"],
        "needle": ["needle", "--n-list", "300,600", "--seeds", "2", "--starts", "2"],
    }
    differing = []
    for name, argv in commands.items():
        outs = []
        for rep in ("a", "b"):
            out = tmp_path / rep / name
            assert main(argv + ["--out", str(out)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if outs[0] != outs[1] or not any(n.endswith(".csv") for n in outs[0]):
            differing.append(name)
    record(9, "reruns give byte-identical outputs for every harness command", not differing,
           f"{len(commands) - len(differing)}/{len(commands)} commands identical {differing}")


def test_10_oracle_consistency():
    bad = check_oracles(count=100, seed=0, beta=0.05)
    record(10, "greedy cover and greedy CDS within their guarantees on 100 tiny instances", not bad,
           f"{len(bad)} violations {bad[:2]}")
