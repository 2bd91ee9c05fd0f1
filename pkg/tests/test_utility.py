import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netexp import FeatureTable, Task, feature_coverage, marginal_gain, sample_tasks, task_utility
from netexp.checks import check_submodularity, submodularity_tables
from netexp.utility import Coverage

values = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def instances(draw, n=8, k=3):
    rows = {}
    for u in range(n):
        row = draw(st.dictionaries(st.integers(0, k - 1), values, max_size=k))
        rows[u] = row
    ft = FeatureTable(rows, k)
    weights = draw(st.dictionaries(st.integers(0, k - 1), st.floats(0.1, 5.0), min_size=1))
    return ft, Task(0, weights)


class TestFeatureCoverage:
    def test_empty(self):
        assert feature_coverage([]) == 0.0

    def test_single(self):
        assert feature_coverage([0.3]) == pytest.approx(0.3)

    def test_two_halves(self):
        assert feature_coverage([0.5, 0.5]) == pytest.approx(0.75)

    def test_full_value_saturates(self):
        assert feature_coverage([0.2, 1.0, 0.4]) == 1.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            feature_coverage([1.2])


class TestTaskUtility:
    def setup_method(self):
        self.ft = FeatureTable({0: {0: 0.5}, 1: {1: 1.0}, 2: {0: 0.5, 1: 0.5}}, 2)

    def test_weighted_average(self):
        task = Task(0, {0: 1.0, 1: 3.0})
        assert task_utility(task, {0}, self.ft) == pytest.approx(0.5 / 4)
        assert task_utility(task, {0, 2}, self.ft) == pytest.approx((0.75 + 3 * 0.5) / 4)
        assert task_utility(task, {0, 1, 2}, self.ft) == pytest.approx((0.75 + 3) / 4)

    def test_empty_set(self):
        assert task_utility(Task(0, {0: 1.0}), set(), self.ft) == 0.0

    def test_unvalued_nodes_contribute_nothing(self):
        task = Task(0, {0: 1.0})
        assert task_utility(task, {0, 7, 8}, self.ft) == task_utility(task, {0}, self.ft)

    def test_marginal_gain(self):
        task = Task(0, {0: 1.0})
        assert marginal_gain(task, {0}, self.ft, (2,)) == pytest.approx(0.25)
        with pytest.raises(ValueError):
            marginal_gain(task, {0}, self.ft, (0,))

    @settings(max_examples=150)
    @given(instances(), st.data())
    def test_bounds_and_monotone(self, inst, data):
        ft, task = inst
        a = data.draw(st.sets(st.integers(0, 7)))
        b = data.draw(st.sets(st.integers(0, 7)))
        fa, fab = task_utility(task, a, ft), task_utility(task, a | b, ft)
        assert -1e-12 <= fa <= fab + 1e-12 <= 1 + 2e-12

    @settings(max_examples=150)
    @given(instances(), st.data())
    def test_diminishing_returns(self, inst, data):
        ft, task = inst
        big = data.draw(st.sets(st.integers(0, 7)))
        small = data.draw(st.sets(st.sampled_from(sorted(big)))) if big else set()
        u = data.draw(st.integers(0, 7).filter(lambda x: x not in big))
        gain_small = task_utility(task, small | {u}, ft) - task_utility(task, small, ft)
        gain_big = task_utility(task, big | {u}, ft) - task_utility(task, big, ft)
        assert gain_small >= gain_big - 1e-12

    @settings(max_examples=100)
    @given(instances(), st.data())
    def test_coverage_matches_full_recompute(self, inst, data):
        ft, task = inst
        order = data.draw(st.permutations(range(8)))
        cov = Coverage(task)
        chosen = set()
        for i, u in enumerate(order):
            chain = tuple(order[i:i + 2])
            assert cov.gain([ft.values_of(w) for w in chain]) == pytest.approx(
                task_utility(task, chosen | set(chain), ft) - task_utility(task, chosen, ft), abs=1e-12
            )
            cov.add(ft.values_of(u))
            chosen.add(u)
            assert cov.utility() == pytest.approx(task_utility(task, chosen, ft), abs=1e-12)


class TestFeatureTable:
    def test_zeros_dropped(self):
        ft = FeatureTable({0: {0: 0.0}, 1: {0: 0.4}}, 1)
        assert ft.nodes() == [1]
        assert ft.members(0) == [1]
        assert ft.value(0, 0) == 0.0

    @pytest.mark.parametrize("row", [{0: 1.5}, {0: -0.1}, {0: math.nan}, {3: 0.5}])
    def test_rejects(self, row):
        with pytest.raises(ValueError):
            FeatureTable({0: row}, 2)

    def test_equality(self):
        assert FeatureTable({0: {0: 0.5}}, 1) == FeatureTable({0: {0: 0.5}, 1: {0: 0.0}}, 1)
        assert FeatureTable({0: {0: 0.5}}, 1) != FeatureTable({0: {0: 0.5}}, 2)


class TestTask:
    def test_target(self):
        assert Task(0, {0: 1.0}, 0.8, 0.1).target == pytest.approx(0.72)

    def test_rejects_zero_weights(self):
        with pytest.raises(ValueError):
            Task(0, {0: 0.0})
        with pytest.raises(ValueError):
            Task(0, {0: -1.0})

    def test_quota_above_one_warns(self, caplog):
        with caplog.at_level("WARNING"):
            Task(0, {0: 1.0}, quota=1.2)
        assert "exceeds" in caplog.text

    def test_sample_tasks(self):
        tasks = sample_tasks(10, 3, 50, 100, seed=1)
        assert len(tasks) == 50
        for t in tasks:
            assert len(t.weights) == 3 and set(t.weights.values()) == {1.0}
            assert 0 <= t.initial_node < 100
        assert tasks == sample_tasks(10, 3, 50, 100, seed=1)

    def test_sample_tasks_rejects(self):
        with pytest.raises(ValueError):
            sample_tasks(3, 4, 1, 10)


def test_generated_tables_submodular():
    for name, ft, n in submodularity_tables(0):
        assert check_submodularity(ft, n, 200, seed=1) == [], name


def test_checker_catches_supermodular_utility():
    def squared(task, s, ft):
        return task_utility(task, s, ft) ** 2

    _, ft, n = submodularity_tables(0)[0]
    bad = check_submodularity(ft, n, 300, seed=2, utility=squared)
    assert any("submodularity" in b for b in bad)
