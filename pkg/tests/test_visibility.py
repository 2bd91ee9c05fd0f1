import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netexp import FeatureTable, Graph, InvalidChain, VisibilityError, gen_erdos_renyi, neighborhood
from netexp.checks import definitional_chains, exposed, random_connected_graph
from netexp.graph import is_connected_subset, max_degree
from netexp.visibility import (
    MAX_CHAIN_LENGTH,
    enumerate_explore_chains,
    enumerate_exploit_chains,
    exposed_frontier,
    exposure_gain,
    extend,
    is_saturated,
    new_view,
)

from conftest import path, v

from test_graph import connected_graphs


def sample_view(sample_net, **kw):
    view = new_view(sample_net, v(1), 2, 2, **kw)
    view.extend((v(2),)).extend((v(3),))
    return view


def brute_chains(g, s, max_len):
    """All ordered tuples of distinct nodes satisfying the chain constraints, found by exhaustive filtering."""
    out = []
    base = exposed(g, s)
    for l in range(1, max_len + 1):
        for tup in itertools.permutations(range(g.node_count), l):
            if tup[0] not in base:
                continue
            if l >= 2 and tup[1] not in exposed(g, s | {tup[0]}) - base:
                continue
            if l >= 3 and tup[2] not in exposed(g, s | {tup[1]}) - exposed(g, s | {tup[0]}):
                continue
            out.append(tup)
    return out


class TestNewView:
    def test_isolated_start(self):
        view = new_view(Graph(2, [(), ()]), 0)
        assert exposed_frontier(view) == set()
        assert is_saturated(view)

    def test_complete_graph(self):
        g = Graph.from_edges(5, itertools.combinations(range(5), 2))
        assert exposed_frontier(new_view(g, 3)) == {0, 1, 2, 4}

    def test_invalid_node(self):
        with pytest.raises(ValueError):
            new_view(path(3), 3)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            new_view(path(3), 0, 0, 1)
        with pytest.raises(ValueError):
            new_view(path(3), 0, 1, 3)  # l_val beyond l_deg + 1
        with pytest.raises(ValueError):
            new_view(path(3), 0, MAX_CHAIN_LENGTH + 1, 1)


class TestSampleNetwork:
    def test_frontier(self, sample_net):
        assert exposed_frontier(sample_view(sample_net)) == {v(4), v(5), v(6)}

    def test_value_region(self, sample_net):
        ft = FeatureTable({u: {0: 0.5} for u in range(13)}, 1)
        view = sample_view(sample_net, features=ft)
        for u in range(1, 10):
            view.feature_values(v(u))
        for u in (10, 11, 12, 13):
            with pytest.raises(VisibilityError):
                view.feature_values(v(u))

    def test_v7_exposure(self, sample_net):
        view = sample_view(sample_net)
        chain = (v(5), v(7))
        assert chain in enumerate_explore_chains(view)
        assert view.newly_exposed(chain) == {v(9), v(11), v(12)}
        assert exposure_gain(view, chain) == 3

    def test_extend_toward_v7(self, sample_net):
        view = sample_view(sample_net)
        extend(view, (v(5), v(7)))
        assert {v(9), v(11), v(12)} <= exposed_frontier(view)
        assert exposed_frontier(view) == {v(4), v(6), v(9), v(11), v(12)}

    def test_structure_beyond_l_deg_hidden(self, sample_net):
        view = sample_view(sample_net)
        with pytest.raises(VisibilityError):
            view.neighbors(v(11))


class TestFrontier:
    def test_all_selected(self):
        view = new_view(path(3), 0)
        view.extend((1,)).extend((2,))
        assert exposed_frontier(view) == set()

    def test_path_middle(self):
        assert exposed_frontier(new_view(path(3), 1)) == {0, 2}


class TestExposureGain:
    def test_leaf_with_covered_neighbor(self):
        # star: after picking the center every leaf exposes nothing
        g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        view = new_view(g, 0)
        assert all(exposure_gain(view, (u,)) == 0 for u in (1, 2, 3))

    def test_invalid_chain(self):
        view = new_view(path(4), 0, 2)
        with pytest.raises(InvalidChain):
            exposure_gain(view, (2,))
        with pytest.raises(InvalidChain):
            exposure_gain(view, (1, 3))

    @settings(max_examples=80, deadline=None)
    @given(connected_graphs(max_n=9), st.data())
    def test_matches_recomputation(self, g, data):
        l_deg = data.draw(st.integers(1, 3))
        view = new_view(g, 0, l_deg)
        for _ in range(data.draw(st.integers(0, 3))):
            if not view.frontier:
                break
            view.extend((data.draw(st.sampled_from(sorted(view.frontier))),))
        s = set(view.selected)
        for c in enumerate_explore_chains(view):
            gain = len(exposed(g, s | set(c)) - exposed(g, s))
            assert exposure_gain(view, c) == gain
            assert gain <= max_degree(g) * len(c)


class TestEnumeration:
    def test_path_two(self):
        view = new_view(path(4), 0, 2)
        assert enumerate_explore_chains(view) == [(1,), (1, 2)]
        assert brute_chains(path(4), {0}, 2) == [(1,), (1, 2)]

    def test_triangle(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert enumerate_explore_chains(new_view(g, 0, 2)) == [(1,), (2,)]

    def test_l1_is_frontier(self):
        g = gen_erdos_renyi(40, 0.1, 2)
        view = new_view(g, 0, 1)
        assert enumerate_explore_chains(view) == [(u,) for u in sorted(view.frontier)]

    def test_exploit_l1_is_frontier(self):
        view = new_view(path(5), 2, 2, 1)
        assert enumerate_exploit_chains(view) == [(1,), (3,)]

    def test_exploit_empty_when_everything_selected(self):
        view = new_view(path(2), 0, 1, 2)
        view.extend((1,))
        assert enumerate_exploit_chains(view) == []

    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(max_n=8), st.data())
    def test_matches_brute_force(self, g, data):
        l = data.draw(st.integers(1, 3))
        view = new_view(g, 0, l, min(l + 1, 3))
        for _ in range(data.draw(st.integers(0, 2))):
            if not view.frontier:
                break
            view.extend((min(view.frontier),))
        s = set(view.selected)
        chains = enumerate_explore_chains(view)
        assert sorted(chains) == sorted(brute_chains(g, s, l))
        assert sorted(enumerate_exploit_chains(view)) == sorted(brute_chains(g, s, view.l_val))
        for c in chains:
            assert c[-1] in neighborhood(g, s, l)
            assert is_connected_subset(g, s | set(c))

    def test_definitional_helper_agrees_with_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            g = random_connected_graph(rng, int(rng.integers(3, 8)), 0.4)
            assert sorted(definitional_chains(g, {0}, 3)) == sorted(brute_chains(g, {0}, 3))


class TestExtend:
    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(max_n=12), st.data())
    def test_incremental_caches(self, g, data):
        l_deg = data.draw(st.integers(1, 2))
        view = new_view(g, 0, l_deg, data.draw(st.integers(1, l_deg + 1)))
        while view.frontier:
            chains = enumerate_explore_chains(view)
            c = data.draw(st.sampled_from(chains))
            before = view.size
            extend(view, c)
            assert view.size == before + len(c)
            view.check_consistency()
            assert exposed_frontier(view) == neighborhood(g, view.selected, 1) - view.selected
            assert is_connected_subset(g, view.selected)
            for u in range(g.node_count):
                d = view.hop_distance(u)
                if d is not None:
                    assert d == min(
                        len(neighborhood(g, view.selected, k)) and k
                        for k in range(0, 4) if u in neighborhood(g, view.selected, k)
                    )

    def test_singleton_grows_by_one(self):
        view = new_view(path(5), 0)
        extend(view, (1,))
        assert view.size == 2

    def test_invalid_rejected(self):
        view = new_view(path(5), 0)
        with pytest.raises(InvalidChain):
            extend(view, (3,))
        with pytest.raises(InvalidChain):
            extend(view, (0,))


class TestSaturation:
    def test_frontier_covers_rest(self):
        g = Graph.from_edges(3, [(0, 1), (0, 2)])
        assert is_saturated(new_view(g, 0))

    def test_dominating_set(self):
        g = path(5)
        view = new_view(g, 1)
        view.extend((2,)).extend((3,))
        assert is_saturated(view)

    def test_path_start(self):
        assert not is_saturated(new_view(path(3), 0))

    @settings(max_examples=40, deadline=None)
    @given(connected_graphs(max_n=10), st.data())
    def test_saturated_means_no_single_exposure(self, g, data):
        view = new_view(g, 0)
        while view.frontier:
            if is_saturated(view):
                assert all(exposure_gain(view, (u,)) == 0 for u in view.frontier)
                assert neighborhood(g, view.selected, 1) == neighborhood(g, {0}, g.node_count)
            view.extend((data.draw(st.sampled_from(sorted(view.frontier))),))
