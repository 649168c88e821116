import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperim.cascade import (
    CapacityError,
    estimate_influence,
    exact_expectation,
    exact_influence_bruteforce,
    influence_samples,
    live_arc_enumeration,
    sample_live_arcs,
    simulate_once,
)
from hyperim.hypergraph import Hypergraph, PropagationParams, connected_components

from conftest import ids, random_hypergraph

PAIR = Hypergraph(2, ((0, 1),))
HALF = PropagationParams(0.5, 0.5)


def reachable(h, seeds):
    """Nodes and hyperedges reachable from seeds in the bipartite expansion."""
    nodes, edges = set(seeds), set()
    for comp_nodes, comp_edges in connected_components(h):
        if set(comp_nodes) & set(seeds):
            nodes |= set(comp_nodes)
            edges |= set(comp_edges)
    return nodes, edges


class TestSimulateOnce:
    def test_certain_cascade_fills_component(self, hg_fit):
        res = simulate_once(hg_fit, PropagationParams(1, 1), ids(hg_fit, 3), rng=0)
        assert len(res.failed_nodes) == 6 and len(res.failed_hyperedges) == 4

    def test_certain_cascade_stays_in_component(self):
        h = Hypergraph(7, ((0, 1, 2), (2, 3), (2, 4), (3, 4, 6), (5,)))
        res = simulate_once(h, PropagationParams(1, 1), [2], rng=0)
        nodes, edges = reachable(h, [2])
        assert res.failed_nodes == nodes and res.failed_hyperedges == edges

    def test_zero_t(self, hg_fit):
        res = simulate_once(hg_fit, PropagationParams(0, 1), [0, 3], rng=5)
        assert res.failed_nodes == {0, 3} and not res.failed_hyperedges and res.rounds == 1

    def test_argument_errors(self, hg_fit):
        with pytest.raises(ValueError):
            simulate_once(hg_fit, HALF, [], rng=0)
        with pytest.raises(ValueError):
            simulate_once(hg_fit, HALF, [6], rng=0)

    @pytest.mark.parametrize("seed", range(30))
    def test_result_invariants_and_single_attempts(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hypergraph(rng, max_nodes=10, max_incidences=30, max_edges=8)
        seeds = [int(rng.integers(h.num_nodes))]
        res = simulate_once(h, PropagationParams(0.6, 0.6), seeds, rng=rng, debug=True)
        assert set(seeds) <= res.failed_nodes
        for g in res.failed_hyperedges:
            assert set(h.edge_membership[g]) & res.failed_nodes
        for v in res.failed_nodes - set(seeds):
            assert set(h.node_incidence[v]) & res.failed_hyperedges
        assert res.rounds <= h.num_nodes + h.num_hyperedges
        assert res.attempts <= 2 * h.total_incidences

    @pytest.mark.parametrize("seed", range(20))
    def test_monotone_in_seeds_under_shared_arcs(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hypergraph(rng, max_nodes=10, max_incidences=30, max_edges=8)
        arcs = sample_live_arcs(h, PropagationParams(0.5, 0.5), rng)
        small = [0]
        big = sorted({0, int(rng.integers(h.num_nodes))})
        a = simulate_once(h, HALF, small, arcs=arcs)
        b = simulate_once(h, HALF, big, arcs=arcs)
        assert a.failed_nodes <= b.failed_nodes
        assert a.failed_hyperedges <= b.failed_hyperedges


class TestExact:
    def test_pair_by_hand(self):
        assert exact_influence_bruteforce(PAIR, HALF, [0]) == pytest.approx((1.25, 0.5), abs=1e-15)

    def test_degenerate(self, hg_fit):
        seeds = ids(hg_fit, 1, 6)
        assert exact_influence_bruteforce(hg_fit, PropagationParams(0, 0), seeds) == (2.0, 0.0)
        assert exact_influence_bruteforce(hg_fit, PropagationParams(1, 1), seeds) == (6.0, 4.0)

    def test_capacity(self):
        h = Hypergraph(8, ((0, 1, 2, 3, 4, 5, 6, 7), (0, 1, 2, 3, 4, 5, 6)))
        with pytest.raises(CapacityError):
            exact_influence_bruteforce(h, HALF, [0])

    @pytest.mark.parametrize("seed", range(25))
    def test_frontier_recursion_matches_arc_enumeration(self, seed):
        rng = np.random.default_rng(100 + seed)
        h = random_hypergraph(rng, max_nodes=5, max_incidences=8, max_edges=4)
        p = PropagationParams(float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95)))
        seeds = sorted(set(int(v) for v in rng.integers(0, h.num_nodes, size=2)))
        fast = exact_expectation(h, p, seeds)
        slow = live_arc_enumeration(h, p, seeds, max_arcs=16)
        assert fast == pytest.approx(slow, abs=1e-12)


class TestEstimate:
    def test_pair_mean(self):
        est = estimate_influence(PAIR, HALF, [0], trials=100_000, rng=42)
        assert abs(est.mean_failed_nodes - 1.25) <= 3 * est.se_nodes

    def test_certain_cascade_has_no_variance(self, hg_fit):
        est = estimate_influence(hg_fit, PropagationParams(1, 1), [0], trials=257, rng=1)
        assert (est.mean_failed_nodes, est.std_nodes, est.mean_failed_hyperedges) == (6.0, 0.0, 4.0)

    def test_hgfit_edges_against_exact(self, hg_fit):
        p = PropagationParams(0.3, 0.2)
        seeds = ids(hg_fit, 3, 4)
        exact_nodes, exact_edges = exact_influence_bruteforce(hg_fit, p, seeds)
        est = estimate_influence(hg_fit, p, seeds, trials=100_000, rng=7)
        assert abs(est.mean_failed_hyperedges - exact_edges) <= 3 * est.se_hyperedges
        assert abs(est.mean_failed_nodes - exact_nodes) <= 3 * est.se_nodes

    def test_worker_count_does_not_change_samples(self):
        h = random_hypergraph(np.random.default_rng(3), max_nodes=8, max_incidences=20)
        # many small batches so the thread pool really splits the work
        a = influence_samples(h, HALF, [0], 20_000, rng=9, workers=1)
        b = influence_samples(h, HALF, [0], 20_000, rng=9, workers=4)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_deterministic_seed(self, hg_fit):
        a = estimate_influence(hg_fit, HALF, [2], 5000, rng=3)
        b = estimate_influence(hg_fit, HALF, [2], 5000, rng=3)
        assert a == b

    def test_single_trial(self, hg_fit):
        est = estimate_influence(hg_fit, HALF, [2], 1, rng=0)
        assert est.std_nodes == 0.0

    def test_rejects_zero_trials(self, hg_fit):
        with pytest.raises(ValueError):
            estimate_influence(hg_fit, HALF, [2], 0)

    def test_batch_engine_agrees_with_lazy_simulation(self, hg_fit):
        p = PropagationParams(0.45, 0.35)
        rng = np.random.default_rng(0)
        lazy = [len(simulate_once(hg_fit, p, [2], rng).failed_nodes) for _ in range(20_000)]
        fast, _ = influence_samples(hg_fit, p, [2], 20_000, rng=1)
        se = math.sqrt(np.var(lazy) / len(lazy) + np.var(fast) / len(fast))
        assert abs(np.mean(lazy) - fast.mean()) <= 4 * se


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_estimate_never_below_seed_count(seed, t, s):
    rng = np.random.default_rng(seed)
    h = random_hypergraph(rng, max_nodes=8, max_incidences=20)
    seeds = sorted(set(int(v) for v in rng.integers(0, h.num_nodes, size=2)))
    nodes, edges = influence_samples(h, PropagationParams(t, s), seeds, 64, rng=seed)
    assert (nodes >= len(seeds)).all() and (nodes <= h.num_nodes).all()
    assert (edges >= 0).all() and (edges <= h.num_hyperedges).all()
