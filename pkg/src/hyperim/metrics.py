"""Collective-influence scores, the surrogate fitness, overlap metrics and centralities."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .hypergraph import Hypergraph, PropagationParams


@dataclass(frozen=True)
class NodeScore:
    node: int
    value: float


@dataclass(frozen=True)
class FitnessTerms:
    seeds: float
    hyperedges: float
    neighbors: float

    @property
    def total(self) -> float:
        return self.seeds + self.hyperedges + self.neighbors


def hyperdegree(h: Hypergraph, i: int) -> int:
    return len(h.node_incidence[h.check_node(i)])


def hci1(h: Hypergraph, p: PropagationParams, i: int) -> float:
    """k_i + sum over incident hyperedges of t * (m - 1)."""
    i = h.check_node(i)
    inc = h.node_incidence[i]
    return len(inc) + sum(p.t * (len(h.edge_membership[g]) - 1) for g in inc)


def hci2(h: Hypergraph, p: PropagationParams, i: int, n: Sequence[float] | None = None) -> float:
    """hci1 plus t * s * (k_j - 1) for every co-member j, weighted by (1 - n_j)."""
    i = h.check_node(i)
    if n is not None and len(n) != h.num_nodes:
        raise ValueError(f"seed indicator has length {len(n)}, expected {h.num_nodes}")
    k = h.hyperdegrees
    second = 0.0
    for g in h.node_incidence[i]:
        inner = 0.0
        for j in h.edge_membership[g]:
            if j == i:
                continue
            nj = 0.0 if n is None else float(n[j])
            inner += (1.0 - nj) * p.s * (k[j] - 1)
        second += p.t * inner
    return hci1(h, p, i) + second


def hci1_scores(h: Hypergraph, p: PropagationParams) -> np.ndarray:
    nodes, edges = h.incidence_arrays
    extra = np.zeros(h.num_nodes)
    np.add.at(extra, nodes, p.t * (h.cardinalities[edges] - 1))
    return h.hyperdegrees + extra


def hci2_scores(h: Hypergraph, p: PropagationParams, n: Sequence[float] | None = None) -> np.ndarray:
    nodes, edges = h.incidence_arrays
    k = h.hyperdegrees.astype(float)
    w = (1.0 - (np.zeros(h.num_nodes) if n is None else np.asarray(n, dtype=float))) * (k - 1)
    # per hyperedge: sum of w over members, then drop the node's own term
    edge_sum = np.bincount(edges, weights=w[nodes], minlength=h.num_hyperedges)
    contrib = p.t * p.s * (edge_sum[edges] - w[nodes])
    second = np.zeros(h.num_nodes)
    np.add.at(second, nodes, contrib)
    return hci1_scores(h, p) + second


def fitness_terms(h: Hypergraph, p: PropagationParams, S: Iterable[int]) -> FitnessTerms:
    """The three parts of the joint node/hyperedge fitness of seed set ``S``.

    ``hyperedges``: expected failures among hyperedges touching S after one
    node->hyperedge round. ``neighbors``: expected failures among first-layer
    neighbors outside S after the following hyperedge->node round, with
    ``p_e = 1 - (1-t)**|S & e|`` as the failure probability of hyperedge e.
    """
    S = list(S)
    seed_set = set(S)
    if len(seed_set) != len(S):
        raise ValueError("seed set contains duplicate ids")
    for v in S:
        h.check_node(v)
    keep = 1.0 - p.t
    touched: dict[int, int] = {}
    for v in S:
        for g in h.node_incidence[v]:
            touched[g] = touched.get(g, 0) + 1
    pe = {g: 1.0 - keep ** c for g, c in touched.items()}
    sigma1 = sum(pe.values())
    survive: dict[int, float] = {}
    for g, prob in pe.items():
        f = 1.0 - prob * p.s
        for mu in h.edge_membership[g]:
            if mu not in seed_set:
                survive[mu] = survive.get(mu, 1.0) * f
    sigma2 = sum(1.0 - x for x in survive.values())
    return FitnessTerms(float(len(S)), sigma1, sigma2)


def fitness(h: Hypergraph, p: PropagationParams, S: Iterable[int]) -> float:
    return fitness_terms(h, p, S).total


def overlap_influence(h: Hypergraph, candidate: int, others: Iterable[int]) -> float:
    """Share of the candidate's neighbors not already neighbors of ``others`` (1 if it has none)."""
    ns = h.neighbors[h.check_node(candidate)]
    if not ns:
        return 1.0
    covered: set[int] = set()
    for j in others:
        covered |= h.neighbors[h.check_node(j)]
    return len(ns - covered) / len(ns)


def comprehensive_metric(h: Hypergraph, p: PropagationParams, candidate: int, others: Iterable[int]) -> float:
    return overlap_influence(h, candidate, others) * hci1(h, p, candidate)


def pagerank_scores(h: Hypergraph, damping: float = 0.85, tol: float = 1e-10,
                    max_iter: int = 1000) -> list[NodeScore]:
    """PageRank on the unweighted clique expansion; dangling mass is spread uniformly."""
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    N = h.num_nodes
    if N == 0:
        return []
    A = clique_adjacency(h)
    out_deg = np.asarray(A.sum(axis=1)).ravel()
    dangling = out_deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.maximum(out_deg, 1))
    P = sp.diags(inv) @ A  # row-stochastic on non-dangling rows
    PT = P.T.tocsr()
    x = np.full(N, 1.0 / N)
    for _ in range(max_iter):
        nxt = damping * (PT @ x + x[dangling].sum() / N) + (1.0 - damping) / N
        nxt /= nxt.sum()
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < tol:
            break
    return [NodeScore(i, float(v)) for i, v in enumerate(x)]


def clique_adjacency(h: Hypergraph) -> sp.csr_matrix:
    nodes, edges = h.incidence_arrays
    H = sp.csr_matrix((np.ones(len(nodes)), (nodes, edges)), shape=(h.num_nodes, h.num_hyperedges))
    A = (H @ H.T).tocsr()
    A.setdiag(0)
    A.eliminate_zeros()
    A.data[:] = 1.0
    return A


def neighbor_priority_rank(h: Hypergraph, k: int) -> list[int]:
    """Greedy picks of the node with most neighbors not yet covered by earlier picks.

    A pick covers itself and its neighbors; ties go to the lower id. Gains
    only shrink as coverage grows, so stale heap entries are re-scored lazily.
    """
    N = h.num_nodes
    if not 0 <= k <= N:
        raise ValueError(f"k={k} must lie in [0, N={N}]")
    covered: set[int] = set()
    heap = [(-len(h.neighbors[v]), v) for v in range(N)]
    heapq.heapify(heap)
    chosen: list[int] = []
    picked = set()
    while len(chosen) < k:
        neg, v = heapq.heappop(heap)
        if v in picked:
            continue
        gain = len(h.neighbors[v] - covered)
        if gain == -neg:
            chosen.append(v)
            picked.add(v)
            covered.add(v)
            covered |= h.neighbors[v]
        else:
            heapq.heappush(heap, (-gain, v))
    return chosen


def top_k(scores: Sequence[float] | np.ndarray, k: int) -> list[int]:
    """Indices of the k largest scores, ties to the lower index."""
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((np.arange(len(scores)), -scores))
    return [int(i) for i in order[:k]]
