"""Independent-cascade failure propagation between nodes and hyperedges.

A failed node gets one chance to fail each incident hyperedge (probability
``t``); a failed hyperedge gets one chance to fail each of its nodes
(probability ``s``). Rounds alternate node->hyperedge and hyperedge->node
until a round produces nothing new.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .hypergraph import Hypergraph, PropagationParams

DEFAULT_TRIALS = 10_000
# sized so one batch of live-arc draws stays around 32 MB
_BATCH_CELLS = 1 << 22


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class CascadeResult:
    failed_nodes: frozenset[int]
    failed_hyperedges: frozenset[int]
    rounds: int
    attempts: int = 0


@dataclass(frozen=True)
class InfluenceEstimate:
    mean_failed_nodes: float
    mean_failed_hyperedges: float
    std_nodes: float
    std_hyperedges: float
    trials: int

    def __iter__(self):
        return iter((self.mean_failed_nodes, self.mean_failed_hyperedges, self.std_nodes, self.std_hyperedges))

    @property
    def se_nodes(self) -> float:
        return self.std_nodes / math.sqrt(self.trials)

    @property
    def se_hyperedges(self) -> float:
        return self.std_hyperedges / math.sqrt(self.trials)


@dataclass(frozen=True)
class LiveArcs:
    """One realization of arc liveness, indexed like ``Hypergraph.incidence_arrays``."""

    node_to_edge: np.ndarray
    edge_to_node: np.ndarray


def check_seeds(h: Hypergraph, seeds: Iterable[int]) -> list[int]:
    seeds = sorted({int(v) for v in seeds})
    if not seeds:
        raise ValueError("seed set must be non-empty")
    for v in seeds:
        if not 0 <= v < h.num_nodes:
            raise ValueError(f"seed {v} outside [0, {h.num_nodes})")
    return seeds


def sample_live_arcs(h: Hypergraph, p: PropagationParams, rng) -> LiveArcs:
    rng = np.random.default_rng(rng)
    d = h.total_incidences
    return LiveArcs(rng.random(d) < p.t, rng.random(d) < p.s)


@lru_cache(maxsize=64)
def _incidence_position(h: Hypergraph) -> dict[tuple[int, int], int]:
    nodes, edges = h.incidence_arrays
    return {(int(v), int(g)): j for j, (v, g) in enumerate(zip(nodes, edges))}


def simulate_once(h: Hypergraph, p: PropagationParams, seeds: Iterable[int], rng=None,
                  arcs: LiveArcs | None = None, debug: bool = False) -> CascadeResult:
    """Run one cascade realization from ``seeds``.

    Attempts are drawn lazily from ``rng``; pass ``arcs`` instead to replay a
    fixed live-arc realization (useful for coupling runs with different seeds).
    With ``debug`` every directed incidence is checked to be attempted at most once.
    """
    seeds = check_seeds(h, seeds)
    if arcs is None:
        rng = np.random.default_rng(rng)
        t, s = p.t, p.s

        def ne_live(v, g):
            return rng.random() < t

        def en_live(g, v):
            return rng.random() < s
    else:
        pos = _incidence_position(h)

        def ne_live(v, g):
            return bool(arcs.node_to_edge[pos[v, g]])

        def en_live(g, v):
            return bool(arcs.edge_to_node[pos[v, g]])

    failed_nodes = set(seeds)
    failed_edges: set[int] = set()
    attempted: set | None = set() if debug else None
    attempts = 0
    rounds = 0
    frontier = list(seeds)
    node_phase = True
    while True:
        rounds += 1
        new = []
        if node_phase:
            for v in frontier:
                for g in h.node_incidence[v]:
                    if g in failed_edges:
                        continue
                    attempts += 1
                    if attempted is not None:
                        assert ("ne", v, g) not in attempted, "arc attempted twice"
                        attempted.add(("ne", v, g))
                    if ne_live(v, g):
                        failed_edges.add(g)
                        new.append(g)
        else:
            for g in frontier:
                for v in h.edge_membership[g]:
                    if v in failed_nodes:
                        continue
                    attempts += 1
                    if attempted is not None:
                        assert ("en", g, v) not in attempted, "arc attempted twice"
                        attempted.add(("en", g, v))
                    if en_live(g, v):
                        failed_nodes.add(v)
                        new.append(v)
        if not new:
            break
        frontier = new
        node_phase = not node_phase
    return CascadeResult(frozenset(failed_nodes), frozenset(failed_edges), rounds, attempts)


class _BatchEngine:
    """Vectorized cascades over a batch of independent trials."""

    def __init__(self, h: Hypergraph):
        self.h = h
        self.inc_node, self.inc_edge = h.incidence_arrays
        self.edge_starts = np.concatenate(([0], np.cumsum(h.cardinalities)[:-1]))
        order = np.argsort(self.inc_node, kind="stable")
        self.by_node = order
        deg = h.hyperdegrees
        self.active_nodes = np.flatnonzero(deg > 0)
        starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
        self.node_starts = starts[self.active_nodes]

    def batch_size(self) -> int:
        d = max(1, self.h.total_incidences)
        return int(min(4096, max(16, _BATCH_CELLS // d)))

    def run(self, p: PropagationParams, seeds: list[int], trials: int, rng: np.random.Generator):
        h = self.h
        N, M = h.num_nodes, h.num_hyperedges
        d = len(self.inc_node)
        if d == 0:
            return np.full(trials, len(seeds), dtype=np.int64), np.zeros(trials, dtype=np.int64)
        live_ne = rng.random((trials, d)) < p.t
        live_en = rng.random((trials, d)) < p.s
        failed_n = np.zeros((trials, N), dtype=bool)
        failed_n[:, seeds] = True
        failed_e = np.zeros((trials, M), dtype=bool)
        front_n = failed_n.copy()
        rows = np.arange(trials)
        while len(rows):
            # only trials that are still spreading take part in a round
            hit = front_n[:, self.inc_node] & live_ne[rows]
            new_e = np.logical_or.reduceat(hit, self.edge_starts, axis=1) & ~failed_e[rows]
            keep = new_e.any(axis=1)
            rows, new_e = rows[keep], new_e[keep]
            if not len(rows):
                break
            failed_e[rows] |= new_e
            hit = (new_e[:, self.inc_edge] & live_en[rows])[:, self.by_node]
            new_n = np.zeros((len(rows), N), dtype=bool)
            new_n[:, self.active_nodes] = np.logical_or.reduceat(hit, self.node_starts, axis=1)
            new_n &= ~failed_n[rows]
            keep = new_n.any(axis=1)
            rows, front_n = rows[keep], new_n[keep]
            failed_n[rows] |= front_n
        return failed_n.sum(axis=1), failed_e.sum(axis=1)


def influence_samples(h: Hypergraph, p: PropagationParams, seeds: Iterable[int], trials: int,
                      rng=None, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial failed-node and failed-hyperedge counts.

    Trials are split into fixed-size batches; batch ``b`` draws from the
    ``b``-th child of the master seed, so the output depends only on the seed
    and ``trials``, never on ``workers``.
    """
    seeds = check_seeds(h, seeds)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seq = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(
        _entropy(rng))
    engine = _BatchEngine(h)
    size = engine.batch_size()
    nb = -(-trials // size)
    children = seq.spawn(nb)
    sizes = [min(size, trials - b * size) for b in range(nb)]

    def job(b):
        return engine.run(p, seeds, sizes[b], np.random.default_rng(children[b]))

    if workers == 1 or nb == 1:
        parts = [job(b) for b in range(nb)]
    else:
        with ThreadPoolExecutor(max_workers=workers or None) as pool:
            parts = list(pool.map(job, range(nb)))
    nodes = np.concatenate([a for a, _ in parts])
    edges = np.concatenate([b for _, b in parts])
    return nodes, edges


def _entropy(rng):
    if rng is None:
        return None
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63))
    raise TypeError("rng must be an int seed, SeedSequence, Generator or None")


def estimate_influence(h: Hypergraph, p: PropagationParams, seeds: Iterable[int],
                       trials: int = DEFAULT_TRIALS, rng=None, workers: int = 1) -> InfluenceEstimate:
    """Monte Carlo mean and sample standard deviation of failed nodes and hyperedges."""
    nodes, edges = influence_samples(h, p, seeds, trials, rng, workers)
    ddof = 1 if trials > 1 else 0
    return InfluenceEstimate(float(nodes.mean()), float(edges.mean()),
                             float(nodes.std(ddof=ddof)), float(edges.std(ddof=ddof)), trials)


# --- exact expectations on tiny instances -------------------------------------------------

Observable = Callable[[frozenset, frozenset], float]


def _counts(nodes, edges):
    return np.array([len(nodes), len(edges)], dtype=float)


def exact_expectation(h: Hypergraph, p: PropagationParams, seeds: Iterable[int],
                      observable: Callable[[frozenset, frozenset], object] = _counts,
                      max_rounds: int | None = None, max_incidences: int = 64):
    """Exact expectation of ``observable(failed_nodes, failed_hyperedges)``.

    Sums over every outcome of every attempted arc, grouped by round: within
    a round each candidate target fails independently with probability
    ``1 - (1-q)**c`` where ``c`` counts the frontier members touching it.
    Identical cascade states are memoized. ``max_rounds`` stops the process
    after that many rounds, counted as in :func:`simulate_once`.
    """
    seeds = check_seeds(h, seeds)
    if h.total_incidences > max_incidences:
        raise CapacityError(f"{h.total_incidences} incidences exceed the bound {max_incidences}")
    t, s = p.t, p.s
    memo: dict = {}

    def value(fn, fe, front, node_phase, rounds):
        if max_rounds is not None and rounds >= max_rounds:
            return observable(fn, fe)
        key = (fn, fe, front, node_phase, rounds if max_rounds is not None else 0)
        if key in memo:
            return memo[key]
        counts: dict[int, int] = {}
        if node_phase:
            for v in front:
                for g in h.node_incidence[v]:
                    if g not in fe:
                        counts[g] = counts.get(g, 0) + 1
            q = t
        else:
            for g in front:
                for v in h.edge_membership[g]:
                    if v not in fn:
                        counts[v] = counts.get(v, 0) + 1
            q = s
        targets = sorted(counts)
        probs = [1.0 - (1.0 - q) ** counts[x] for x in targets]
        total = 0.0
        for mask in itertools.product((False, True), repeat=len(targets)):
            w = 1.0
            for hit, pr in zip(mask, probs):
                w *= pr if hit else 1.0 - pr
            if w == 0.0:
                continue
            new = frozenset(x for x, hit in zip(targets, mask) if hit)
            if not new:
                total = total + w * observable(fn, fe)
            elif node_phase:
                total = total + w * value(fn, fe | new, new, False, rounds + 1)
            else:
                total = total + w * value(fn | new, fe, new, True, rounds + 1)
        memo[key] = total
        return total

    seed_set = frozenset(seeds)
    return value(seed_set, frozenset(), seed_set, True, 0)


def exact_influence_bruteforce(h: Hypergraph, p: PropagationParams, seeds: Iterable[int],
                               max_incidences: int = 13, max_rounds: int | None = None) -> tuple[float, float]:
    """Exact expected (failed nodes, failed hyperedges); refuses instances above ``max_incidences``."""
    out = exact_expectation(h, p, seeds, max_rounds=max_rounds, max_incidences=max_incidences)
    return float(out[0]), float(out[1])


def live_arc_enumeration(h: Hypergraph, p: PropagationParams, seeds: Iterable[int],
                         observable: Callable[[frozenset, frozenset], object] = _counts,
                         max_arcs: int = 20):
    """Literal sum over all 2**(2d) live/blocked arc assignments (reachability per assignment).

    Exponential by design; kept as the reference that :func:`exact_expectation` is checked against.
    """
    seeds = check_seeds(h, seeds)
    nodes, edges = h.incidence_arrays
    d = len(nodes)
    if 2 * d > max_arcs:
        raise CapacityError(f"{2 * d} arcs exceed the bound {max_arcs}")
    t, s = p.t, p.s
    total = 0.0
    for ne in itertools.product((False, True), repeat=d):
        w_ne = math.prod(t if a else 1.0 - t for a in ne)
        if w_ne == 0.0:
            continue
        for en in itertools.product((False, True), repeat=d):
            w = w_ne * math.prod(s if a else 1.0 - s for a in en)
            if w == 0.0:
                continue
            fn, fe = set(seeds), set()
            stack = list(seeds)
            while stack:
                v = stack.pop()
                for j in range(d):
                    if nodes[j] == v and ne[j] and edges[j] not in fe:
                        g = int(edges[j])
                        fe.add(g)
                        for jj in range(d):
                            if edges[jj] == g and en[jj] and nodes[jj] not in fn:
                                fn.add(int(nodes[jj]))
                                stack.append(int(nodes[jj]))
            total = total + w * observable(frozenset(fn), frozenset(fe))
    return total
