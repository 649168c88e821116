"""Seed-selection strategies behind one interface."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph, PropagationParams
from .metrics import hci1_scores, hci2_scores, neighbor_priority_rank, pagerank_scores, top_k
from .optimizer import GAConfig, VARIANTS, run, with_variant

STATIC = ("hhd", "hci1", "hci2", "np", "pr")
STOCHASTIC = ("rd", "gciim", "gci", "ga")
STRATEGIES = STATIC + STOCHASTIC


@dataclass(frozen=True)
class SelectorSpec:
    strategy: str
    k: int
    damping: float = 0.85
    ga: GAConfig = field(default_factory=GAConfig)

    def __post_init__(self):
        object.__setattr__(self, "strategy", self.strategy.lower())
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.strategy == "pr" and not 0.0 < self.damping < 1.0:
            raise ValueError("damping must lie in (0, 1)")

    @property
    def deterministic(self) -> bool:
        return self.strategy in STATIC


def select_seeds(h: Hypergraph, p: PropagationParams, spec: SelectorSpec, rng=None) -> list[int]:
    """k distinct seed ids chosen by ``spec.strategy``.

    ``rng`` only matters for ``rd`` (a Generator or seed) and the GA
    strategies (an integer master seed; defaults to ``spec.ga.rng_seed``).
    """
    k, name = spec.k, spec.strategy
    if k > h.num_nodes:
        raise ValueError(f"k={k} exceeds N={h.num_nodes}")
    if name == "hhd":
        return top_k(h.hyperdegrees, k)
    if name == "hci1":
        return top_k(hci1_scores(h, p), k)
    if name == "hci2":
        return top_k(hci2_scores(h, p), k)
    if name == "np":
        return neighbor_priority_rank(h, k)
    if name == "pr":
        return top_k([s.value for s in pagerank_scores(h, spec.damping)], k)
    if name == "rd":
        gen = np.random.default_rng(rng)
        return [int(v) for v in gen.choice(h.num_nodes, size=k, replace=False)]
    assert name in VARIANTS
    cfg = with_variant(spec.ga, name)
    seed = cfg.rng_seed if rng is None else int(rng)
    return list(run(h, p, k, cfg, seed).best)
