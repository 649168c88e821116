"""Genetic algorithm for seed selection with collective-influence initialization and
overlap-aware mutation, plus the two ablation variants."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .hypergraph import Hypergraph, PropagationParams
from .metrics import fitness, hci1_scores, top_k

log = logging.getLogger(__name__)

Individual = tuple  # tuple[int, ...] of distinct node ids

VARIANTS = {
    "gciim": ("hci", "cm"),
    "gci": ("hci", "random"),
    "ga": ("random", "random"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GAConfig:
    popnum: int = 512
    cxpb: float = 0.5
    mutpb: float = 0.5
    maxgen: int = 100
    tournsize: int = 5
    elite_count: int = 2
    gene_mut_rate: float | None = None  # None -> 1/k
    cand_sample: int | None = None  # None -> k
    init_mode: str = "hci"
    mutation_mode: str = "cm"
    init_split: str = "coin"  # "coin" or "halves"
    rng_seed: int = 0

    @classmethod
    def for_variant(cls, variant: str, **kw) -> "GAConfig":
        try:
            init_mode, mutation_mode = VARIANTS[variant.lower()]
        except KeyError:
            raise ConfigError(f"unknown variant {variant!r}; expected one of {sorted(VARIANTS)}") from None
        return cls(init_mode=init_mode, mutation_mode=mutation_mode, **kw)

    def validate(self):
        if self.popnum < 2 or self.popnum % 2:
            raise ConfigError("popnum must be even and >= 2")
        for name in ("cxpb", "mutpb"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.gene_mut_rate is not None and not 0.0 <= self.gene_mut_rate <= 1.0:
            raise ConfigError("gene_mut_rate must lie in [0, 1]")
        if self.maxgen < 0:
            raise ConfigError("maxgen must be >= 0")
        if self.tournsize < 1:
            raise ConfigError("tournsize must be >= 1")
        if not 0 <= self.elite_count < self.popnum:
            raise ConfigError("elite_count must lie in [0, popnum)")
        if self.cand_sample is not None and self.cand_sample < 1:
            raise ConfigError("cand_sample must be >= 1")
        if self.init_mode not in ("hci", "random"):
            raise ConfigError("init_mode must be 'hci' or 'random'")
        if self.mutation_mode not in ("cm", "random"):
            raise ConfigError("mutation_mode must be 'cm' or 'random'")
        if self.init_split not in ("coin", "halves"):
            raise ConfigError("init_split must be 'coin' or 'halves'")
        return self


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best: Individual
    evaluations: int


@dataclass
class RunTrace:
    generations: list[GenerationStats] = field(default_factory=list)
    best: Individual = ()
    best_fitness: float = float("-inf")

    @property
    def best_per_generation(self) -> list[float]:
        return [g.best_fitness for g in self.generations]

    def to_records(self) -> list[dict]:
        return [{**asdict(g), "best": list(g.best)} for g in self.generations]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for one (generation, slot) cell; independent of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def _check_individual(ind: Sequence[int], k: int, N: int):
    assert len(ind) == k and len(set(ind)) == k and all(0 <= v < N for v in ind), ind


# --- initialization -----------------------------------------------------------------------

def hci_weighted_individual(scores: np.ndarray, k: int, rng: np.random.Generator,
                            draws: np.ndarray | None = None) -> Individual:
    """Top-k nodes after scaling every score by its own uniform(0,1) draw."""
    if draws is None:
        draws = rng.random(len(scores))
    return tuple(top_k(scores * draws, k))


def random_individual(N: int, k: int, rng: np.random.Generator) -> Individual:
    return tuple(int(v) for v in rng.choice(N, size=k, replace=False))


def init_population(h: Hypergraph, p: PropagationParams, k: int, cfg: GAConfig,
                    rng: int | None = None) -> list[Individual]:
    """Initial population; with ``init_mode='hci'`` each member comes from the
    HCI-weighted branch or the uniform branch (coin flip, or exact halves)."""
    N = h.num_nodes
    if not 1 <= k <= N:
        raise ValueError(f"k={k} must lie in [1, N={N}]")
    seed = cfg.rng_seed if rng is None else rng
    scores = hci1_scores(h, p) if cfg.init_mode == "hci" else None
    pop = []
    for idx in range(cfg.popnum):
        r = substream(seed, 0, idx)
        if scores is None:
            use_hci = False
        elif cfg.init_split == "halves":
            use_hci = idx < cfg.popnum // 2
        else:
            use_hci = r.random() < 0.5
        ind = hci_weighted_individual(scores, k, r) if use_hci else random_individual(N, k, r)
        pop.append(ind)
    return pop


# --- variation operators ------------------------------------------------------------------

def _repair(child: list[int], N: int, rng: np.random.Generator) -> tuple[int, ...]:
    seen: set[int] = set()
    dup_pos = []
    for pos, v in enumerate(child):
        if v in seen:
            dup_pos.append(pos)
        else:
            seen.add(v)
    for pos in dup_pos:
        while True:
            v = int(rng.integers(N))
            if v not in seen:
                break
        child[pos] = v
        seen.add(v)
    return tuple(child)


def crossover_two_point(a: Sequence[int], b: Sequence[int], rng: np.random.Generator, N: int,
                        points: tuple[int, int] | None = None) -> tuple[Individual, Individual]:
    """Swap the segment [p1, p2) between parents, then replace repeated genes by absent nodes."""
    if len(a) != len(b):
        raise ValueError("parents must have equal length")
    size = len(a)
    if size < 2:
        return tuple(a), tuple(b)
    if points is None:
        p1, p2 = sorted(int(x) for x in rng.choice(size + 1, size=2, replace=False))
    else:
        p1, p2 = points
    c1 = list(a[:p1]) + list(b[p1:p2]) + list(a[p2:])
    c2 = list(b[:p1]) + list(a[p1:p2]) + list(b[p2:])
    return _repair(c1, N, rng), _repair(c2, N, rng)


class _CMScorer:
    """Cached pieces of the comprehensive metric for one hypergraph and parameter set."""

    def __init__(self, h: Hypergraph, p: PropagationParams):
        self.h = h
        self.hci = hci1_scores(h, p)

    def score(self, candidate: int, covered: set[int]) -> float:
        ns = self.h.neighbors[candidate]
        oi = 1.0 if not ns else len(ns - covered) / len(ns)
        return oi * self.hci[candidate]


def mutate(ind: Sequence[int], h: Hypergraph, p: PropagationParams, cfg: GAConfig,
           rng: np.random.Generator, positions: Sequence[int] | None = None,
           candidates: Sequence[Sequence[int]] | None = None, scorer: _CMScorer | None = None) -> Individual:
    """Multi-point mutation: each gene mutates with probability ``gene_mut_rate``.

    The replacement is picked from ``cand_sample`` nodes outside the
    individual, by largest comprehensive metric (``cm``) or uniformly
    (``random``). ``positions`` fixes which genes mutate and ``candidates``
    the pool for each mutating position, in order.
    """
    genes = list(ind)
    k = len(genes)
    N = h.num_nodes
    rate = 1.0 / k if cfg.gene_mut_rate is None else cfg.gene_mut_rate
    n_cand = k if cfg.cand_sample is None else cfg.cand_sample
    if cfg.mutation_mode == "cm" and scorer is None:
        scorer = _CMScorer(h, p)
    forced = iter(candidates) if candidates is not None else None
    chosen = set(range(k)) if positions is None else set(positions)
    for pos in range(k):
        if positions is None and rng.random() >= rate:
            continue
        if pos not in chosen:
            continue
        present = set(genes)
        if forced is not None:
            pool = [int(v) for v in next(forced)]
        else:
            outside = N - len(present)
            if outside == 0:
                continue
            pool = _sample_outside(N, present, min(n_cand, outside), rng)
        if not pool:
            continue
        if cfg.mutation_mode == "random":
            genes[pos] = pool[int(rng.integers(len(pool)))]
            continue
        covered: set[int] = set()
        for q, j in enumerate(genes):
            if q != pos:
                covered |= h.neighbors[j]
        best, best_val = None, float("-inf")
        for c in sorted(pool):
            val = scorer.score(c, covered)
            if val > best_val:
                best, best_val = c, val
        genes[pos] = best
    return tuple(genes)


def _sample_outside(N: int, present: set[int], size: int, rng: np.random.Generator) -> list[int]:
    if len(present) * 4 < N:
        out: list[int] = []
        taken = set(present)
        while len(out) < size:
            v = int(rng.integers(N))
            if v not in taken:
                taken.add(v)
                out.append(v)
        return out
    pool = np.setdiff1d(np.arange(N), np.fromiter(present, dtype=np.int64))
    return [int(v) for v in rng.choice(pool, size=size, replace=False)]


# --- selection and main loop --------------------------------------------------------------

def tournament(fits: Sequence[float], n: int, tournsize: int, rng: np.random.Generator) -> list[int]:
    """``n`` winners, each the fittest of ``tournsize`` draws with replacement (ties: lower index)."""
    fits = np.asarray(fits)
    picks = rng.integers(0, len(fits), size=(n, tournsize))
    out = []
    for row in picks:
        row = np.sort(row)
        out.append(int(row[np.argmax(fits[row])]))
    return out


class _FitnessCache:
    def __init__(self, h, p):
        self.h, self.p = h, p
        self.store: dict[tuple, float] = {}
        self.misses = 0

    def __call__(self, ind) -> float:
        key = tuple(sorted(ind))
        val = self.store.get(key)
        if val is None:
            val = fitness(self.h, self.p, key)
            self.store[key] = val
            self.misses += 1
        return val


def _elite_indices(fits: Sequence[float], count: int) -> list[int]:
    return top_k(fits, count)


def run(h: Hypergraph, p: PropagationParams, k: int, cfg: GAConfig, rng: int | None = None,
        check: bool = False) -> RunTrace:
    """Evolve ``cfg.maxgen`` generations and return the per-generation trace.

    Each generation keeps ``elite_count`` fittest members unchanged, fills the
    rest by tournament selection over the others, applies crossover to
    consecutive pairs and mutation to single offspring, and scores offspring
    with the surrogate fitness. Randomness for slot ``j`` of generation ``g``
    comes from its own substream of the master seed.
    """
    cfg.validate()
    N = h.num_nodes
    if not 1 <= k <= N:
        raise ValueError(f"k={k} must lie in [1, N={N}]")
    seed = cfg.rng_seed if rng is None else int(rng)
    evaluate = _FitnessCache(h, p)
    scorer = _CMScorer(h, p) if cfg.mutation_mode == "cm" else None

    pop = init_population(h, p, k, cfg, seed)
    fits = [evaluate(ind) for ind in pop]
    trace = RunTrace()

    def record(g, evals):
        b = int(np.argmax(fits))
        trace.generations.append(GenerationStats(g, float(fits[b]), float(np.mean(fits)), pop[b], evals))
        if fits[b] > trace.best_fitness:
            trace.best, trace.best_fitness = pop[b], float(fits[b])

    record(0, evaluate.misses)
    n_off = cfg.popnum - cfg.elite_count
    for g in range(1, cfg.maxgen + 1):
        elite_idx = _elite_indices(fits, cfg.elite_count)
        elite_set = set(elite_idx)
        pool = [i for i in range(cfg.popnum) if i not in elite_set]
        sel = tournament([fits[i] for i in pool], n_off, cfg.tournsize, substream(seed, g, cfg.popnum))
        offspring = [pop[pool[i]] for i in sel]
        rngs = [substream(seed, g, j) for j in range(n_off)]
        for j in range(0, n_off - 1, 2):
            if rngs[j].random() < cfg.cxpb:
                offspring[j], offspring[j + 1] = crossover_two_point(offspring[j], offspring[j + 1], rngs[j], N)
        for j in range(n_off):
            if rngs[j].random() < cfg.mutpb:
                offspring[j] = mutate(offspring[j], h, p, cfg, rngs[j], scorer=scorer)
        if check:
            for ind in offspring:
                _check_individual(ind, k, N)
        before = evaluate.misses
        off_fits = [evaluate(ind) for ind in offspring]
        pop = offspring + [pop[i] for i in elite_idx]
        fits = off_fits + [fits[i] for i in elite_idx]
        record(g, evaluate.misses - before)
        log.debug("gen %d best %.6f mean %.6f", g, trace.generations[-1].best_fitness,
                  trace.generations[-1].mean_fitness)
    return trace


def optimize(h: Hypergraph, p: PropagationParams, k: int, variant: str = "gciim",
             seed: int = 0, **overrides) -> RunTrace:
    cfg = GAConfig.for_variant(variant, rng_seed=seed, **overrides)
    return run(h, p, k, cfg)


def with_variant(cfg: GAConfig, variant: str) -> GAConfig:
    init_mode, mutation_mode = VARIANTS[variant.lower()]
    return replace(cfg, init_mode=init_mode, mutation_mode=mutation_mode)
