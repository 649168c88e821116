"""Influence maximization on hypergraphs under an independent-cascade failure model."""

__version__ = "0.1.0"

from .hypergraph import (  # noqa: E402
    EmptyInputError,
    Hypergraph,
    HypergraphError,
    ParseError,
    PropagationParams,
    largest_connected_component,
    load_hyperedge_list,
)
from .generators import GenerationError, GeneratorSpec, generate  # noqa: E402
from .cascade import (  # noqa: E402
    CapacityError,
    CascadeResult,
    estimate_influence,
    exact_influence_bruteforce,
    simulate_once,
)
from .metrics import (  # noqa: E402
    comprehensive_metric,
    fitness,
    fitness_terms,
    hci1,
    hci2,
    hyperdegree,
    neighbor_priority_rank,
    overlap_influence,
    pagerank_scores,
)
from .optimizer import GAConfig, RunTrace, crossover_two_point, init_population, mutate, run  # noqa: E402
from .baselines import SelectorSpec, select_seeds  # noqa: E402
from .stats import wilcoxon_rank_sum  # noqa: E402
