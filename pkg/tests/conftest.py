import numpy as np
import pytest

from hyperim import Hypergraph, PropagationParams, load_hyperedge_list

HG_FIT_TEXT = "1 2 3\n3 4\n3 5\n4 5 6\n"


@pytest.fixture
def hg_fit():
    """Six nodes labelled 1..6 (ids 0..5), hyperedges {1,2,3} {3,4} {3,5} {4,5,6}."""
    return load_hyperedge_list(HG_FIT_TEXT)


@pytest.fixture
def fit_params():
    return PropagationParams(0.3, 0.2)


def ids(h, *labels):
    return [h.id_of(lab) for lab in labels]


def random_hypergraph(rng, max_nodes=6, max_incidences=13, max_edges=5):
    """Small random hypergraph with d <= max_incidences (nodes may be isolated)."""
    while True:
        N = int(rng.integers(2, max_nodes + 1))
        M = int(rng.integers(1, max_edges + 1))
        edges = []
        for _ in range(M):
            size = int(rng.integers(1, min(N, 4) + 1))
            edges.append(tuple(sorted(int(v) for v in rng.choice(N, size=size, replace=False))))
        h = Hypergraph(N, tuple(edges))
        if h.total_incidences <= max_incidences:
            return h


ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def emit(number, ok, detail):
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        ACCEPTANCE.append(f"criterion {number:>2}: {status}  {detail}")
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
