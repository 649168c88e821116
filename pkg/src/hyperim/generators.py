"""Configuration-model generators for ER, scale-free and k-uniform hypergraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergraph import Hypergraph

KINDS = ("ER", "SF", "KUF")
MAX_REDRAWS = 100


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for :func:`generate`.

    ``ER``: Poisson hyperdegrees and Poisson (>=1) cardinalities.
    ``SF``: hyperdegrees with P(k) ~ k**lam on [2, sqrt(N)], Poisson (>=1) cardinalities.
    ``KUF``: every hyperedge has cardinality ``m``, Poisson hyperdegrees.
    Unset means are chosen so that N * <k> = M * <m>.
    """

    kind: str
    N: int
    M: int
    lam: float = -2.0
    m: int = 5
    mean_hyperdegree: float | None = None
    mean_cardinality: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.upper())
        if self.kind not in KINDS:
            raise GenerationError(f"unknown generator kind {self.kind!r}")
        if self.N < 1 or self.M < 1:
            raise GenerationError("N and M must be >= 1")
        if self.kind == "SF" and not self.lam < 0:
            raise GenerationError("SF requires a negative exponent")
        if self.kind == "KUF":
            if self.m < 1:
                raise GenerationError("KUF requires m >= 1")
            if self.m > self.N:
                raise GenerationError(f"KUF cardinality m={self.m} exceeds N={self.N}")


def power_law_sample(rng: np.random.Generator, size: int, lam: float, kmin: int, kmax: int) -> np.ndarray:
    """Integer draws with P(k) proportional to k**lam on [kmin, kmax], by inverse CDF."""
    ks = np.arange(kmin, kmax + 1)
    w = ks.astype(float) ** lam
    cdf = np.cumsum(w / w.sum())
    cdf[-1] = 1.0
    return ks[np.searchsorted(cdf, rng.random(size), side="right")]


def _poisson_at_least_one(rng, lam, size):
    out = rng.poisson(lam, size)
    bad = out < 1
    while bad.any():
        out[bad] = rng.poisson(lam, int(bad.sum()))
        bad = out < 1
    return out


def _balance(rng, seq, target, floor):
    """Nudge randomly chosen entries of ``seq`` by +-1 (never below ``floor``) until it sums to target."""
    seq = seq.copy()
    diff = int(target - seq.sum())
    n = len(seq)
    while diff > 0:
        idx = rng.integers(0, n, size=diff)
        np.add.at(seq, idx, 1)
        diff = int(target - seq.sum())
    while diff < 0:
        idx = rng.integers(0, n, size=-diff)
        # every draw here lowers the sum by exactly one, or is skipped at the floor
        for i in idx:
            if seq[i] > floor:
                seq[i] -= 1
                diff += 1
        if diff < 0 and (seq > floor).sum() == 0:
            raise GenerationError("cannot balance stub counts")
    return seq


def _sequences(spec: GeneratorSpec, rng: np.random.Generator):
    N, M = spec.N, spec.M
    if spec.kind == "ER":
        kbar = 5.0 if spec.mean_hyperdegree is None else spec.mean_hyperdegree
        mbar = spec.mean_cardinality if spec.mean_cardinality is not None else N * kbar / M
        k = rng.poisson(kbar, N)
        m = _poisson_at_least_one(rng, mbar, M)
        m = _balance(rng, m, k.sum(), 1)
    elif spec.kind == "SF":
        kmax = max(2, int(math.isqrt(N)))
        k = power_law_sample(rng, N, spec.lam, 2, kmax)
        mbar = spec.mean_cardinality if spec.mean_cardinality is not None else k.sum() / M
        m = _poisson_at_least_one(rng, mbar, M)
        m = _balance(rng, m, k.sum(), 1)
    else:
        kbar = spec.mean_hyperdegree if spec.mean_hyperdegree is not None else M * spec.m / N
        m = np.full(M, spec.m, dtype=np.int64)
        k = rng.poisson(kbar, N)
        # cardinalities are fixed for KUF, so hyperdegrees absorb the mismatch
        k = _balance(rng, k, m.sum(), 0)
    if m.max() > N:
        raise GenerationError("a sampled cardinality exceeds N; lower the mean cardinality")
    return k.astype(np.int64), m.astype(np.int64)


def _wire(rng, k, m):
    node_stubs = np.repeat(np.arange(len(k)), k)
    rng.shuffle(node_stubs)
    edges = []
    pos = 0
    total = len(node_stubs)
    for size in m:
        members: list[int] = []
        chosen: set[int] = set()
        for _ in range(size):
            if pos >= total:
                break
            v = int(node_stubs[pos])
            tries = 0
            while v in chosen and tries < MAX_REDRAWS and pos + 1 < total:
                j = int(rng.integers(pos + 1, total))
                node_stubs[pos], node_stubs[j] = node_stubs[j], node_stubs[pos]
                v = int(node_stubs[pos])
                tries += 1
            pos += 1
            if v in chosen:
                continue  # discard this stub pair
            chosen.add(v)
            members.append(v)
        edges.append(tuple(members))
    return edges


def generate(spec: GeneratorSpec, rng: np.random.Generator | int | None = None) -> Hypergraph:
    """Sample a hypergraph from the configuration model described by ``spec``.

    Node stubs are matched to hyperedge stubs uniformly at random. A stub that
    would repeat a node inside one hyperedge is swapped with a random later
    stub up to ``MAX_REDRAWS`` times, then the pair is dropped.
    """
    rng = np.random.default_rng(rng)
    k, m = _sequences(spec, rng)
    edges = _wire(rng, k, m)
    return Hypergraph(spec.N, tuple(edges))
