"""Immutable hypergraph with bidirectional incidence lists, plus ingestion and LCC."""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np


class HypergraphError(ValueError):
    pass


class ParseError(HypergraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyInputError(HypergraphError):
    pass


@dataclass(frozen=True)
class PropagationParams:
    """Uniform failure probabilities: node->hyperedge ``t`` and hyperedge->node ``s``."""

    t: float
    s: float

    def __post_init__(self):
        for name in ("t", "s"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class Hypergraph:
    """A hypergraph over dense node ids ``0..N-1`` and hyperedge ids ``0..M-1``.

    Build it from ``edge_membership``; the node-side incidence lists are
    derived and kept in ascending hyperedge order. ``labels`` optionally maps
    each node id back to the label it had in the source file.
    """

    num_nodes: int
    edge_membership: tuple[tuple[int, ...], ...]
    labels: tuple[Hashable, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        N = self.num_nodes
        if N < 0:
            raise HypergraphError("num_nodes must be non-negative")
        members = tuple(tuple(int(v) for v in e) for e in self.edge_membership)
        object.__setattr__(self, "edge_membership", members)
        for gamma, e in enumerate(members):
            if not e:
                raise HypergraphError(f"hyperedge {gamma} is empty")
            if len(set(e)) != len(e):
                raise HypergraphError(f"hyperedge {gamma} has a repeated node")
            for v in e:
                if not 0 <= v < N:
                    raise HypergraphError(f"hyperedge {gamma} references node {v} outside [0, {N})")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != N:
                raise HypergraphError("labels must have one entry per node")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[int]], num_nodes: int | None = None,
                   labels: Sequence[Hashable] | None = None) -> "Hypergraph":
        members = tuple(tuple(e) for e in edges)
        if num_nodes is None:
            num_nodes = 1 + max((max(e) for e in members if e), default=-1)
        return cls(num_nodes, members, None if labels is None else tuple(labels))

    @property
    def num_hyperedges(self) -> int:
        return len(self.edge_membership)

    @cached_property
    def node_incidence(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for gamma, e in enumerate(self.edge_membership):
            for v in e:
                inc[v].append(gamma)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def hyperdegrees(self) -> np.ndarray:
        """k_i for every node."""
        return np.array([len(x) for x in self.node_incidence], dtype=np.int64)

    @cached_property
    def cardinalities(self) -> np.ndarray:
        """m_gamma for every hyperedge."""
        return np.array([len(e) for e in self.edge_membership], dtype=np.int64)

    @property
    def total_incidences(self) -> int:
        return int(self.cardinalities.sum())

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        """Nodes sharing at least one hyperedge with each node, the node itself excluded."""
        out = []
        for i, inc in enumerate(self.node_incidence):
            ns: set[int] = set()
            for gamma in inc:
                ns.update(self.edge_membership[gamma])
            ns.discard(i)
            out.append(frozenset(ns))
        return tuple(out)

    @cached_property
    def incidence_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(node, hyperedge) pair per incidence, ordered by hyperedge then position."""
        nodes = np.fromiter((v for e in self.edge_membership for v in e), dtype=np.int64,
                            count=self.total_incidences)
        edges = np.repeat(np.arange(self.num_hyperedges, dtype=np.int64), self.cardinalities)
        return nodes, edges

    def label_of(self, i: int) -> Hashable:
        return i if self.labels is None else self.labels[i]

    def id_of(self, label: Hashable) -> int:
        if self.labels is None:
            i = int(label)
            if not 0 <= i < self.num_nodes:
                raise KeyError(label)
            return i
        try:
            return self._label_index[label]
        except KeyError:
            # int/str labels both show up on the command line
            return self._label_index[_coerce_label(label, self.labels)]

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels or ())}

    def check_node(self, i: int) -> int:
        if not 0 <= int(i) < self.num_nodes:
            raise IndexError(f"node id {i} outside [0, {self.num_nodes})")
        return int(i)

    def incidence_matrix(self) -> np.ndarray:
        H = np.zeros((self.num_nodes, self.num_hyperedges), dtype=np.int8)
        nodes, edges = self.incidence_arrays
        H[nodes, edges] = 1
        return H

    def to_lines(self, use_labels: bool = True) -> str:
        buf = io.StringIO()
        for e in self.edge_membership:
            toks = (self.label_of(v) if use_labels else v for v in e)
            buf.write(" ".join(str(x) for x in toks))
            buf.write("\n")
        return buf.getvalue()

    def __repr__(self):
        return f"Hypergraph(N={self.num_nodes}, M={self.num_hyperedges}, d={self.total_incidences})"


def _coerce_label(label, labels):
    if labels and isinstance(labels[0], int):
        return int(label)
    return str(label)


_SPLIT = re.compile(r"[\s,]+")
FORMATS = ("lines", "bipartite")


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "%")):
            continue
        yield lineno, [tok for tok in _SPLIT.split(line) if tok]


def _parse_label(tok: str, lineno: int, label_mode: str):
    if label_mode == "str":
        return tok
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"malformed integer label {tok!r}", lineno) from None


def load_hyperedge_list(source, format: str = "lines", label_mode: str = "int") -> Hypergraph:
    """Read a hypergraph from text, bytes, a binary/text stream or a ``Path``.

    ``lines``: one hyperedge per line, node labels separated by whitespace or
    commas. ``bipartite``: one ``node_label edge_label`` incidence per line.
    Integer labels are remapped to dense ids in ascending order; string labels
    (``label_mode="str"``) in order of first appearance. Repeated nodes in a
    hyperedge are collapsed.
    """
    text = _read_text(source)
    format = format.lower()
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if label_mode not in ("int", "str"):
        raise ValueError("label_mode must be 'int' or 'str'")

    raw_edges: list[list] = []
    if format == "lines":
        for lineno, toks in _tokens(text):
            edge = []
            for tok in toks:
                lab = _parse_label(tok, lineno, label_mode)
                if lab not in edge:
                    edge.append(lab)
            raw_edges.append(edge)
    else:
        by_edge: dict = {}
        for lineno, toks in _tokens(text):
            if len(toks) != 2:
                raise ParseError(f"expected 'node edge', got {len(toks)} tokens", lineno)
            node = _parse_label(toks[0], lineno, label_mode)
            edge = _parse_label(toks[1], lineno, label_mode)
            members = by_edge.setdefault(edge, [])
            if node not in members:
                members.append(node)
        keys = sorted(by_edge) if label_mode == "int" else list(by_edge)
        raw_edges = [by_edge[key] for key in keys]

    raw_edges = [e for e in raw_edges if e]
    if not raw_edges:
        raise EmptyInputError("no hyperedges found in input")

    seen: dict = {}
    for e in raw_edges:
        for lab in e:
            seen.setdefault(lab, None)
    order = sorted(seen) if label_mode == "int" else list(seen)
    index = {lab: i for i, lab in enumerate(order)}
    edges = [tuple(index[lab] for lab in e) for e in raw_edges]
    return Hypergraph(len(order), tuple(edges), tuple(order))


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    # os.PathLike
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def connected_components(h: Hypergraph) -> list[tuple[list[int], list[int]]]:
    """Components of the bipartite node-hyperedge graph as (nodes, hyperedges), ids sorted."""
    N = h.num_nodes
    seen_node = np.zeros(N, dtype=bool)
    seen_edge = np.zeros(h.num_hyperedges, dtype=bool)
    comps = []
    for start in range(N):
        if seen_node[start]:
            continue
        seen_node[start] = True
        nodes, edges, stack = [start], [], [start]
        while stack:
            v = stack.pop()
            for gamma in h.node_incidence[v]:
                if seen_edge[gamma]:
                    continue
                seen_edge[gamma] = True
                edges.append(gamma)
                for u in h.edge_membership[gamma]:
                    if not seen_node[u]:
                        seen_node[u] = True
                        nodes.append(u)
                        stack.append(u)
        comps.append((sorted(nodes), sorted(edges)))
    return comps


def induced(h: Hypergraph, nodes: Sequence[int], edges: Sequence[int]):
    """Sub-hypergraph on the given ids (edges must only touch ``nodes``), with old->new maps."""
    node_map = {old: new for new, old in enumerate(sorted(nodes))}
    edge_map = {old: new for new, old in enumerate(sorted(edges))}
    members = tuple(tuple(node_map[v] for v in h.edge_membership[g]) for g in sorted(edges))
    labels = None if h.labels is None else tuple(h.labels[v] for v in sorted(nodes))
    return Hypergraph(len(node_map), members, labels), node_map, edge_map


def largest_connected_component(h: Hypergraph):
    """Largest bipartite-connected piece of ``h`` with old->new node and edge id maps.

    Size is measured in nodes; ties go to the component holding the smallest node id.
    """
    comps = connected_components(h)
    if not comps:
        return Hypergraph(0, ()), {}, {}
    # components come out in order of their minimum node id, so max() keeps the first tie
    nodes, edges = max(comps, key=lambda c: len(c[0]))
    return induced(h, nodes, edges)
