"""Experiment sweeps: (parameters x strategy x k x repeat) cells, Monte Carlo scoring, persistence."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .baselines import SelectorSpec, select_seeds
from .cascade import estimate_influence
from .generators import GeneratorSpec, generate
from .hypergraph import Hypergraph, PropagationParams, largest_connected_component, load_hyperedge_list
from .metrics import fitness
from .optimizer import GAConfig

log = logging.getLogger(__name__)

CSV_HEADER = ["strategy", "k", "repeat", "mean_nodes", "std_nodes", "mean_edges", "std_edges",
              "fitness", "seconds", "seed_list"]
SWEEP_COLUMNS = ["t", "s"]


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class StrategyEntry:
    strategy: str
    damping: float = 0.85
    ga: GAConfig = field(default_factory=GAConfig)

    @classmethod
    def parse(cls, raw) -> "StrategyEntry":
        if isinstance(raw, str):
            return cls(raw.lower())
        raw = dict(raw)
        ga = GAConfig(**raw.pop("ga", {}))
        return cls(raw.pop("strategy").lower(), ga=ga, **raw)

    def spec(self, k: int) -> SelectorSpec:
        return SelectorSpec(self.strategy, k, self.damping, self.ga)


@dataclass
class ExperimentSpec:
    """Declarative sweep.

    ``source`` is one of ``{"path": ..., "format": "lines"|"bipartite", "label_mode": ...}``,
    ``{"generator": {kind, N, M, ..., "seed": int}}`` or ``{"inline": [[...], ...]}``.
    ``params`` holds one or more (t, s) pairs.
    """

    source: dict
    params: list[PropagationParams]
    k_values: list[int]
    strategies: list[StrategyEntry]
    take_lcc: bool = True
    repeats: int = 1
    mc_trials: int = 10_000
    master_seed: int = 0
    output_path: str | None = None
    output_format: str = "csv"
    timing: bool = False

    def __post_init__(self):
        if self.repeats < 1:
            raise ExperimentError("repeats must be >= 1")
        if self.mc_trials < 1:
            raise ExperimentError("mc_trials must be >= 1")
        if not self.params:
            raise ExperimentError("at least one (t, s) pair is required")
        if not self.strategies:
            raise ExperimentError("at least one strategy is required")
        if self.output_format not in ("csv", "json"):
            raise ExperimentError("output format must be csv or json")

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentSpec":
        cfg = dict(cfg)
        raw_params = cfg.pop("params")
        if isinstance(raw_params, dict):
            raw_params = [raw_params]
        params = [PropagationParams(float(x["t"]), float(x["s"])) for x in raw_params]
        strategies = [StrategyEntry.parse(x) for x in cfg.pop("strategies")]
        out = cfg.pop("output", {}) or {}
        known = {f.name for f in fields(cls)}
        extra = set(cfg) - known
        if extra:
            raise ExperimentError(f"unknown config keys: {sorted(extra)}")
        return cls(params=params, strategies=strategies, output_path=out.get("path"),
                   output_format=out.get("format", "csv"), **cfg)

    @classmethod
    def from_yaml(cls, path) -> "ExperimentSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = [asdict(p) for p in self.params]
        return d

    def fingerprint(self) -> str:
        d = self.to_dict()
        for key in ("output_path", "output_format", "timing"):
            d.pop(key)
        blob = json.dumps({"spec": d, "version": __version__}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunRecord:
    strategy: str
    k: int
    repeat: int
    seeds: list[int]
    mean_nodes: float | None
    std_nodes: float | None
    mean_edges: float | None
    std_edges: float | None
    fitness: float | None
    seconds: float
    master_seed: int
    fingerprint: str
    t: float
    s: float
    error: str | None = None


def load_source(source: dict, take_lcc: bool = True) -> Hypergraph:
    if "inline" in source:
        text = "\n".join(" ".join(str(x) for x in e) for e in source["inline"])
        h = load_hyperedge_list(text, "lines", source.get("label_mode", "int"))
    elif "path" in source:
        try:
            h = load_hyperedge_list(Path(source["path"]), source.get("format", "lines"),
                                    source.get("label_mode", "int"))
        except OSError as exc:
            raise ExperimentError(f"cannot read dataset {source['path']}: {exc}") from exc
    elif "generator" in source:
        g = dict(source["generator"])
        seed = g.pop("seed", 0)
        h = generate(GeneratorSpec(**g), seed)
    else:
        raise ExperimentError("source needs one of: inline, path, generator")
    if take_lcc:
        h = largest_connected_component(h)[0]
    return h


def _cell_seed(master: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=key)


def _int_seed(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def run_experiment(spec: ExperimentSpec, workers: int = 1, hypergraph: Hypergraph | None = None) -> list[RunRecord]:
    """Evaluate every (params, strategy, k, repeat) cell; records come back in that nested order.

    Stochastic strategies reselect per repeat from a repeat-indexed substream;
    static ones select once and only the Monte Carlo stream varies by repeat.
    """
    h = hypergraph if hypergraph is not None else load_source(spec.source, spec.take_lcc)
    fp = spec.fingerprint()
    master = spec.master_seed
    N = h.num_nodes
    cells = []
    for pi, p in enumerate(spec.params):
        for si, entry in enumerate(spec.strategies):
            for ki, k in enumerate(spec.k_values):
                for r in range(spec.repeats):
                    cells.append((pi, si, ki, r))

    selections: dict = {}

    def select(key):
        pi, si, ki, r = key
        p, entry, k = spec.params[pi], spec.strategies[si], spec.k_values[ki]
        sel = entry.spec(k)
        started = time.perf_counter()
        seq = _cell_seed(master, 1, pi, si, ki, r)
        rng = _int_seed(seq) if sel.strategy in ("gciim", "gci", "ga") else np.random.default_rng(seq)
        seeds = select_seeds(h, p, sel, rng)
        return seeds, time.perf_counter() - started

    def selection_key(cell):
        pi, si, ki, r = cell
        return (pi, si, ki, 0) if spec.strategies[si].spec(1).deterministic else cell

    needed = sorted({selection_key(c) for c in cells if spec.k_values[c[2]] <= N})
    pool = ThreadPoolExecutor(max_workers=workers or None) if workers != 1 else None
    try:
        mapper = pool.map if pool else map
        for key, res in zip(needed, mapper(select, needed)):
            selections[key] = res

        def evaluate(cell):
            pi, si, ki, r = cell
            p, entry, k = spec.params[pi], spec.strategies[si], spec.k_values[ki]
            if k > N:
                return RunRecord(entry.strategy, k, r, [], None, None, None, None, None, 0.0, master, fp,
                                 p.t, p.s, error=f"k={k} exceeds N={N} after component extraction")
            seeds, sel_time = selections[selection_key(cell)]
            started = time.perf_counter()
            est = estimate_influence(h, p, seeds, spec.mc_trials, _cell_seed(master, 2, pi, si, ki, r))
            elapsed = sel_time + time.perf_counter() - started
            return RunRecord(entry.strategy, k, r, list(seeds), est.mean_failed_nodes, est.std_nodes,
                             est.mean_failed_hyperedges, est.std_hyperedges, fitness(h, p, seeds),
                             elapsed if spec.timing else 0.0, master, fp, p.t, p.s)

        records = list(mapper(evaluate, cells))
    finally:
        if pool:
            pool.shutdown()
    for rec in records:
        if rec.error:
            log.warning("%s k=%d: %s", rec.strategy, rec.k, rec.error)
    return records


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def format_csv(records: list[RunRecord], sweep_columns: bool | None = None) -> str:
    if sweep_columns is None:
        sweep_columns = len({(r.t, r.s) for r in records}) > 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER + (SWEEP_COLUMNS if sweep_columns else []))
    for r in records:
        row = [r.strategy, r.k, r.repeat, _num(r.mean_nodes), _num(r.std_nodes), _num(r.mean_edges),
               _num(r.std_edges), _num(r.fitness), _num(r.seconds), " ".join(str(v) for v in r.seeds)]
        if sweep_columns:
            row += [_num(r.t), _num(r.s)]
        w.writerow(row)
    return buf.getvalue()


def format_json(records: list[RunRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def emit_results(records: list[RunRecord], format: str = "csv", path=None) -> str:
    """Serialize records; write them to ``path`` when given. Returns the text."""
    format = format.lower()
    if format == "csv":
        text = format_csv(records)
    elif format == "json":
        text = format_json(records)
    else:
        raise ValueError("format must be csv or json")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ExperimentError(f"cannot write results to {path}: {exc}") from exc
    return text


def read_csv_results(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        out: dict = {"strategy": row["strategy"], "k": int(row["k"]), "repeat": int(row["repeat"])}
        for key in ("mean_nodes", "std_nodes", "mean_edges", "std_edges", "fitness", "seconds", "t", "s"):
            if key in row:
                out[key] = float(row[key]) if row[key] != "" else None
        out["seeds"] = [int(v) for v in row["seed_list"].split()]
        rows.append(out)
    return rows


def read_json_results(text: str) -> list[RunRecord]:
    return [RunRecord(**d) for d in json.loads(text)]


def summarize(records: list[RunRecord]) -> list[dict]:
    """Mean and std over repeats of each cell's Monte Carlo mean, grouped by (t, s, strategy, k)."""
    groups: dict = {}
    for r in records:
        if r.error is None:
            groups.setdefault((r.t, r.s, r.strategy, r.k), []).append(r)
    out = []
    for (t, s, strategy, k), recs in groups.items():
        nodes = np.array([r.mean_nodes for r in recs])
        edges = np.array([r.mean_edges for r in recs])
        ddof = 1 if len(recs) > 1 else 0
        out.append({"t": t, "s": s, "strategy": strategy, "k": k, "runs": len(recs),
                    "mean_nodes": float(nodes.mean()), "std_nodes": float(nodes.std(ddof=ddof)),
                    "mean_edges": float(edges.mean()), "std_edges": float(edges.std(ddof=ddof))})
    return out


def is_finite_record(r: RunRecord) -> bool:
    vals = (r.mean_nodes, r.std_nodes, r.mean_edges, r.std_edges, r.fitness)
    return all(v is not None and math.isfinite(v) and v >= 0 for v in vals)
