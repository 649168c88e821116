"""Command-line front end: ``hyperim <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from .baselines import STRATEGIES, SelectorSpec, select_seeds
from .cascade import estimate_influence, exact_influence_bruteforce
from .experiment import ExperimentSpec, emit_results, run_experiment
from .generators import GeneratorSpec, generate
from .hypergraph import PropagationParams, largest_connected_component, load_hyperedge_list
from .metrics import fitness, hci1_scores, hci2_scores, pagerank_scores
from .optimizer import GAConfig, VARIANTS, run

log = logging.getLogger("hyperim")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML file with the command's settings")
    p.add_argument("--seed", type=int, help="master random seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    p.add_argument("-v", "--verbose", action="store_true")


def _input(p: argparse.ArgumentParser, required=True):
    p.add_argument("--input", "-i", required=required, help="hypergraph file")
    p.add_argument("--input-format", choices=("lines", "bipartite"), default="lines")
    p.add_argument("--labels", choices=("int", "str"), default="int", help="node label type in the file")
    p.add_argument("--lcc", action="store_true", help="restrict to the largest connected component")


def _probs(p: argparse.ArgumentParser):
    p.add_argument("-t", type=float, default=0.1, help="node->hyperedge failure probability")
    p.add_argument("-s", type=float, default=0.1, help="hyperedge->node failure probability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic hypergraph in lines format")
    _common(g)
    g.add_argument("--kind", choices=("ER", "SF", "KUF", "er", "sf", "kuf"))
    g.add_argument("--nodes", "-N", type=int)
    g.add_argument("--edges", "-M", type=int)
    g.add_argument("--lam", type=float, default=-2.0, help="power-law exponent (SF)")
    g.add_argument("--m", type=int, default=5, help="hyperedge cardinality (KUF)")
    g.add_argument("--mean-hyperdegree", type=float)
    g.add_argument("--mean-cardinality", type=float)

    st = sub.add_parser("stats", help="size and degree/cardinality distributions")
    _common(st)
    _input(st)

    r = sub.add_parser("rank", help="select seeds with one strategy")
    _common(r)
    _input(r)
    _probs(r)
    r.add_argument("--strategy", choices=STRATEGIES, default="hci1")
    r.add_argument("-k", type=int, required=True)
    r.add_argument("--damping", type=float, default=0.85)
    r.add_argument("--scores", action="store_true", help="print every node's score instead")

    sm = sub.add_parser("simulate", help="Monte Carlo influence of a seed list")
    _common(sm)
    _input(sm)
    _probs(sm)
    sm.add_argument("--seeds", required=True, help="comma-separated node labels")
    sm.add_argument("--trials", type=int, default=10_000)

    o = sub.add_parser("optimize", help="run one GA variant and emit its trace")
    _common(o)
    _input(o)
    _probs(o)
    o.add_argument("--variant", choices=sorted(VARIANTS), default="gciim")
    o.add_argument("-k", type=int, required=True)
    o.add_argument("--popnum", type=int)
    o.add_argument("--maxgen", type=int)

    e = sub.add_parser("experiment", help="run a full sweep from a config file")
    _common(e)
    e.add_argument("--timing", action="store_true", help="record wall time (output is then not byte-stable)")

    x = sub.add_parser("test-oracle", help="exact expected influence on a tiny instance")
    _common(x)
    _input(x)
    _probs(x)
    x.add_argument("--seeds", required=True)
    x.add_argument("--max-incidences", type=int, default=13)
    return parser


def _load(args):
    h = load_hyperedge_list(Path(args.input), args.input_format, args.labels)
    if args.lcc:
        h = largest_connected_component(h)[0]
    return h


def _seeds(h, text):
    return [h.id_of(tok.strip()) for tok in text.split(",") if tok.strip()]


def _config(args) -> dict:
    if not args.config:
        return {}
    with open(args.config, encoding="utf-8") as fh:
        return yaml.safe_load(fh) or {}


def _write(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def cmd_generate(args):
    cfg = _config(args).get("generator", {})
    spec = GeneratorSpec(
        kind=args.kind or cfg.get("kind", "ER"),
        N=args.nodes or cfg.get("N"),
        M=args.edges or cfg.get("M"),
        lam=cfg.get("lam", args.lam),
        m=cfg.get("m", args.m),
        mean_hyperdegree=args.mean_hyperdegree or cfg.get("mean_hyperdegree"),
        mean_cardinality=args.mean_cardinality or cfg.get("mean_cardinality"),
    )
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    _write(args, generate(spec, seed).to_lines())


def cmd_stats(args):
    h = _load(args)
    k, m = h.hyperdegrees, h.cardinalities
    rows = [{"quantity": "hyperdegree", "value": int(v), "count": int(c)} for v, c in zip(*np.unique(k, return_counts=True))]
    rows += [{"quantity": "cardinality", "value": int(v), "count": int(c)} for v, c in zip(*np.unique(m, return_counts=True))]
    summary = {"N": h.num_nodes, "M": h.num_hyperedges, "d": h.total_incidences,
               "mean_hyperdegree": float(k.mean()) if len(k) else 0.0,
               "mean_cardinality": float(m.mean()) if len(m) else 0.0}
    if args.format == "json":
        _write(args, json.dumps({"summary": summary, "distribution": rows}, indent=2) + "\n")
    else:
        head = "".join(f"# {key}={val}\n" for key, val in summary.items())
        _write(args, head + _table(rows, "csv"))


def cmd_rank(args):
    h = _load(args)
    p = PropagationParams(args.t, args.s)
    if args.scores:
        if args.strategy == "hhd":
            vals = h.hyperdegrees
        elif args.strategy == "hci1":
            vals = hci1_scores(h, p)
        elif args.strategy == "hci2":
            vals = hci2_scores(h, p)
        elif args.strategy == "pr":
            vals = [s.value for s in pagerank_scores(h, args.damping)]
        else:
            raise SystemExit(f"--scores is not available for {args.strategy}")
        rows = [{"node": h.label_of(i), "score": float(v)} for i, v in enumerate(vals)]
        _write(args, _table(rows, args.format or "csv"))
        return
    cfg = _config(args)
    ga = GAConfig(**cfg.get("ga", {}))
    seed = args.seed if args.seed is not None else 0
    spec = SelectorSpec(args.strategy, args.k, args.damping, ga)
    rng = seed if spec.strategy in VARIANTS else np.random.default_rng(seed)
    seeds = select_seeds(h, p, spec, rng)
    rows = [{"rank": r, "node": h.label_of(v)} for r, v in enumerate(seeds)]
    _write(args, _table(rows, args.format or "csv"))


def cmd_simulate(args):
    h = _load(args)
    p = PropagationParams(args.t, args.s)
    seeds = _seeds(h, args.seeds)
    est = estimate_influence(h, p, seeds, args.trials, args.seed if args.seed is not None else 0, args.threads)
    row = {"trials": est.trials, "mean_nodes": est.mean_failed_nodes, "std_nodes": est.std_nodes,
           "mean_edges": est.mean_failed_hyperedges, "std_edges": est.std_hyperedges,
           "fitness": fitness(h, p, seeds)}
    _write(args, _table([row], args.format or "csv"))


def cmd_optimize(args):
    h = _load(args)
    p = PropagationParams(args.t, args.s)
    ga = dict(_config(args).get("ga", {}))
    if args.popnum:
        ga["popnum"] = args.popnum
    if args.maxgen is not None:
        ga["maxgen"] = args.maxgen
    if args.seed is not None:
        ga["rng_seed"] = args.seed
    cfg = GAConfig.for_variant(args.variant, **ga)
    trace = run(h, p, args.k, cfg)
    rows = [{"generation": g.generation, "best_fitness": g.best_fitness, "mean_fitness": g.mean_fitness,
             "evaluations": g.evaluations, "best": " ".join(str(h.label_of(v)) for v in g.best)}
            for g in trace.generations]
    _write(args, _table(rows, args.format or "csv"))


def cmd_experiment(args):
    if not args.config:
        raise SystemExit("experiment requires --config")
    spec = ExperimentSpec.from_yaml(args.config)
    if args.seed is not None:
        spec.master_seed = args.seed
    if args.timing:
        spec.timing = True
    fmt = args.format or spec.output_format
    out = args.out or spec.output_path
    records = run_experiment(spec, workers=args.threads)
    text = emit_results(records, fmt, out)
    if not out:
        sys.stdout.write(text)


def cmd_test_oracle(args):
    h = _load(args)
    p = PropagationParams(args.t, args.s)
    nodes, edges = exact_influence_bruteforce(h, p, _seeds(h, args.seeds), args.max_incidences)
    _write(args, _table([{"exact_mean_nodes": nodes, "exact_mean_edges": edges}], args.format or "csv"))


COMMANDS = {
    "generate": cmd_generate,
    "stats": cmd_stats,
    "rank": cmd_rank,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "experiment": cmd_experiment,
    "test-oracle": cmd_test_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError, RuntimeError, TypeError) as exc:
        print(f"hyperim {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
