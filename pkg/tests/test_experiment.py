import json

import pytest
import yaml

from hyperim.experiment import (
    CSV_HEADER,
    ExperimentError,
    ExperimentSpec,
    RunRecord,
    emit_results,
    is_finite_record,
    read_csv_results,
    read_json_results,
    run_experiment,
    summarize,
)

HG_FIT = [[1, 2, 3], [3, 4], [3, 5], [4, 5, 6]]


def spec_from(**over):
    cfg = {
        "source": {"inline": HG_FIT},
        "params": {"t": 1.0, "s": 1.0},
        "k_values": [1],
        "strategies": ["hhd"],
        "mc_trials": 200,
        "master_seed": 3,
    }
    cfg.update(over)
    return ExperimentSpec.from_dict(cfg)


def test_certain_cascade_record():
    (rec,) = run_experiment(spec_from())
    assert rec.strategy == "hhd" and rec.seeds == [2]
    assert rec.mean_nodes == 6.0 and rec.std_nodes == 0.0 and rec.mean_edges == 4.0
    assert is_finite_record(rec)


def test_rd_repeats_are_distinct_and_reproducible():
    spec = spec_from(source={"generator": {"kind": "ER", "N": 120, "M": 120, "seed": 1}},
                     params={"t": 0.2, "s": 0.2}, strategies=["rd"], k_values=[5], repeats=30)
    a = run_experiment(spec)
    assert len(a) == 30 and len({tuple(sorted(r.seeds)) for r in a}) == 30
    assert emit_results(a) == emit_results(run_experiment(spec))
    for r in a:
        assert r.mean_nodes >= r.k and r.mean_edges >= 0


def test_static_strategies_share_seeds_across_repeats():
    spec = spec_from(params={"t": 0.3, "s": 0.3}, strategies=["hci1", "pr"], k_values=[2], repeats=4)
    recs = run_experiment(spec)
    for name in ("hci1", "pr"):
        seeds = {tuple(r.seeds) for r in recs if r.strategy == name}
        assert len(seeds) == 1
    hci = [r.mean_nodes for r in recs if r.strategy == "hci1"]
    assert len(set(hci)) > 1  # Monte Carlo stream differs per repeat


def test_infeasible_k_yields_error_record():
    recs = run_experiment(spec_from(k_values=[1, 50]))
    assert recs[0].error is None and "exceeds" in recs[1].error
    assert "hhd,50,0,,,,,,0.0,\n" in emit_results(recs)


def test_gciim_strategy_entry():
    spec = spec_from(params={"t": 0.3, "s": 0.2}, k_values=[2],
                     strategies=[{"strategy": "gciim", "ga": {"popnum": 8, "maxgen": 3}}], repeats=2)
    recs = run_experiment(spec)
    assert len(recs) == 2 and all(len(set(r.seeds)) == 2 for r in recs)


def test_param_sweep_adds_columns():
    spec = spec_from(params=[{"t": 0.05, "s": 0.05}, {"t": 0.1, "s": 0.1}], strategies=["hhd", "hci1"])
    recs = run_experiment(spec)
    assert len(recs) == 4
    header = emit_results(recs).splitlines()[0]
    assert header == ",".join(CSV_HEADER + ["t", "s"])
    assert {(r["t"], r["s"]) for r in summarize(recs)} == {(0.05, 0.05), (0.1, 0.1)}


def test_threads_do_not_change_output():
    spec = spec_from(source={"generator": {"kind": "KUF", "N": 100, "M": 100, "m": 3, "seed": 2}},
                     params={"t": 0.3, "s": 0.3}, strategies=["rd", "hhd"], k_values=[3, 6], repeats=3)
    assert emit_results(run_experiment(spec, workers=1)) == emit_results(run_experiment(spec, workers=8))


def test_fingerprint_tracks_config():
    assert spec_from().fingerprint() == spec_from().fingerprint()
    assert spec_from(master_seed=4).fingerprint() != spec_from().fingerprint()


def test_spec_validation():
    with pytest.raises(ExperimentError):
        spec_from(repeats=0)
    with pytest.raises(ExperimentError):
        spec_from(mc_trials=0)
    with pytest.raises(ExperimentError):
        spec_from(bogus=1)


def test_missing_dataset():
    with pytest.raises(ExperimentError):
        run_experiment(spec_from(source={"path": "/nonexistent/file.txt"}))


def _record(i):
    return RunRecord("rd", 5, i, [i, i + 1, i + 7], 10.0 + i / 3, 1.0 / 7, 2.5 * i, 0.1 + i,
                     3.70640000001 + i, 0.0, 9, "abc", 0.1, 0.1)


def test_emit_empty_csv():
    assert emit_results([]) == ",".join(CSV_HEADER) + "\n"


def test_csv_round_trip(tmp_path):
    recs = [_record(i) for i in range(1000)]
    path = tmp_path / "out.csv"
    text = emit_results(recs, "csv", path)
    assert path.read_text() == text
    assert len(text.splitlines()) == 1001
    back = read_csv_results(text)
    for r, b in zip(recs, back):
        assert (b["mean_nodes"], b["std_nodes"], b["fitness"], b["seeds"]) == (r.mean_nodes, r.std_nodes, r.fitness, r.seeds)


def test_json_round_trip(tmp_path):
    recs = [_record(i) for i in range(1000)]
    text = emit_results(recs, "json", tmp_path / "out.json")
    assert read_json_results(text) == recs
    assert emit_results(recs, "json") == text


def test_emit_bad_path():
    with pytest.raises(ExperimentError):
        emit_results([_record(0)], "csv", "/nonexistent/dir/out.csv")


def test_yaml_loading(tmp_path):
    cfg = {"source": {"inline": HG_FIT}, "params": {"t": 0.1, "s": 0.1}, "k_values": [1, 2],
           "strategies": ["hhd", {"strategy": "pr", "damping": 0.9}], "output": {"path": "x.json", "format": "json"}}
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(cfg))
    spec = ExperimentSpec.from_yaml(path)
    assert spec.output_format == "json" and spec.strategies[1].damping == 0.9
