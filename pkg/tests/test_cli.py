import csv
import io
import json

import yaml

from hyperim.cli import main
from hyperim.hypergraph import load_hyperedge_list

from conftest import HG_FIT_TEXT


def _fit(tmp_path):
    path = tmp_path / "fit.txt"
    path.write_text(HG_FIT_TEXT)
    return str(path)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_generate_and_stats(tmp_path, capsys):
    out = tmp_path / "kuf.txt"
    assert main(["generate", "--kind", "KUF", "-N", "200", "-M", "200", "--m", "4", "--seed", "3", "--out", str(out)]) == 0
    h = load_hyperedge_list(out.read_text())
    assert h.cardinalities.max() <= 4
    assert main(["stats", "--input", str(out), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"]["M"] == 200


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        main(["generate", "--kind", "SF", "-N", "300", "-M", "80", "--seed", "9", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_rank(tmp_path, capsys):
    assert main(["rank", "--input", _fit(tmp_path), "--strategy", "hci1", "-k", "2", "-t", "0.3", "-s", "0.2"]) == 0
    assert [r["node"] for r in rows(capsys.readouterr().out)] == ["3", "4"]
    assert main(["rank", "--input", _fit(tmp_path), "--strategy", "hci1", "-k", "1", "--scores", "-t", "0.3"]) == 0
    assert rows(capsys.readouterr().out)[2] == {"node": "3", "score": "4.2"}


def test_simulate_uses_labels(tmp_path, capsys):
    assert main(["simulate", "--input", _fit(tmp_path), "--seeds", "3", "-t", "1", "-s", "1", "--trials", "50"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["mean_nodes"]) == 6.0 and float(row["mean_edges"]) == 4.0


def test_test_oracle(tmp_path, capsys):
    path = tmp_path / "pair.txt"
    path.write_text("1 2\n")
    assert main(["test-oracle", "--input", str(path), "--seeds", "1", "-t", "0.5", "-s", "0.5"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["exact_mean_nodes"]) == 1.25 and float(row["exact_mean_edges"]) == 0.5


def test_optimize_trace(tmp_path, capsys):
    assert main(["optimize", "--input", _fit(tmp_path), "-k", "2", "--popnum", "8", "--maxgen", "3",
                 "-t", "0.3", "-s", "0.2", "--format", "json"]) == 0
    trace = json.loads(capsys.readouterr().out)
    assert [g["generation"] for g in trace] == [0, 1, 2, 3]


def test_experiment_byte_stable(tmp_path):
    cfg = {"source": {"inline": [[1, 2, 3], [3, 4], [3, 5], [4, 5, 6]]}, "params": {"t": 0.3, "s": 0.3},
           "k_values": [1, 2], "strategies": ["hhd", "rd"], "repeats": 3, "mc_trials": 500}
    conf = tmp_path / "exp.yaml"
    conf.write_text(yaml.safe_dump(cfg))
    outs = []
    for threads in ("1", "8"):
        out = tmp_path / f"out{threads}.csv"
        assert main(["experiment", "--config", str(conf), "--seed", "5", "--threads", threads, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["simulate", "--input", str(tmp_path / "missing.txt"), "--seeds", "1"]) != 0
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\nx y\n")
    assert main(["stats", "--input", str(bad)]) != 0
    assert "line 2" in capsys.readouterr().err
