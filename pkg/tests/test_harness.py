import dataclasses
import json
import os

import numpy as np
import pytest

from essc.algorithm import essc_cluster
from essc.datagen import CovarianceSpec, MixtureSpec, model_preset, sample_dataset
from essc.errors import InvalidArgument
from essc.kmeans import KMeansConfig
from essc.harness import (ExperimentConfig, cluster_csv, experiment_from_text, mixture_from_text,
                          mixture_to_text, read_csv, run_simulation, verify_theory, write_csv)
from essc.harness.cli import main
from essc.harness.config import ConfigError, format_vector, parse_kv, parse_vector
from essc.harness.csvio import CSVParseError


def test_parse_kv():
    kv = parse_kv("# header\nreps = 5   # trailing\n\nmodel=3\n")
    assert kv == {"reps": "5", "model": "3"}
    with pytest.raises(ConfigError, match="line 2"):
        parse_kv("a = 1\nbroken line\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_kv("a = 1\na = 2\n")


def test_vector_run_length():
    v = parse_vector("1*3, 0.5, 0*2")
    assert list(v) == [1, 1, 1, 0.5, 0, 0]
    assert np.array_equal(parse_vector(format_vector(v)), v)
    with pytest.raises(ConfigError):
        parse_vector("a*2")


def test_mixture_text_round_trip(tmp_path):
    for spec in (model_preset(3, 100), model_preset(1, 100)):
        back = mixture_from_text(mixture_to_text(spec))
        assert np.array_equal(back.mu1, spec.mu1) and np.array_equal(back.mu2, spec.mu2)
        assert back.cov.kind is spec.cov.kind and back.cov.param == spec.cov.param
        assert (back.n, back.pi) == (spec.n, spec.pi)
    S = np.array([[2.0, 0.5], [0.5, 1.0]])
    dense = MixtureSpec([1.0, 0.0], [0.0, 1.0], CovarianceSpec.dense(S), 0.4, 30)
    text = mixture_to_text(dense, dense_path=str(tmp_path / "S.npy"))
    assert np.array_equal(mixture_from_text(text).cov.matrix, S)
    np.savetxt(tmp_path / "S.csv", S, delimiter=",")
    text = "n = 30\nmu1 = 1, 0\nmu2 = 0, 1\ncov = dense S.csv\n"
    assert np.allclose(mixture_from_text(text, str(tmp_path)).cov.matrix, S)


def test_experiment_from_text():
    text = "model = 3\ngrid = 100, 200\nreps = 4\nmethods = essc, sc1\nseed = 9\nkmeans.restarts = 5\n"
    cfg = experiment_from_text(text)
    assert cfg.grid == (100, 200) and cfg.methods == ("ESSC", "SC1")
    assert cfg.kmeans.restarts == 5 and cfg.to_text() == text
    with pytest.raises(ConfigError, match="unknown keys"):
        experiment_from_text(text + "bogus = 1\n")
    with pytest.raises(ConfigError):
        experiment_from_text(text + "tau = 0.1\n")
    with pytest.raises(InvalidArgument, match="grid"):
        experiment_from_text("model = 3\ngrid = 150\nreps = 2\n")
    with pytest.raises(InvalidArgument):
        ExperimentConfig(model=3, grid=(100,), reps=2, methods=("NOPE",))


def test_single_replicate_has_no_stderr():
    rep = run_simulation(ExperimentConfig(model=3, grid=(100,), reps=1, methods=("ESSC",)))
    cell = rep.body()["cells"][0]
    assert cell["count"] == 1 and cell["stderr"] is None
    assert "(-)" in rep.table()


def test_reports_are_reproducible_and_parallel_safe():
    cfg = ExperimentConfig(model=4, grid=(30, 50), reps=4, methods=("ESSC", "SIGN", "ORACLE"),
                           seed=3, kmeans=KMeansConfig(restarts=5))
    a, b = run_simulation(cfg), run_simulation(cfg)
    assert a.body_json() == b.body_json()
    par = run_simulation(dataclasses.replace(cfg, jobs=2))
    assert par.body_json() == a.body_json()
    assert a.cell(30, "ESSC").summary is not None
    assert sum(a.cell(30, "ESSC").branches.values()) == 4


def test_failures_are_counted_not_fatal():
    spec = MixtureSpec([1.0, 0.0], [0.0, 1.0], CovarianceSpec.identity(2, 0.0), 0.5, 20)
    rep = run_simulation(ExperimentConfig(model=spec, grid=(20,), reps=3, methods=("ESSC", "ORACLE")))
    assert rep.cell(20, "ORACLE").failures == 3
    assert rep.cell(20, "ESSC").failures == 0
    assert "[3 failed]" in rep.table()


def test_report_files(tmp_path):
    rep = run_simulation(ExperimentConfig(model=3, grid=(100,), reps=2, methods=("ESSC",)))
    rep.write(str(tmp_path))
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["body"]["version"].startswith("essc ") and "wall_time_s" in doc["metadata"]
    lines = (tmp_path / "rates.csv").read_text().splitlines()
    assert lines[0] == "grid,method,replicate,rate" and len(lines) == 3


def _write_dataset(tmp_path, labels=True, seed=0):
    spec = model_preset(3, 100)
    X, y = sample_dataset(spec, seed)
    path = tmp_path / "data.csv"
    write_csv(str(path), X, y if labels else None)
    return str(path), X, y


def test_csv_round_trip_matches_in_memory(tmp_path):
    path, X, y = _write_dataset(tmp_path)
    X2, y2, names = read_csv(path)
    assert np.array_equal(X2, X) and np.array_equal(y2, y) and len(names) == 100
    diag = cluster_csv(path, "essc", str(tmp_path / "out"), seed=5)
    rows = (tmp_path / "out" / "assignments.csv").read_text().splitlines()
    assigned = np.array([int(r.split(",")[1]) for r in rows[1:]])
    assert np.array_equal(assigned, essc_cluster(X, seed=5).assignment)
    assert "misclustering" in diag and diag["branch"] == "FIRST"
    saved = json.loads((tmp_path / "out" / "diagnostics.json").read_text())
    assert {"t1", "t2", "fstat", "tau", "delta", "branch"} <= set(saved)


def test_csv_without_labels(tmp_path):
    path, _, _ = _write_dataset(tmp_path, labels=False)
    assert "misclustering" not in cluster_csv(path, "SC1", str(tmp_path / "o"))


@pytest.mark.parametrize("body,line", [
    ("a,b\n1,2\n3\n", 3),
    ("a,b\n1,2\n3,x\n", 3),
    ("a,label\n1,0\n2,5\n", 3),
])
def test_csv_parse_errors(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(CSVParseError) as err:
        read_csv(str(path))
    assert err.value.line == line and f"line {line}" in str(err.value)


def test_csv_needs_two_samples(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidArgument):
        read_csv(str(path))


def test_screening_and_subsample(tmp_path):
    path, _, _ = _write_dataset(tmp_path)
    diag = cluster_csv(path, "ESSC", str(tmp_path / "o"), screen_keep=20, subsample_target=120)
    assert diag["p"] == 20 and len(diag["screening"]["kept_features"]) == 20
    assert 60 <= diag["n"] <= 180
    with pytest.raises(InvalidArgument):
        cluster_csv(path, "ORACLE", str(tmp_path / "o"))


def test_imbalanced_regression(tmp_path):
    # 50 vs 250 samples, signal on 10 of 100 features; value frozen at first run
    p = 100
    mu1 = np.zeros(p)
    mu1[:10] = 1.5
    spec = MixtureSpec(mu1, np.zeros(p), CovarianceSpec.identity(p), 50 / 300, 300)
    y = np.array([1] * 50 + [0] * 250)
    X, _ = sample_dataset(spec, 31, labels=y)
    path = str(tmp_path / "imb.csv")
    write_csv(path, X, y)
    diag = cluster_csv(path, "ESSC", str(tmp_path / "o"), seed=0)
    assert diag["misclustering"] == pytest.approx(4 / 300)


def test_verify_rejects_unknown_kind():
    with pytest.raises(InvalidArgument):
        verify_theory("NOPE", n=10, p=10, reps=2)
    with pytest.raises(InvalidArgument):
        verify_theory("RATIO_MULT", p=10, reps=2)


def test_cli(tmp_path, capsys):
    with pytest.raises(SystemExit) as ex:
        main(["--version"])
    assert ex.value.code == 0 and "essc 0.1.0" in capsys.readouterr().out
    out = tmp_path / "sim"
    assert main(["simulate", "--model", "3", "--grid", "100", "--reps", "2",
                 "--methods", "ESSC,KMEANS", "--seed", "1", "--out", str(out)]) == 0
    assert (out / "report.txt").exists() and "ESSC" in capsys.readouterr().out
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("model = 3\ngrid = 100\nreps = 2\nmethods = ESSC\nseed = 1\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "s2")]) == 0
    body = json.loads((tmp_path / "s2" / "report.json").read_text())["body"]
    assert body["config"] == cfg.read_text()
    assert main(["verify", "--kind", "EXACT_RECOVERY", "--n", "100", "--p", "100",
                 "--reps", "3", "--out", str(tmp_path / "v.json")]) in (0, 1)
    assert json.loads((tmp_path / "v.json").read_text())["kind"] == "EXACT_RECOVERY"
    path, _, _ = _write_dataset(tmp_path)
    assert main(["cluster", "--input", path, "--method", "essc", "--seed", "2",
                 "--out", str(tmp_path / "c")]) == 0
    assert "misclustering=" in capsys.readouterr().out
    assert main(["cluster", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
    assert main(["cluster", "--input", path, "--tau", "0.1", "--out", str(tmp_path)]) == 2


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "essc", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("essc ")
