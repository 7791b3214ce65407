"""CSV input (samples as rows) and the cluster front end."""
from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from ..algorithm import ThresholdSchedule, default_thresholds
from ..errors import InvalidArgument
from ..kmeans import KMeansConfig
from ..linalg import top2_singular
from ..metrics import misclustering_rate
from ..screening import select_top
from ..seeding import child
from .methods import parse_methods, run_method
from .simulate import build_id

SUBSAMPLE_STREAM = 2


class CSVParseError(InvalidArgument):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def read_csv(path: str):
    """(X as p x n, labels or None, feature names). A final ``label`` column is split off."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CSVParseError("empty file, expected a header row", 1)
    header = [h.strip() for h in rows[0]]
    has_label = header[-1].lower() == "label"
    names = header[:-1] if has_label else header
    if not names:
        raise CSVParseError("no feature columns", 1)
    data, labels = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CSVParseError(f"expected {len(header)} fields, found {len(row)}", lineno)
        try:
            vals = [float(c) for c in row]
        except ValueError:
            bad = next(c for c in row if not _is_float(c))
            raise CSVParseError(f"non-numeric cell {bad!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise CSVParseError("missing or non-finite value", lineno)
        if has_label:
            if vals[-1] not in (0.0, 1.0):
                raise CSVParseError(f"label must be 0 or 1, got {row[-1]!r}", lineno)
            labels.append(int(vals[-1]))
            vals = vals[:-1]
        data.append(vals)
    if len(data) < 2:
        raise InvalidArgument(f"need at least 2 samples, found {len(data)}")
    X = np.array(data).T
    return X, (np.array(labels, dtype=np.int64) if has_label else None), names


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def write_csv(path: str, X: np.ndarray, labels=None, names=None) -> None:
    """Inverse of :func:`read_csv`; values written with full precision."""
    p, n = X.shape
    names = names or [f"x{j}" for j in range(p)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(names) + (["label"] if labels is not None else []))
        for i in range(n):
            row = [repr(float(v)) for v in X[:, i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            w.writerow(row)


def cluster_csv(input_path: str, method: str, out_dir: str, *, screen_keep: int | None = None,
                seed: int = 0, thresholds: ThresholdSchedule | None = None,
                subsample_target: int | None = None, raw_scores: bool = False,
                kmeans_cfg: KMeansConfig | None = None) -> dict:
    """Cluster a CSV file; writes assignments.csv and diagnostics.json into ``out_dir``."""
    (method,) = parse_methods([method])
    if method == "ORACLE":
        raise InvalidArgument("ORACLE needs the generating means and covariance; not available for CSV input")
    X, labels, names = read_csv(input_path)
    rows = np.arange(X.shape[1])
    if subsample_target is not None:
        n = X.shape[1]
        if subsample_target < 1:
            raise InvalidArgument("subsample target must be positive")
        rng = np.random.default_rng(child(seed, SUBSAMPLE_STREAM))
        keep = rng.random(n) < min(1.0, subsample_target / n)
        rows = rows[keep]
        X = X[:, keep]
        labels = labels[keep] if labels is not None else None
        if X.shape[1] < 2:
            raise InvalidArgument(f"subsampling kept {X.shape[1]} rows; need at least 2")
    diag: dict = {"version": build_id(), "method": method, "seed": seed,
                  "n": int(X.shape[1]), "p_input": int(X.shape[0])}
    if screen_keep is not None:
        scr = select_top(X, screen_keep, normalize=not raw_scores)
        X = scr.reduced
        diag["screening"] = {"keep": screen_keep, "normalized": not raw_scores,
                             "kept_features": [names[j] for j in scr.kept_indices]}
    diag["p"] = int(X.shape[0])
    th = thresholds or default_thresholds(X.shape[1], X.shape[0])
    spec = top2_singular(X)
    res = run_method(method, X, kmeans_cfg=kmeans_cfg, seed=seed, thresholds=th)
    diag.update({"t1": spec.t1, "t2": spec.t2, "ratio": spec.ratio, "fstat": spec.fstat,
                 "tau": th.tau, "delta": th.delta, "branch": res.branch,
                 "objective": res.objective, "collapsed": bool(res.collapsed)})
    if labels is not None:
        diag["misclustering"] = misclustering_rate(res.assignment, labels)

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "assignments.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "cluster"] + (["label"] if labels is not None else []))
        for k, i in enumerate(rows):
            w.writerow([int(i), int(res.assignment[k])] + ([int(labels[k])] if labels is not None else []))
    with open(os.path.join(out_dir, "diagnostics.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(_jsonable(diag), sort_keys=True, indent=2) + "\n")
    return diag


def _jsonable(d):
    # json has no infinity; report an infinite ratio as a string
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}
