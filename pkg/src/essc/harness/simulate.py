"""Monte Carlo sweeps over a model grid."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..datagen import sample_dataset
from ..errors import InvalidArgument, NumericFailure
from ..metrics import ReplicateSummary, misclustering_rate, summarize
from ..seeding import child
from .config import ExperimentConfig
from .methods import run_method

log = logging.getLogger(__name__)

# stream key suffixes inside one replicate
DATA_STREAM, METHOD_STREAM = 0, 1


def build_id() -> str:
    from .. import __version__
    return f"essc {__version__}"


@dataclass
class Cell:
    grid_value: int
    method: str
    rates: list[float | None] = field(default_factory=list)
    branches: Counter = field(default_factory=Counter)
    errors: list[str] = field(default_factory=list)

    @property
    def valid(self) -> list[float]:
        return [r for r in self.rates if r is not None]

    @property
    def failures(self) -> int:
        return sum(r is None for r in self.rates)

    @property
    def summary(self) -> ReplicateSummary | None:
        v = self.valid
        return summarize(v) if len(v) >= 2 else None

    @property
    def mean(self) -> float | None:
        v = self.valid
        return float(np.mean(v)) if v else None

    def to_dict(self) -> dict:
        s = self.summary
        return {"grid": self.grid_value, "method": self.method, "mean": self.mean,
                "stderr": s.stderr if s else None, "count": len(self.valid),
                "failures": self.failures, "rates": self.rates,
                "branches": dict(sorted(self.branches.items())), "errors": self.errors}


def run_replicate(cfg: ExperimentConfig, gi: int, r: int) -> list[tuple]:
    """(method, rate or None, branch, error) for every method on one dataset."""
    spec = cfg.spec_for(cfg.grid[gi])
    X, y = sample_dataset(spec, child(cfg.seed, gi, r, DATA_STREAM))
    out = []
    for m in cfg.methods:
        try:
            res = run_method(m, X, kmeans_cfg=cfg.kmeans, seed=child(cfg.seed, gi, r, METHOD_STREAM),
                             thresholds=cfg.thresholds, spec=spec)
            out.append((m, misclustering_rate(res.assignment, y), res.branch, None))
        except (NumericFailure, InvalidArgument) as exc:
            log.warning("grid %s rep %d method %s failed: %s", cfg.grid[gi], r, m, exc)
            out.append((m, None, None, f"rep {r}: {type(exc).__name__}: {exc}"))
    return out


def _task(args):
    return run_replicate(*args)


@dataclass
class SimulationReport:
    config_text: str
    seed: int
    cells: list[Cell]
    version: str
    wall_time: float = 0.0

    def cell(self, grid_value: int, method: str) -> Cell:
        for c in self.cells:
            if c.grid_value == grid_value and c.method == method:
                return c
        raise KeyError((grid_value, method))

    def body(self) -> dict:
        """Everything that is reproducible from (config, seed)."""
        return {"version": self.version, "seed": self.seed, "config": self.config_text,
                "cells": [c.to_dict() for c in self.cells]}

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        doc = {"body": self.body(), "metadata": {"wall_time_s": round(self.wall_time, 3)}}
        return json.dumps(doc, sort_keys=True, indent=2)

    def table(self) -> str:
        methods = list(dict.fromkeys(c.method for c in self.cells))
        grid = list(dict.fromkeys(c.grid_value for c in self.cells))
        rows = [["grid"] + methods]
        for g in grid:
            row = [str(g)]
            for m in methods:
                c = self.cell(g, m)
                s = c.summary
                if s is not None:
                    txt = s.cell()
                elif c.mean is not None:
                    txt = f"{c.mean:.3f}(-)"
                else:
                    txt = "n/a"
                if c.failures:
                    txt += f" [{c.failures} failed]"
                row.append(txt)
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows) + "\n"

    def rates_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grid", "method", "replicate", "rate"])
        for c in self.cells:
            for i, r in enumerate(c.rates):
                w.writerow([c.grid_value, c.method, i, "" if r is None else repr(r)])
        return buf.getvalue()

    def write(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in (("report.json", self.to_json()), ("report.txt", self.table()),
                           ("rates.csv", self.rates_csv())):
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(text)


def run_simulation(cfg: ExperimentConfig) -> SimulationReport:
    start = time.perf_counter()
    tasks = [(cfg, gi, r) for gi in range(len(cfg.grid)) for r in range(cfg.reps)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        results = [_task(t) for t in tasks]

    cells = {(g, m): Cell(g, m) for g in cfg.grid for m in cfg.methods}
    # map preserves task order, so reduction is in replicate order either way
    for (_, gi, _), rows in zip(tasks, results):
        for m, rate, branch, err in rows:
            c = cells[(cfg.grid[gi], m)]
            c.rates.append(rate)
            if branch is not None and m == "ESSC":
                c.branches[branch] += 1
            if err:
                c.errors.append(err)
    return SimulationReport(cfg.to_text(), cfg.seed, list(cells.values()), build_id(),
                            time.perf_counter() - start)
