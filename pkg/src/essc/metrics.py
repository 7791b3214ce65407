"""Misclustering rate and replicate summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


def _labels(v, name):
    a = np.asarray(v).ravel()
    if a.size and not np.all((a == 0) | (a == 1)):
        raise InvalidArgument(f"{name} must contain only 0/1 labels")
    return a.astype(np.int8)


def hamming_errors(pred, truth) -> int:
    """Disagreement count minimised over the global label swap."""
    p, t = _labels(pred, "pred"), _labels(truth, "truth")
    if p.shape != t.shape:
        raise InvalidArgument(f"length mismatch: {p.size} vs {t.size}")
    if p.size == 0:
        raise InvalidArgument("need at least one label")
    wrong = int(np.count_nonzero(p != t))
    return min(wrong, p.size - wrong)


def misclustering_rate(pred, truth) -> float:
    return hamming_errors(pred, truth) / np.asarray(truth).size


@dataclass(frozen=True)
class ReplicateSummary:
    mean: float
    stderr: float
    count: int
    raw: tuple[float, ...]

    def cell(self, digits: int = 3) -> str:
        """Table cell "mean(stderr)" with the leading zero dropped."""
        def fmt(x):
            s = f"{x:.{digits}f}"
            return s[1:] if s.startswith("0.") else s
        return f"{fmt(self.mean)}({fmt(self.stderr)})"


def summarize(rates) -> ReplicateSummary:
    raw = tuple(float(r) for r in rates)
    if len(raw) < 2:
        raise InvalidArgument("summarize needs at least 2 replicates")
    a = np.asarray(raw)
    mean = float(a.mean())
    # clip rounding so the mean stays inside the sample range
    mean = min(max(mean, float(a.min())), float(a.max()))
    sd = float(a.std(ddof=1))
    return ReplicateSummary(mean, sd / math.sqrt(a.size), a.size, raw)
