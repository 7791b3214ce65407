"""Eigen-selected spectral clustering.

The two leading right singular vectors of X are screened before k-means:
a small ratio t1/t2 keeps both, otherwise u1 is kept unless it is flat
(constant over samples), in which case u2 replaces it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InvalidArgument
from .kmeans import ClusterResult, KMeansConfig, kmeans
from .linalg import SpectralSummary, as_matrix, top2_singular


class Branch(str, enum.Enum):
    BOTH = "BOTH"
    FIRST = "FIRST"
    SECOND = "SECOND"


@dataclass(frozen=True)
class ThresholdSchedule:
    tau: float
    delta: float

    def __post_init__(self):
        for name in ("tau", "delta"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise InvalidArgument(f"{name} must lie in (0, 1), got {v!r}")


def default_thresholds(n: int, p: int) -> ThresholdSchedule:
    """tau = 1/ln(n+p), delta = 1/ln^2(n+p)."""
    if n + p <= math.e:
        raise InvalidArgument(f"n + p = {n + p} gives tau >= 1")
    L = math.log(n + p)
    return ThresholdSchedule(1.0 / L, 1.0 / L ** 2)


@dataclass(frozen=True)
class EigenSelection:
    branch: Branch
    ratio: float
    fstat_abs: float
    selected: tuple[np.ndarray, ...]

    def points(self) -> np.ndarray:
        """n x len(selected) matrix handed to k-means."""
        return np.column_stack(self.selected)


def essc_select(spec: SpectralSummary, th: ThresholdSchedule) -> EigenSelection:
    if not spec.t1 > 0:
        raise DegenerateInput("t1 = 0: the data matrix is zero")
    ratio = spec.ratio
    f = abs(spec.fstat)
    if ratio < 1.0 + th.tau:
        return EigenSelection(Branch.BOTH, ratio, f, (spec.u1, spec.u2))
    if f >= th.delta:
        return EigenSelection(Branch.FIRST, ratio, f, (spec.u1,))
    return EigenSelection(Branch.SECOND, ratio, f, (spec.u2,))


def essc_cluster(X, th: ThresholdSchedule | None = None,
                 kmeans_cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    X = as_matrix(X)
    spec = top2_singular(X)
    th = th or default_thresholds(spec.n, X.shape[0])
    sel = essc_select(spec, th)
    res = kmeans(sel.points(), kmeans_cfg, seed)
    res.branch = sel.branch.value
    res.diagnostics = {
        "branch": sel.branch.value,
        "t1": spec.t1,
        "t2": spec.t2,
        "ratio": sel.ratio,
        "fstat": spec.fstat,
        "tau": th.tau,
        "delta": th.delta,
    }
    return res
