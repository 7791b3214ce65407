"""Lloyd k-means with k-means++ or random-partition starts and restarts."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, InvalidArgument
from .seeding import children

# reseeding an empty cluster is attempted this many times per restart
MAX_RESEEDS = 10


class Init(str, enum.Enum):
    KMEANS_PP = "kmeans++"
    RANDOM_PARTITION = "random_partition"


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    restarts: int = 30
    max_iters: int = 300
    tol: float = 1e-9
    init: Init = Init.KMEANS_PP

    def __post_init__(self):
        object.__setattr__(self, "init", Init(self.init))
        if self.k < 1:
            raise InvalidArgument("k must be >= 1")
        if self.restarts < 1 or self.max_iters < 1:
            raise InvalidArgument("restarts and max_iters must be >= 1")
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")


@dataclass(eq=False)
class ClusterResult:
    assignment: np.ndarray
    objective: float
    branch: str | None = None
    restarts_used: int = 0
    collapsed: bool = False
    # objective after each assignment step of the winning restart
    trace: list[float] = field(default_factory=list)
    restart_traces: list[list[float]] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.assignment.shape[0]


def _as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or P.shape[1] < 1:
        raise InvalidArgument(f"points must be n x d with d >= 1, got shape {P.shape}")
    if P.shape[0] < 2:
        raise InvalidArgument("k-means needs at least 2 points")
    if not np.all(np.isfinite(P)):
        raise InvalidArgument("points contain non-finite values")
    return P


def _sqdist(P, C):
    # direct differences: the expanded form loses the monotone trace to rounding
    return ((P[:, None, :] - C[None, :, :]) ** 2).sum(-1)


def _plusplus(P, k, rng):
    n = P.shape[0]
    C = np.empty((k, P.shape[1]))
    C[0] = P[rng.integers(n)]
    closest = _sqdist(P, C[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point sits on a chosen centre
            C[j] = P[rng.integers(n)]
        else:
            C[j] = P[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, _sqdist(P, C[j:j + 1])[:, 0])
    return C


def _random_partition(P, k, rng):
    labels = rng.integers(k, size=P.shape[0])
    C = np.empty((k, P.shape[1]))
    for j in range(k):
        members = labels == j
        C[j] = P[members].mean(0) if members.any() else P[rng.integers(P.shape[0])]
    return C


def _lloyd(P, C, cfg: KMeansConfig):
    """Returns (labels, objective, trace, collapsed)."""
    k = cfg.k
    trace: list[float] = []
    labels = None
    reseeds = 0
    for _ in range(cfg.max_iters):
        D = _sqdist(P, C)
        new = np.argmin(D, axis=1)
        obj = float(D[np.arange(P.shape[0]), new].sum())
        trace.append(obj)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        C_new = C.copy()
        empty = []
        for j in range(k):
            members = labels == j
            if members.any():
                C_new[j] = P[members].mean(0)
            else:
                empty.append(j)
        for j in empty:
            # move the empty centre onto the worst-served point
            far = np.argmax(_sqdist(P, C_new)[np.arange(P.shape[0]), labels])
            C_new[j] = P[far]
            reseeds += 1
        shift = float(np.max(np.abs(C_new - C)))
        C = C_new
        if not empty and shift < cfg.tol:
            break
        if reseeds > MAX_RESEEDS:
            break
    D = _sqdist(P, C)
    final = np.argmin(D, axis=1)
    obj = float(D[np.arange(P.shape[0]), final].sum())
    if obj != trace[-1]:
        trace.append(obj)
    collapsed = np.unique(final).size < k
    return final, obj, trace, collapsed


def _canonical(labels):
    # relabel clusters in order of first appearance
    _, first = np.unique(labels, return_index=True)
    order = np.unique(labels)[np.argsort(first)]
    out = np.empty_like(labels)
    for new, old in enumerate(order):
        out[labels == old] = new
    return out


def kmeans(points, cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    """Best of ``cfg.restarts`` Lloyd runs by within-cluster sum of squares.

    Restart r draws from stream ``child(seed, r)``, so restarts are
    independent of evaluation order. Labels are canonicalised so the first
    point is in cluster 0.
    """
    cfg = cfg or KMeansConfig()
    P = _as_points(points)
    n = P.shape[0]
    if n < cfg.k:
        raise DegenerateInput(f"{n} points cannot form {cfg.k} clusters")
    if np.ptp(P, axis=0).max() == 0.0:
        # all points coincide: nothing to split
        return ClusterResult(np.zeros(n, dtype=np.int64), 0.0, restarts_used=0,
                             collapsed=True, trace=[0.0])

    best = None
    traces = []
    for stream in children(seed, cfg.restarts):
        rng = np.random.default_rng(stream)
        C = _plusplus(P, cfg.k, rng) if cfg.init is Init.KMEANS_PP else _random_partition(P, cfg.k, rng)
        labels, obj, trace, collapsed = _lloyd(P, C, cfg)
        traces.append(trace)
        if best is None or obj < best[1]:
            best = (labels, obj, trace, collapsed)
    labels, obj, trace, collapsed = best
    if collapsed and cfg.k == 2:
        distinct = np.unique(P, axis=0).shape[0]
        if distinct >= 2:
            raise DegenerateInput("k-means kept an empty cluster after repeated reseeding")
    labels = _canonical(labels.astype(np.int64))
    return ClusterResult(labels, obj, restarts_used=cfg.restarts,
                         collapsed=collapsed, trace=trace, restart_traces=traces)


def objective_of(points, labels) -> float:
    """Within-cluster sum of squares of a given partition."""
    P = _as_points(points)
    labels = np.asarray(labels)
    total = 0.0
    for j in np.unique(labels):
        Q = P[labels == j]
        total += float(((Q - Q.mean(0)) ** 2).sum())
    return total
