"""Name -> clusterer registry shared by the simulation and CSV front ends."""
from __future__ import annotations

import numpy as np

from ..algorithm import ThresholdSchedule, essc_cluster
from ..baselines import bayes_oracle, demeaned_spectral, kmeans_raw, sc1, sc2, sign_cluster_data
from ..datagen import MixtureSpec
from ..errors import InvalidArgument
from ..kmeans import ClusterResult, KMeansConfig

METHOD_NAMES = ("ESSC", "KMEANS", "SC1", "SC2", "DEMEANED", "SIGN", "ORACLE")


def parse_methods(text_or_list) -> tuple[str, ...]:
    items = text_or_list.split(",") if isinstance(text_or_list, str) else list(text_or_list)
    names = tuple(s.strip().upper() for s in items if s.strip())
    if not names:
        raise InvalidArgument("at least one method is required")
    for m in names:
        if m not in METHOD_NAMES:
            raise InvalidArgument(f"unknown method {m!r}; choose from {', '.join(METHOD_NAMES)}")
    return names


def run_method(name: str, X: np.ndarray, *, kmeans_cfg: KMeansConfig | None = None,
               seed=0, thresholds: ThresholdSchedule | None = None,
               spec: MixtureSpec | None = None) -> ClusterResult:
    if name == "ESSC":
        return essc_cluster(X, thresholds, kmeans_cfg, seed)
    if name == "KMEANS":
        return kmeans_raw(X, kmeans_cfg, seed)
    if name == "SC1":
        return sc1(X, kmeans_cfg, seed)
    if name == "SC2":
        return sc2(X, kmeans_cfg, seed)
    if name == "DEMEANED":
        return demeaned_spectral(X, kmeans_cfg, seed)
    if name == "SIGN":
        return sign_cluster_data(X)
    if name == "ORACLE":
        if spec is None:
            raise InvalidArgument("ORACLE needs the generating mixture")
        labels = bayes_oracle(X, spec.mu1, spec.mu2, spec.cov, spec.pi)
        return ClusterResult(labels, float("nan"), branch="ORACLE")
    raise InvalidArgument(f"unknown method {name!r}")
