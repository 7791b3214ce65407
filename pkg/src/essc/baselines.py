"""Reference clusterers compared against ESSC."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .datagen import CovarianceSpec
from .errors import InvalidArgument, NumericFailure
from .kmeans import ClusterResult, KMeansConfig, kmeans
from .linalg import _eigh, as_matrix, top2_singular


def kmeans_raw(X, cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    """k-means on the samples themselves (columns of X)."""
    return kmeans(as_matrix(X).T, cfg, seed)


def sc1(X, cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    """k-means on the rows of (u1, u2)."""
    spec = top2_singular(X)
    return kmeans(np.column_stack([spec.u1, spec.u2]), cfg, seed)


def gaussian_affinity(X) -> np.ndarray:
    """exp(-||x_i - x_j||^2 / (2p)) with a zero diagonal."""
    X = as_matrix(X)
    p = X.shape[0]
    A = np.exp(-squareform(pdist(X.T, "sqeuclidean")) / (2.0 * p))
    np.fill_diagonal(A, 0.0)
    return A


def sc2(X, cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    """Normalised-affinity spectral clustering with a Gaussian kernel.

    L = D^{-1/2} A D^{-1/2}; the two top eigenvectors are row-normalised
    before k-means.
    """
    A = gaussian_affinity(X)
    deg = A.sum(1)
    if np.any(deg <= 0):
        # only reachable when the kernel underflows to zero
        raise InvalidArgument("affinity has a zero row sum")
    s = 1.0 / np.sqrt(deg)
    L = s[:, None] * A * s[None, :]
    _, vecs = _eigh(L)
    E = vecs[:, ::-1][:, :2]
    norms = np.linalg.norm(E, axis=1, keepdims=True)
    E = E / np.where(norms > 0, norms, 1.0)
    return kmeans(E, cfg, seed)


def demeaned_spectral(X, cfg: KMeansConfig | None = None, seed=0) -> ClusterResult:
    """k-means on the leading right singular vector after removing the sample mean."""
    X = as_matrix(X)
    Xc = X - X.mean(axis=1, keepdims=True)
    spec = top2_singular(Xc)
    res = kmeans(spec.u1, cfg, seed)
    res.diagnostics = {"t1": spec.t1, "t2": spec.t2}
    return res


def sign_cluster(u1) -> np.ndarray:
    """1 where u1 is positive, 0 elsewhere (exact zeros included)."""
    return (np.asarray(u1) > 0).astype(np.int64)


def sign_cluster_data(X, cfg=None, seed=0) -> ClusterResult:
    """sign_cluster on the leading right singular vector of X."""
    spec = top2_singular(X)
    labels = sign_cluster(spec.u1)
    return ClusterResult(labels, float("nan"), branch="SIGN", restarts_used=0,
                         collapsed=np.unique(labels).size < 2)


def bayes_oracle(X, mu1, mu2, Sigma, pi: float = 0.5, rule: str = "stated") -> np.ndarray:
    """Label 1 iff (x - (mu1+mu2)/2)^T Sigma^{-1} (mu1 - mu2) >= c.

    ``rule="stated"`` uses c = log(pi / (1 - pi)); ``rule="posterior"`` uses
    c = log((1 - pi) / pi), the maximum-posterior threshold for P(Y=1) = pi.
    The two agree at pi = 1/2. ``Sigma`` is a CovarianceSpec or a p x p array.
    """
    if rule not in ("stated", "posterior"):
        raise InvalidArgument(f"unknown rule {rule!r}")
    X = as_matrix(X)
    if not 0 < pi < 1:
        raise InvalidArgument("pi must lie in (0, 1)")
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    diff = mu1 - mu2
    if isinstance(Sigma, CovarianceSpec):
        beta = Sigma.solve(diff)
    else:
        S = np.atleast_2d(np.asarray(Sigma, dtype=float))
        try:
            beta = np.linalg.solve(S, diff)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure(f"singular covariance: {exc}") from exc
        # solve accepts some numerically singular inputs; check the residual
        if not np.all(np.isfinite(beta)) or np.linalg.cond(S) > 1e14:
            raise NumericFailure("covariance is numerically singular")
    stat = (X - 0.5 * (mu1 + mu2)[:, None]).T @ beta
    c = np.log(pi / (1.0 - pi))
    return (stat >= (c if rule == "stated" else -c)).astype(np.int64)
