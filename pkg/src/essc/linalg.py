"""Top-two singular triplets of a p x n data matrix and the flatness statistic.

Columns of the data matrix are samples. Two independent routes are provided:
the Gram-matrix route used everywhere in the package, and the symmetric
linearization [[0, X^T], [X, 0]] used to cross-check it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericFailure

# t_k below this fraction of t_1 is treated as an exact zero singular value
ZERO_SINGULAR_RTOL = 1e-12
# entry sums below this (relative to the l1 norm) count as an exact tie
SIGN_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DataMatrix:
    values: np.ndarray

    def __post_init__(self):
        # freeze a view so the caller's array stays writable
        arr = np.asarray(self.values, dtype=float).view()
        if arr.ndim != 2:
            raise InvalidArgument(f"data matrix must be 2-D, got shape {arr.shape}")
        p, n = arr.shape
        if p < 1 or n < 2:
            raise InvalidArgument(f"need p >= 1 and n >= 2, got p={p}, n={n}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("data matrix has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def as_matrix(X) -> np.ndarray:
    """Validated float view of ``X`` (a DataMatrix or anything array-like)."""
    if isinstance(X, DataMatrix):
        return X.values
    return DataMatrix(X).values


def flatness(u1: np.ndarray) -> float:
    """|sum(u1)| / sqrt(2n) - 1/sqrt(2).

    Equals n^{-1/2} |u0^T v1| - 2^{-1/2} for the linearization eigenvector v1
    whose first n entries are u1 / sqrt(2).
    """
    n = u1.shape[0]
    return float(abs(np.sum(u1)) / np.sqrt(2.0 * n) - 1.0 / np.sqrt(2.0))


@dataclass(frozen=True)
class SpectralSummary:
    t1: float
    t2: float
    u1: np.ndarray
    u2: np.ndarray
    fstat: float
    # left singular vectors; None when the corresponding t_k is zero
    w1: np.ndarray | None = None
    w2: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.u1.shape[0]

    @property
    def ratio(self) -> float:
        """t1 / t2 with an (almost) zero t2 mapped to +inf."""
        if self.t2 <= ZERO_SINGULAR_RTOL * self.t1:
            return float("inf")
        return self.t1 / self.t2


def orient(u: np.ndarray) -> np.ndarray:
    """Flip ``u`` so its entry sum is nonnegative.

    On a tied (zero) sum the first nonzero entry is made positive.
    """
    s = float(np.sum(u))
    scale = float(np.sum(np.abs(u)))
    if abs(s) <= SIGN_TIE_RTOL * max(scale, 1e-300):
        nz = np.flatnonzero(np.abs(u) > SIGN_TIE_RTOL * max(scale, 1e-300))
        if nz.size and u[nz[0]] < 0:
            return -u
        return u
    return u if s > 0 else -u


def _eigh(A: np.ndarray):
    try:
        return np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"symmetric eigensolver did not converge: {exc}",
                             iterations=None) from exc


def _null_direction(X: np.ndarray, u1: np.ndarray) -> np.ndarray:
    # unit right vector for a zero singular value: top eigenvectors of X^T X
    # with u1 projected out
    n = X.shape[1]
    _, vecs = _eigh(X.T @ X)
    for k in range(n - 1, -1, -1):
        v = vecs[:, k] - u1 * float(u1 @ vecs[:, k])
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm
    raise NumericFailure("could not complete an orthonormal pair")


def _oriented(u, w):
    flipped = orient(u)
    if flipped is not u and w is not None:
        w = -w
    return flipped, w


def _finish(t, U, W) -> SpectralSummary:
    u1, w1 = _oriented(U[:, 0], W[0])
    u2, w2 = _oriented(U[:, 1], W[1])
    return SpectralSummary(t1=float(t[0]), t2=float(t[1]), u1=u1, u2=u2,
                           fstat=flatness(u1), w1=w1, w2=w2)


def _is_zero(t, k) -> bool:
    return t[k] <= 0.0 or t[k] <= ZERO_SINGULAR_RTOL * t[0]


def top2_singular(X) -> SpectralSummary:
    """Two largest singular values of X and their right singular vectors.

    Uses a dense eigendecomposition of the smaller Gram matrix and recovers
    the companion singular vector with one matrix-vector product.
    """
    X = as_matrix(X)
    p, n = X.shape
    U = np.zeros((n, 2))
    W = [None, None]
    if n <= p:
        vals, vecs = _eigh(X.T @ X)
        U[:] = vecs[:, ::-1][:, :2]
        # ||X u_k|| is more accurate than sqrt of the Gram eigenvalue
        Wm = X @ U
        t = np.linalg.norm(Wm, axis=0)
        for k in range(2):
            if _is_zero(t, k):
                t[k] = 0.0
            else:
                W[k] = Wm[:, k] / t[k]
        return _finish(t, U, W)

    vals, vecs = _eigh(X @ X.T)
    vecs = vecs[:, ::-1]
    Um = X.T @ vecs[:, :2] if p > 1 else np.column_stack([X.T @ vecs[:, 0], np.zeros(n)])
    t = np.linalg.norm(Um, axis=0)
    if t[0] == 0.0:
        U[:, 0] = np.full(n, 1.0 / np.sqrt(n))
        U[:, 1] = _null_direction(X, U[:, 0])
        return _finish(t, U, W)
    for k in range(2):
        if _is_zero(t, k):
            t[k] = 0.0
            U[:, k] = _null_direction(X, U[:, 0])
        else:
            U[:, k] = Um[:, k] / t[k]
            W[k] = vecs[:, k].copy()
    return _finish(t, U, W)


def linearization_matrix(X) -> np.ndarray:
    """The symmetric (n+p) x (n+p) matrix [[0, X^T], [X, 0]]."""
    X = as_matrix(X)
    p, n = X.shape
    Z = np.zeros((n + p, n + p))
    Z[:n, n:] = X.T
    Z[n:, :n] = X
    return Z


def linearization_eigs(X) -> SpectralSummary:
    """Same contract as :func:`top2_singular`, computed from eig([[0, X^T], [X, 0]]).

    The first n entries of the eigenvector for t_k are u_k / sqrt(2) and the
    last p entries are w_k / sqrt(2).
    """
    X = as_matrix(X)
    p, n = X.shape
    vals, vecs = _eigh(linearization_matrix(X))
    vals, vecs = vals[::-1][:2], vecs[:, ::-1][:, :2]
    t = np.clip(vals, 0.0, None)
    U = np.zeros((n, 2))
    W = [None, None]
    if t[0] == 0.0:
        U[:, 0] = np.full(n, 1.0 / np.sqrt(n))
        U[:, 1] = _null_direction(X, U[:, 0])
        return _finish(t, U, W)
    for k in range(2):
        if _is_zero(t, k):
            t[k] = 0.0
            U[:, k] = _null_direction(X, U[:, 0])
        else:
            # first n entries carry u_k / sqrt(2)
            U[:, k] = np.sqrt(2.0) * vecs[:n, k]
            U[:, k] /= np.linalg.norm(U[:, k])
            W[k] = vecs[n:, k] / np.linalg.norm(vecs[n:, k])
    return _finish(t, U, W)
