"""Kolmogorov-Smirnov feature screening.

Each feature row is standardised and compared with N(0, 1); features whose
empirical distribution departs most from normality are kept.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import InvalidArgument
from .linalg import as_matrix


@dataclass(frozen=True, eq=False)
class ScreeningResult:
    scores: np.ndarray
    kept_indices: tuple[int, ...]
    reduced: np.ndarray


def raw_ks_scores(X) -> np.ndarray:
    """sqrt(n) * sup |F_n - Phi| of each standardised row; constant rows get -inf."""
    X = as_matrix(X)
    p, n = X.shape
    if n < 3:
        raise InvalidArgument("KS screening needs n >= 3")
    sd = X.std(axis=1, ddof=1)
    const = ~(sd > 1e-12 * np.maximum(np.abs(X).max(axis=1), 1e-300))
    Z = (X - X.mean(axis=1, keepdims=True)) / np.where(const, 1.0, sd)[:, None]
    Z.sort(axis=1)
    cdf = ndtr(Z)
    i = np.arange(1, n + 1)
    d_plus = (i / n - cdf).max(axis=1)
    d_minus = (cdf - (i - 1) / n).max(axis=1)
    scores = np.sqrt(n) * np.maximum(d_plus, d_minus)
    scores[const] = -np.inf
    return scores


def ks_scores(X, normalize: bool = True) -> np.ndarray:
    """Raw scores centred and scaled by their across-feature mean and SD."""
    raw = raw_ks_scores(X)
    if not normalize:
        return raw
    finite = np.isfinite(raw)
    out = np.full_like(raw, -np.inf)
    if finite.sum() >= 2:
        v = raw[finite]
        sd = v.std(ddof=1)
        out[finite] = (v - v.mean()) / sd if sd > 0 else 0.0
    elif finite.any():
        out[finite] = 0.0
    return out


def select_top(X, keep: int, normalize: bool = True) -> ScreeningResult:
    """Keep the ``keep`` highest-scoring features; ties go to the lower index.

    Kept rows appear in ranked order; sample (column) order is untouched.
    """
    X = as_matrix(X)
    p = X.shape[0]
    if not 1 <= keep <= p:
        raise InvalidArgument(f"keep must lie in [1, {p}], got {keep}")
    scores = ks_scores(X, normalize)
    # lexsort: last key is primary
    order = np.lexsort((np.arange(p), -scores))
    kept = order[:keep]
    return ScreeningResult(scores, tuple(int(j) for j in kept), X[kept].copy())
