import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from essc.errors import InvalidArgument
from essc.screening import ks_scores, raw_ks_scores, select_top


def _bimodal(rng, n):
    return rng.choice([-3.0, 3.0], size=n) + 0.1 * rng.standard_normal(n)


def test_matches_scipy_kstest():
    X = np.random.default_rng(0).standard_normal((6, 40))
    X[2] = X[2] ** 3
    raw = raw_ks_scores(X)
    for j, row in enumerate(X):
        z = (row - row.mean()) / row.std(ddof=1)
        ref = stats.kstest(z, "norm").statistic * math.sqrt(row.size)
        assert raw[j] == pytest.approx(ref, abs=1e-12)


def test_shape_and_checks():
    X = np.random.default_rng(1).standard_normal((7, 20))
    assert ks_scores(X).shape == (7,)
    with pytest.raises(InvalidArgument):
        ks_scores(np.ones((3, 2)))


def test_large_normal_sample_below_quantile():
    rng = np.random.default_rng(2)
    raw = raw_ks_scores(rng.standard_normal((40, 5000)))
    assert np.mean(raw < 1.63) >= 0.95


def test_bimodal_scores_higher():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.standard_normal(300), _bimodal(rng, 300)])
    s = ks_scores(X)
    assert s[1] > s[0]


def test_affine_invariance():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((5, 50))
    Y = X.copy()
    Y[1] = 3.0 * Y[1] - 7.0
    assert np.allclose(raw_ks_scores(X), raw_ks_scores(Y), atol=1e-12)


def test_constant_rows_never_kept():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((4, 30))
    X[0] = 2.0
    s = ks_scores(X)
    assert s[0] == -np.inf
    assert 0 not in select_top(X, 3).kept_indices


def test_select_top_rules():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((6, 200))
    X[4] = _bimodal(rng, 200)
    full = select_top(X, 6)
    assert sorted(full.kept_indices) == list(range(6))
    one = select_top(X, 1)
    assert one.kept_indices == (4,)
    assert np.array_equal(one.reduced, X[[4]])
    X[1] = X[4]  # duplicated rows tie: lower index first
    assert select_top(X, 2).kept_indices == (1, 4)
    for bad in (0, 7):
        with pytest.raises(InvalidArgument):
            select_top(X, bad)


def test_raw_versus_normalized_ranking():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((8, 100))
    X[3] = _bimodal(rng, 100)
    assert select_top(X, 3).kept_indices == select_top(X, 3, normalize=False).kept_indices


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((8, 25))
    perm = rng.permutation(8)
    a = select_top(X, 3)
    b = select_top(X[perm], 3)
    assert [perm[j] for j in b.kept_indices] == list(a.kept_indices)
