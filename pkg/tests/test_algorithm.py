import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from essc.algorithm import (Branch, ThresholdSchedule, default_thresholds, essc_cluster,
                            essc_select)
from essc.baselines import sc1
from essc.datagen import CovarianceSpec, MixtureSpec, model_preset, sample_dataset
from essc.errors import DegenerateInput, InvalidArgument
from essc.linalg import SpectralSummary, top2_singular
from essc.metrics import misclustering_rate


def _summary(t1, t2, fstat, n=4):
    u = np.full(n, 1 / math.sqrt(n))
    return SpectralSummary(t1, t2, u, u[::-1].copy(), fstat)


# natural logs evaluated via log10 / log10(e)
@pytest.mark.parametrize("n,p,tau,delta", [
    (200, 1000, 0.14104219505, 0.01989290078),
    (100, 100, 0.18873916582, 0.03562247271),
    (4, 4, 0.48089834696, 0.23126322011),
])
def test_default_thresholds(n, p, tau, delta):
    th = default_thresholds(n, p)
    assert th.tau == pytest.approx(tau, abs=1e-10)
    assert th.delta == pytest.approx(delta, abs=1e-10)


def test_threshold_validation():
    with pytest.raises(InvalidArgument):
        default_thresholds(1, 1)
    with pytest.raises(InvalidArgument):
        ThresholdSchedule(1.0, 0.1)
    with pytest.raises(InvalidArgument):
        ThresholdSchedule(0.1, 0.0)


def test_selection_examples():
    th = ThresholdSchedule(0.14, 0.02)
    assert essc_select(_summary(1.01, 1.0, 0.3), th).branch is Branch.BOTH
    assert essc_select(_summary(3.0, 1.0, 0.5), th).branch is Branch.FIRST
    assert essc_select(_summary(3.0, 1.0, 0.0), th).branch is Branch.SECOND
    sel = essc_select(_summary(1.01, 1.0, 0.3), th)
    assert len(sel.selected) == 2 and sel.points().shape == (4, 2)


def test_boundary_goes_to_first():
    th = ThresholdSchedule(0.14, 0.02)
    assert essc_select(_summary(3.0, 1.0, -0.02), th).branch is Branch.FIRST


def test_zero_second_value_never_both():
    sel = essc_select(_summary(3.0, 0.0, 0.0), ThresholdSchedule(0.5, 0.1))
    assert sel.ratio == math.inf and sel.branch is Branch.SECOND


def test_zero_data_is_degenerate():
    with pytest.raises(DegenerateInput):
        essc_select(_summary(0.0, 0.0, 0.0), ThresholdSchedule(0.5, 0.1))
    with pytest.raises(DegenerateInput):
        essc_cluster(np.zeros((5, 8)))


@settings(max_examples=100)
@given(st.floats(1.0, 5.0), st.floats(0.1, 1.0), st.floats(-0.7, 0.3), st.floats(1e-3, 1e3))
def test_branch_is_scale_invariant(t1, frac, f, c):
    th = ThresholdSchedule(0.14, 0.02)
    a = essc_select(_summary(t1, t1 * frac, f), th)
    b = essc_select(_summary(c * t1, c * t1 * frac, f), th)
    assert a.branch is b.branch


def test_model3_draw():
    spec = model_preset(3, 400)
    X, y = sample_dataset(spec, 11)
    res = essc_cluster(X, seed=1)
    assert misclustering_rate(res.assignment, y) <= 0.10
    assert res.branch == "FIRST"
    assert set(res.diagnostics) >= {"t1", "t2", "fstat", "tau", "delta"}


def _noiseless(mu1, mu2, n1=6, n2=9):
    p = len(mu1)
    spec = MixtureSpec(mu1, mu2, CovarianceSpec.identity(p, 0.0), 0.5, n1 + n2)
    y = np.array([1] * n1 + [0] * n2)
    X, _ = sample_dataset(spec, 0, labels=y)
    return X, y


def test_noiseless_orthogonal_blocks():
    X, y = _noiseless([2.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    res = essc_cluster(X, seed=0)
    assert misclustering_rate(res.assignment, y) == 0.0


def test_noiseless_flat_leading_vector_uses_second():
    # mu = m +/- delta, balanced: u1 is constant, u2 carries the labels
    m, d = np.array([3.0, 0.0]), np.array([0.0, 1.0])
    X, y = _noiseless(m + d, m - d, 8, 8)
    res = essc_cluster(X, seed=0)
    assert res.branch == "SECOND"
    assert misclustering_rate(res.assignment, y) == 0.0


def test_both_branch_equals_sc1():
    rng = np.random.default_rng(2)
    X, y = _noiseless([2.0, 0.0], [0.0, 2.0], 10, 10)
    X = X + 0.05 * rng.standard_normal(X.shape)
    res = essc_cluster(X, seed=4)
    assert res.branch == "BOTH"
    assert np.array_equal(res.assignment, sc1(X, seed=4).assignment)


def test_invariances():
    spec = model_preset(3, 100)
    X, y = sample_dataset(spec, 3)
    base = essc_cluster(X, seed=2)
    perm = np.random.default_rng(0).permutation(X.shape[1])
    permuted = essc_cluster(X[:, perm], seed=2)
    assert misclustering_rate(permuted.assignment, base.assignment[perm]) == 0.0
    scaled = essc_cluster(7.5 * X, seed=2)
    assert misclustering_rate(scaled.assignment, base.assignment) == 0.0
    again = essc_cluster(X, seed=2)
    assert np.array_equal(again.assignment, base.assignment)
    assert again.objective == base.objective
