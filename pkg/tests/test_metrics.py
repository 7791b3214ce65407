import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from essc.errors import InvalidArgument
from essc.metrics import hamming_errors, misclustering_rate, summarize

labels = st.lists(st.integers(0, 1), min_size=1, max_size=60)


def test_examples():
    t = np.array([1, 1, 0, 0])
    assert misclustering_rate(t, t) == 0.0
    assert misclustering_rate(1 - t, t) == 0.0
    assert misclustering_rate([1, 0, 0, 0], t) == 0.25
    assert hamming_errors([1, 0, 0, 0], t) == 1


def test_length_and_value_checks():
    with pytest.raises(InvalidArgument):
        misclustering_rate([0, 1], [0, 1, 1])
    with pytest.raises(InvalidArgument):
        misclustering_rate([0, 2], [0, 1])


@settings(max_examples=200)
@given(st.data())
def test_symmetry_and_swap(data):
    t = np.array(data.draw(labels))
    p = np.array(data.draw(st.lists(st.integers(0, 1), min_size=t.size, max_size=t.size)))
    r = misclustering_rate(p, t)
    assert 0.0 <= r <= 0.5
    assert r == misclustering_rate(t, p) == misclustering_rate(1 - p, t)


def test_summary_examples():
    s = summarize([0.1, 0.2, 0.3])
    assert s.mean == pytest.approx(0.2)
    assert s.stderr == pytest.approx(0.1 / math.sqrt(3), abs=1e-12)
    assert s.count == 3
    assert summarize([0.4] * 5).stderr == 0.0
    assert s.cell() == ".200(.058)"
    with pytest.raises(InvalidArgument):
        summarize([0.1])


def test_uniform_mean():
    x = np.random.default_rng(0).uniform(size=100)
    assert abs(summarize(x).mean - 0.5) <= 3 / math.sqrt(1200)


@settings(max_examples=100)
@given(st.lists(st.floats(0, 0.5), min_size=2, max_size=40))
def test_summary_invariants(raw):
    s = summarize(raw)
    assert min(raw) <= s.mean <= max(raw)
    assert s.stderr == pytest.approx(np.std(raw, ddof=1) / math.sqrt(len(raw)), abs=1e-12)
