import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies_hyp import binary, fixture
from tsadm.errors import LengthMismatch, SegmentOutOfRange
from tsadm.labels import (Segment, canonical_segments, fbeta, labels_from_segments, overlap,
                          pointwise_confusion, segments_from_labels, threshold)


@pytest.mark.parametrize("y, segs", [
    ([0, 1, 1, 1, 0, 0, 0, 1, 0, 0], [(1, 3), (7, 7)]),
    ([0] * 5, []),
    ([1] * 4, [(0, 3)]),
])
def test_segments_from_labels(y, segs):
    assert segments_from_labels(y) == [Segment(s, e) for s, e in segs]


@pytest.mark.parametrize("segs, T, y", [
    ([(1, 3), (7, 7)], 10, [0, 1, 1, 1, 0, 0, 0, 1, 0, 0]),
    ([], 3, [0, 0, 0]),
    ([(0, 0)], 1, [1]),
])
def test_labels_from_segments(segs, T, y):
    np.testing.assert_array_equal(labels_from_segments(segs, T), y)


def test_labels_from_segments_out_of_range():
    with pytest.raises(SegmentOutOfRange):
        labels_from_segments([(2, 5)], 5)


def test_adjacent_segments_merge():
    assert canonical_segments([(3, 4), (1, 2)]) == [Segment(1, 4)]


@pytest.mark.parametrize("s, tau, out", [
    ([0.1, 0.9, 0.5], 0.5, [0, 1, 0]),
    ([0.3, 0.3], 0.2, [1, 1]),
    ([0.2, 0.7, 0.4], 0.7, [0, 0, 0]),
])
def test_threshold_is_strict(s, tau, out):
    np.testing.assert_array_equal(threshold(s, tau), out)


@pytest.mark.parametrize("a, b, out", [((1, 3), (3, 5), True), ((1, 2), (4, 5), False),
                                       ((0, 9), (4, 4), True)])
def test_overlap(a, b, out):
    assert overlap(a, b) is out


def test_pointwise_confusion_fixture(y10, p10):
    c = pointwise_confusion(y10, p10)
    assert (c.tp, c.fp, c.fn, c.tn) == (1, 0, 3, 6)


def test_pointwise_confusion_length_mismatch():
    with pytest.raises(LengthMismatch):
        pointwise_confusion([0, 1], [0, 1, 0])


@pytest.mark.parametrize("p, r, out", [(1, 1, 1.0), (1, 0.25, 0.4), (0, 0, 0.0)])
def test_fbeta(p, r, out):
    assert fbeta(p, r, 1.0) == pytest.approx(out, abs=1e-15)


@given(st.integers(1, 80).flatmap(lambda n: binary(n)))
def test_round_trip_any_length(y):
    segs = segments_from_labels(y)
    np.testing.assert_array_equal(labels_from_segments(segs, y.size), y)
    # canonical: sorted, disjoint and non-adjacent
    for a, b in zip(segs, segs[1:]):
        assert b.start > a.end + 1


@given(fixture(max_len=40))
def test_confusion_totals(f):
    y, p, _ = f
    c = pointwise_confusion(y, p)
    assert c.tp + c.fp + c.fn + c.tn == y.size
    assert min(c.tp, c.fp, c.fn, c.tn) >= 0


seg = st.tuples(st.integers(0, 30), st.integers(0, 10)).map(lambda t: (t[0], t[0] + t[1]))


@given(seg, seg)
def test_overlap_symmetric_reflexive(a, b):
    assert overlap(a, b) == overlap(b, a)
    assert overlap(a, a)


@given(fixture(max_len=40), st.floats(0, 1), st.floats(0, 1))
def test_threshold_monotone(f, t1, t2):
    _, _, s = f
    lo, hi = min(t1, t2), max(t1, t2)
    assert np.all(threshold(s, hi) <= threshold(s, lo))
