import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from strategies_hyp import binary, fixture
from tsadm.errors import NoAnomalies, NoGroundTruthSegments
from tsadm.labels import labels_from_segments
from tsadm.metrics import affiliation, event, nab, pate, point, registry
from tsadm.metrics.event import ETaFParams, RangeFParams, TaFParams
from tsadm.metrics.pate import PateParams


def seg_labels(T, *segs):
    return labels_from_segments(segs, T)


# --- SF / CF -----------------------------------------------------------------

def test_segment_f_fixture(y10, p10):
    assert event.segment_f(y10, p10) == pytest.approx(2 / 3, abs=1e-15)
    assert event.segment_f(y10, y10) == 1.0
    assert event.segment_f(y10, np.ones_like(y10)) == 1.0


def test_composite_f_fixture(y10, p10):
    assert event.composite_f(y10, p10) == pytest.approx(2 / 3, abs=1e-15)
    assert event.composite_f(y10, y10) == 1.0


def test_composite_f_all_alarms(y10):
    rate = y10.mean()
    assert event.composite_f(y10, np.ones_like(y10)) == pytest.approx(2 * rate / (rate + 1))


# --- RF ------------------------------------------------------------------------

def test_range_f_perfect_and_disjoint(y10):
    for bias in ("flat", "front", "back"):
        assert event.range_f(y10, y10, RangeFParams(0.3, bias)) == pytest.approx(1.0)
    assert event.range_f(y10, np.roll(y10, 5) * (1 - y10)) == 0.0


def test_range_f_cardinality_example():
    y = seg_labels(6, (0, 3))
    p = seg_labels(6, (0, 0), (2, 2))
    # recall (1/2) * (2/4) = 0.25, both predicted segments are fully inside: precision 1
    f = event.range_f(y, p, RangeFParams(alpha=0.0, positional_bias="flat", cardinality="inverse"))
    assert f == pytest.approx(2 * 0.25 / 1.25)


def test_range_f_front_bias_prefers_early_overlap():
    y = seg_labels(12, (2, 9))
    early = seg_labels(12, (2, 4))
    late = seg_labels(12, (7, 9))
    front = RangeFParams(alpha=0.0, positional_bias="front")
    assert event.range_f(y, early, front) > event.range_f(y, late, front)
    flat = RangeFParams(alpha=0.0, positional_bias="flat")
    assert event.range_f(y, early, flat) == pytest.approx(event.range_f(y, late, flat))


def existence_f(y, p):
    G, P = oracles.segments(y), oracles.segments(p)
    hit = lambda a, B: any(a[0] <= b[1] and b[0] <= a[1] for b in B)
    r = sum(hit(g, P) for g in G) / len(G) if G else 0.0
    pr = sum(hit(q, G) for q in P) / len(P) if P else 0.0
    return oracles.f_beta(pr, r)


@given(fixture(max_len=30))
def test_range_f_existence_only_equals_existence_f(f):
    y, p, _ = f
    for card in ("one", "inverse"):
        assert event.range_f(y, p, RangeFParams(alpha=1.0, cardinality=card)) == \
            pytest.approx(existence_f(y, p), abs=1e-12)


# --- TF / TD -----------------------------------------------------------------

def test_time_tolerant_f_radius():
    y = np.array([0, 1, 0, 0])
    p = np.array([0, 0, 1, 0])
    assert event.time_tolerant_f(y, p, d=1) == 1.0
    assert event.time_tolerant_f(y, p, d=0) == 0.0


@given(fixture(max_len=40))
def test_time_tolerant_f_zero_radius_is_pw_f(f):
    y, p, _ = f
    assert event.time_tolerant_f(y, p, d=0) == point.pw_f(y, p)


def test_temporal_distance_fixture(y10, p10):
    assert event.temporal_distance(y10, p10) == 7
    assert event.temporal_distance(y10, y10) == 0
    assert event.temporal_distance(y10, np.zeros_like(y10)) == 40


@given(fixture(max_len=40))
def test_temporal_distance_symmetric(f):
    y, p, _ = f
    assert event.temporal_distance(y, p) == event.temporal_distance(p, y)
    assert event.temporal_distance(y, y) == 0


# --- AF ------------------------------------------------------------------------

def test_affiliation_identical_and_empty():
    y = seg_labels(30, (3, 6), (15, 15), (22, 27))
    assert affiliation.affiliation_f(y, y) == pytest.approx(1.0)
    assert affiliation.affiliation_f(y, np.zeros_like(y)) == 0.0


def test_affiliation_needs_ground_truth():
    with pytest.raises(NoGroundTruthSegments):
        affiliation.affiliation_f(np.zeros(5, dtype=int), np.ones(5, dtype=int))


def test_affiliation_single_zone_matches_numeric_integration():
    y = seg_labels(100, (40, 60))
    p = seg_labels(100, (45, 55))
    got = affiliation.affiliation_f(y, p)
    assert got == pytest.approx(oracles.af(y, p), abs=1e-9)
    assert 0.5 < got < 1.0


def test_affiliation_hand_computed_multi_zone():
    y = seg_labels(21, (0, 2), (10, 10), (12, 12), (14, 14), (17, 20))
    p = seg_labels(21, (9, 9))
    P, R = affiliation.affiliation_pr(y, p)
    assert P == pytest.approx(0.625, abs=1e-12)
    assert R == pytest.approx(0.06, abs=1e-12)


# --- TaF / eTaF ------------------------------------------------------------------

def test_taf_perfect():
    y = seg_labels(20, (3, 7), (12, 15))
    assert event.taf(y, y, TaFParams(delta=0)) == 1.0


def test_taf_detection_threshold():
    y = seg_labels(20, (0, 9))
    p = seg_labels(20, (0, 3))  # 40% coverage
    # alpha=1: only the detection indicators count, and recall's is 0
    assert event.taf(y, p, TaFParams(alpha=1.0, theta=0.5, delta=0)) == 0.0


def test_taf_brute_force_example():
    y = seg_labels(10, (2, 5))
    p = seg_labels(10, (4, 7))
    params = TaFParams(alpha=0.5, theta=0.5, delta=0)
    assert event.taf(y, p, params) == pytest.approx(0.75, abs=1e-15)
    assert event.taf(y, p, params) == pytest.approx(oracles.taf(y, p, 0.5, 0.5, 0), abs=1e-12)


def test_taf_decay_rewards_trailing_alarms():
    y = seg_labels(30, (5, 9))
    near = seg_labels(30, (5, 9), (11, 12))
    far = seg_labels(30, (5, 9), (20, 21))
    params = TaFParams(delta=10)
    assert event.taf(y, near, params) > event.taf(y, far, params)


def test_etaf_perfect_and_all_pruned():
    y = seg_labels(30, (2, 9), (15, 24))
    assert event.etaf(y, y) == 1.0
    graze = seg_labels(30, (9, 12), (24, 28))  # each prediction overlaps 1 point of a gt segment
    assert event.etaf(y, graze, ETaFParams(theta_p=0.5)) == 0.0


def test_etaf_pruning_trace():
    y = seg_labels(30, (2, 9), (15, 24))
    p = seg_labels(30, (2, 9), (24, 26))
    params = ETaFParams(theta_r=0.2, theta_p=0.5, delta=0)
    keep_g, keep_p, rec, prec = event.etaf_prune(np.array([2, 15]), np.array([9, 24]),
                                                 np.array([2, 24]), np.array([9, 26]), 30, params)
    np.testing.assert_array_equal(keep_g, [True, False])
    np.testing.assert_array_equal(keep_p, [True, False])
    r = (1 + 1) / (2 * 2)
    pr = math.sqrt(8) * 2 / (2 * (math.sqrt(8) + math.sqrt(3)))
    assert event.etaf(y, p, params) == pytest.approx(2 * pr * r / (pr + r), abs=1e-15)


# --- LSF -------------------------------------------------------------------------

def test_lsf_concentrated_vs_distributed_false_alarms():
    y = np.zeros(12, dtype=int)
    concentrated = np.array([1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0])
    distributed = np.array([1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0])
    assert event.lsf_counts(y, concentrated, w=3)[1] == 1
    assert event.lsf_counts(y, distributed, w=3)[1] == 3


def test_lsf_perfect_aligned():
    y = seg_labels(12, (3, 5), (9, 11))
    assert event.lsf(y, y, w=3) == 1.0


def test_lsf_early_hit_beats_late_hit():
    y = seg_labels(15, (3, 11))  # spans windows 1, 2 and 3
    early = seg_labels(15, (3, 3))
    late = seg_labels(15, (11, 11))
    for literal in (False, True):
        assert event.lsf(y, early, 3, literal) > event.lsf(y, late, 3, literal)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_lsf_distributed_never_beats_concentrated(seed, k):
    rng = np.random.default_rng(seed)
    w, T = 3, 45
    y = (rng.random(T) < 0.3).astype(np.int8)
    win = y.reshape(-1, w)
    quiet = np.flatnonzero(win.sum(axis=1) == 0)
    assume(quiet.size >= k)
    base = (y & (rng.random(T) < 0.5)).astype(np.int8)
    conc, dist = base.copy(), base.copy()
    conc[quiet[0] * w: quiet[0] * w + k] = 1
    dist[quiet[:k] * w] = 1
    assert event.lsf(y, dist, w) <= event.lsf(y, conc, w)


# --- NAB -------------------------------------------------------------------------

def test_nab_anchors():
    y = seg_labels(40, (5, 9), (20, 29))
    assert nab.nab_score(y, np.zeros_like(y)) == 0.0
    assert nab.nab_score(y, seg_labels(40, (5, 5), (20, 20))) == pytest.approx(100.0)


def test_nab_last_position_hit():
    y = seg_labels(30, (10, 19))
    p = seg_labels(30, (19, 19))
    s = lambda r: 2 / (1 + math.exp(5 * r)) - 1
    assert nab.nab_raw(y, p) == pytest.approx(s(-1 / 10), abs=1e-15)
    assert nab.nab_score(y, p) == pytest.approx(100 * s(-0.1) / s(-1), abs=1e-12)
    assert nab.nab_score(y, p) == pytest.approx(oracles.nab(y, p), abs=1e-12)


def test_nab_needs_ground_truth():
    with pytest.raises(NoGroundTruthSegments):
        nab.nab_score(np.zeros(4, dtype=int), np.zeros(4, dtype=int))


# --- PATE ------------------------------------------------------------------------

def test_pate_f1_exact_prediction():
    y = seg_labels(120, (20, 29), (70, 89))
    assert pate.pate_f1(y, y) == pytest.approx(1.0)


def test_pate_f1_far_from_buffers():
    y = seg_labels(200, (100, 109))
    assert pate.pate_f1(y, seg_labels(200, (2, 4))) == 0.0


def test_pate_f1_pre_buffer_partial_credit():
    y = seg_labels(100, (50, 59))
    p = seg_labels(100, (48, 48))
    params = PateParams(eps_grid=(5,), delta_grid=(5,))
    got = pate.pate_f1(y, p, params)
    assert 0.0 < got < 1.0
    assert got == pytest.approx(oracles.pate_f1(y, p, (5,), (5,)), abs=1e-12)


def test_pate_score_version_perfect():
    y = seg_labels(120, (20, 29), (70, 89))
    assert pate.pate(y, y.astype(float)) == pytest.approx(1.0)


# --- P@K -------------------------------------------------------------------------

def test_p_at_k():
    assert event.p_at_k([1, 1, 0, 0], [0.9, 0.1, 0.8, 0.2]) == 0.5
    assert event.p_at_k([1, 1, 0, 0, 0], [0.9, 0.8, 0.3, 0.2, 0.1]) == 1.0
    assert event.p_at_k([1, 1, 0, 0, 0], [0.1, 0.2, 0.7, 0.8, 0.9]) == 0.0
    with pytest.raises(NoAnomalies):
        event.p_at_k([0, 0], [0.1, 0.2])


# --- shared properties -------------------------------------------------------------

BINARY = [m for m in registry.METRIC_IDS if registry.get(m).kind == "binary"]


@given(st.integers(2, 40).flatmap(lambda n: st.tuples(binary(n, min_ones=1), binary(n))))
def test_bounds_and_perfect_prediction_maximum(pair):
    y, p = pair
    vals = registry.evaluate(y, p, None, BINARY)
    best = registry.evaluate(y, y, None, BINARY)
    for m in BINARY:
        lo, hi = registry.get(m).value_range
        assert lo <= vals[m] <= hi + 1e-12, m
        if m == "td":
            assert best[m] == 0.0
        elif m == "nab":
            assert best[m] == pytest.approx(100.0)
        else:
            assert best[m] == pytest.approx(1.0, abs=1e-12), m
            assert vals[m] <= best[m] + 1e-12, m
