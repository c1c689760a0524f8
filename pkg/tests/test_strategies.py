import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tsadm import strategies as S
from tsadm.errors import InvalidAlpha, SeriesTooShort, UnknownMetric
from tsadm.metrics.point import pa_f, pw_f


def seg_labels(T=1000, every=100, width=10):
    y = np.zeros(T, dtype=np.int8)
    for a in range(every // 2, T, every):
        y[a:a + width] = 1
    return y


Y = seg_labels()


def lag1(a):
    a = a.astype(np.float64) - a.mean()
    return float(np.dot(a[:-1], a[1:]) / np.dot(a, a))


# --- genuine scores ----------------------------------------------------------

@pytest.mark.parametrize("det", S.DETECTORS)
def test_spike_dominates(det):
    rng = np.random.default_rng(0)
    T = 3000
    t = np.arange(T)
    x = np.sin(2 * np.pi * t / 80) + 0.05 * rng.standard_normal(T)
    x[1500] += 3
    y = np.zeros(T, dtype=np.int8)
    y[1500] = 1
    s = S.genuine_scores(x, y, det)
    assert s[1500] > np.percentile(np.delete(s, 1500), 99)
    assert s.min() == 0.0 and s.max() == 1.0


def test_constant_signal_scores_near_zero():
    s = S.genuine_scores(np.full(500, 3.0), np.zeros(500, dtype=np.int8), "moving_average")
    assert np.all(np.abs(s) < 1e-6)


@pytest.mark.parametrize("det", S.DETECTORS)
def test_genuine_deterministic(det):
    x = np.random.default_rng(1).standard_normal(600).cumsum()
    y = seg_labels(600, 200, 20)
    assert S.genuine_scores(x, y, det).tobytes() == S.genuine_scores(x, y, det).tobytes()


def test_genuine_too_short():
    with pytest.raises(SeriesTooShort):
        S.genuine_scores(np.zeros(5), np.zeros(5, dtype=np.int8), "ar")


def test_local_sigma_floor():
    np.testing.assert_array_equal(S.local_sigma(np.zeros(300)), S.SIGMA_FLOOR)


def test_genuine_run_alarm_budget():
    x = np.random.default_rng(2).standard_normal(1000)
    r = S.genuine_run(x, Y, "moving_average", 0)
    assert r.predictions.sum() == Y.sum()
    np.testing.assert_array_equal(r.predictions, r.scores >= r.threshold)


# --- quality gradient ----------------------------------------------------------

def test_gradient_alpha_one_is_labels():
    r = S.quality_gradient(Y, 1.0, 3)
    np.testing.assert_array_equal(r.predictions, Y)
    assert r.alpha == 1.0


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.2])
def test_gradient_rejects_alpha(alpha):
    with pytest.raises(InvalidAlpha):
        S.quality_gradient(Y, alpha, 0)


def test_gradient_low_alpha_matches_bernoulli():
    n = 60
    hits_g = sum(int(S.quality_gradient(Y, 0.1, k).predictions[Y == 1].sum()) for k in range(n))
    hits_b = sum(int(S.bernoulli_random(Y, 10_000 + k).predictions[Y == 1].sum()) for k in range(n))
    m = n * int(Y.sum())
    p1, p2 = hits_g / m, hits_b / m
    pool = (hits_g + hits_b) / (2 * m)
    z = (p1 - p2) / np.sqrt(pool * (1 - pool) * 2 / m)
    assert 2 * stats.norm.sf(abs(z)) > 0.01


def _mean_pwf(alpha, n=60):
    return np.mean([pw_f(Y, S.quality_gradient(Y, alpha, k).predictions) for k in range(n)])


def test_gradient_mean_pwf_increasing():
    means = [_mean_pwf(a / 10) for a in range(2, 10)]
    assert all(a < b for a, b in zip(means, means[1:])), means


def test_gradient_fully_uninformative_below_point_two():
    a = [pw_f(Y, S.quality_gradient(Y, 0.1, k).predictions) for k in range(60)]
    b = [pw_f(Y, S.quality_gradient(Y, 0.2, k).predictions) for k in range(60)]
    assert stats.ttest_ind(a, b).pvalue > 0.01


def test_bernoulli_mix_probability():
    assert S.bernoulli_mix_probability(0.9) == 0.0
    assert S.bernoulli_mix_probability(0.4) == 0.0
    assert S.bernoulli_mix_probability(0.3) == pytest.approx(0.5)
    assert S.bernoulli_mix_probability(0.2) == 1.0


# --- random controls -----------------------------------------------------------

@pytest.mark.parametrize("name", list(S.RANDOM_FUNCS))
def test_random_replay_and_two_band(name):
    f = S.RANDOM_FUNCS[name]
    a, b = f(Y, 42), f(Y, 42)
    assert a.scores.tobytes() == b.scores.tobytes()
    assert a.strategy == name
    np.testing.assert_array_equal(a.predictions, a.scores >= a.threshold)
    if name != "uniform_random":
        on, off = a.scores[a.predictions == 1], a.scores[a.predictions == 0]
        assert on.size == 0 or (on.min() >= 0.7 and on.max() <= 1.0)
        assert off.max() < 0.3


def test_uniform_alarm_count_exact():
    assert S.uniform_random(Y, 0).predictions.sum() == round(Y.mean() * Y.size)


def test_uniform_positions_chi_square():
    y = seg_labels(50, 25, 3)
    counts = sum(S.uniform_random(y, k).predictions.astype(np.int64) for k in range(1000))
    assert stats.chisquare(counts).pvalue > 0.01


def test_clustered_rate_and_clustering():
    T = 2000
    y = seg_labels(T)
    pT = y.mean() * T
    runs = [S.clustered_random(y, k).predictions for k in range(1000)]
    assert np.mean([r.sum() for r in runs]) == pytest.approx(pT, rel=0.1)
    uni = [S.uniform_random(y, k).predictions for k in range(200)]
    assert np.mean([lag1(r) for r in runs[:200]]) > np.mean([lag1(r) for r in uni])


def test_bernoulli_rate_and_independence():
    T, n = 1000, 1000
    p = Y.mean()
    runs = [S.bernoulli_random(Y, k).predictions for k in range(n)]
    total = sum(int(r.sum()) for r in runs)
    sd = np.sqrt(n * T * p * (1 - p))
    assert abs(total - n * T * p) <= 3 * sd
    acs = np.array([lag1(r) for r in runs])
    assert abs(acs.mean()) <= 3 * acs.std() / np.sqrt(n) + 1.0 / T


# --- oracle attack -------------------------------------------------------------

def test_attack_pa_inflation():
    y = seg_labels(1000, 100, 40)
    r = S.oracle_attack(y, "paf", alarm_budget=0.05, iterations=1500, restarts=2, seed=0)
    assert pa_f(y, r.predictions) == 1.0
    assert r.meta["value"] == 1.0


def test_attack_pwf_respects_analytic_cap():
    y = seg_labels(400, 100, 50)  # 200 anomalous points, budget 40
    r = S.oracle_attack(y, "pwf", alarm_budget=0.1, iterations=800, restarts=2, seed=1)
    b, m = 40, int(y.sum())
    assert r.predictions.sum() <= b
    assert pw_f(y, r.predictions) <= 2 * b / (2 * b + (m - b)) + 1e-12


def test_attack_zero_iterations():
    r = S.oracle_attack(Y, "paf", iterations=0, restarts=1, seed=0)
    assert r.predictions.sum() == 0


def test_attack_unknown_metric():
    with pytest.raises(UnknownMetric):
        S.oracle_attack(Y, "nope")


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from(["pwf", "td", "sf"]), st.floats(0.01, 0.3))
def test_attack_never_exceeds_budget(seed, mid, budget):
    y = seg_labels(200, 50, 8)
    r = S.oracle_attack(y, mid, alarm_budget=budget, iterations=150, restarts=1, seed=seed)
    assert r.predictions.sum() <= int(np.floor(budget * 200))
    again = S.oracle_attack(y, mid, alarm_budget=budget, iterations=150, restarts=1, seed=seed)
    np.testing.assert_array_equal(r.predictions, again.predictions)
