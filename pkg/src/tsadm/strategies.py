"""Prediction populations: forecaster surrogates, quality gradient, random controls, oracle attack."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidAlpha, InvalidParameter, SeriesTooShort
from .labels import as_labels, check_pair, runs
from .metrics import registry
from .synth import estimate_period

logger = logging.getLogger(__name__)

DETECTORS = ("moving_average", "seasonal_naive", "ar")
RANDOM_STRATEGIES = ("uniform_random", "clustered_random", "bernoulli_random")


@dataclass
class PredictionRun:
    scores: np.ndarray
    predictions: np.ndarray
    strategy: str
    seed: int | None = None
    threshold: float = 0.5  # predictions == (scores >= threshold)
    alpha: float | None = None
    meta: dict = field(default_factory=dict)


def _seed_entropy(seed):
    return None if seed is None else int(seed) & 0xFFFFFFFFFFFFFFFF


def _rng(seed):
    return np.random.default_rng(_seed_entropy(seed))


def two_band_scores(pred, rng) -> np.ndarray:
    """U(0.7, 1) on alarms and U(0, 0.3) elsewhere."""
    pred = np.asarray(pred).astype(bool)
    u = rng.random(pred.size)
    return np.where(pred, 0.7 + 0.3 * u, 0.3 * u)


def top_k_predictions(scores, k: int):
    """Alarms on the ``k`` highest scores (stable order breaks ties); returns (pred, threshold)."""
    scores = np.asarray(scores, dtype=np.float64)
    pred = np.zeros(scores.size, dtype=np.int8)
    if k <= 0:
        return pred, float(np.nextafter(scores.max(), np.inf))
    order = np.argsort(-scores, kind="stable")
    pred[order[:k]] = 1
    return pred, float(scores[order[k - 1]])


def _alarm_budget(labels) -> int:
    return int(round(float(np.mean(labels)) * labels.size))


# --- genuine forecasters -------------------------------------------------

MA_WINDOW = 10
AR_ORDER = 10
SIGMA_WINDOW = 100
SIGMA_FLOOR = 1e-8
MAD_SCALE = 1.4826  # median |r| to sigma under normal residuals
SCORE_SMOOTH = 10


def _forecast_moving_average(x, w=MA_WINDOW):
    c = np.concatenate(([0.0], np.cumsum(x)))
    t = np.arange(x.size)
    lo = np.maximum(t - w, 0)
    n = t - lo
    f = np.empty_like(x)
    f[0] = x[0]
    f[1:] = (c[t[1:]] - c[lo[1:]]) / n[1:]
    return f


def _forecast_seasonal_naive(x):
    P = int(round(estimate_period(x, 10, max(10, x.size // 3))))
    f = np.empty_like(x)
    f[0] = x[0]
    f[1:P] = x[:P - 1]
    f[P:] = x[:-P]
    return f


def _lag_matrix(x, p):
    n = x.size - p
    idx = np.arange(p)[None, :] + np.arange(n)[:, None]
    return x[idx][:, ::-1]  # column j holds lag j + 1


def _forecast_ar(x, labels, p=AR_ORDER):
    """AR(p) with intercept, fitted by least squares on windows free of labelled anomalies."""
    lags = _lag_matrix(x, p)
    X = np.column_stack((np.ones(lags.shape[0]), lags))
    target = x[p:]
    bad = np.concatenate(([0], np.cumsum(labels, dtype=np.int64)))
    t = np.arange(p, x.size)
    clean = (bad[t + 1] - bad[t - p]) == 0
    if clean.sum() < 2 * (p + 1):
        clean = np.ones_like(clean)
    coef, *_ = np.linalg.lstsq(X[clean], target[clean], rcond=None)
    f = np.empty_like(x)
    f[:p] = np.concatenate(([x[0]], x[:p - 1]))
    f[p:] = X @ coef
    return f


def _trailing_mean(x, w):
    c = np.concatenate(([0.0], np.cumsum(x)))
    t = np.arange(x.size)
    lo = np.maximum(t - w + 1, 0)
    return (c[t + 1] - c[lo]) / (t + 1 - lo)


def local_sigma(resid, window: int = SIGMA_WINDOW) -> np.ndarray:
    """Robust trailing sigma: scaled median of |residual| over the preceding ``window`` points."""
    sigma = MAD_SCALE * kernels.rolling_median(np.abs(resid), window)
    return np.maximum(sigma, SIGMA_FLOOR)


def genuine_scores(signal, labels, detector: str = "moving_average") -> np.ndarray:
    """Forecast residuals over a trailing local sigma, smoothed and min-max mapped to [0, 1].

    The median keeps sigma from absorbing the anomalies it should expose; the
    short trailing mean spreads onset spikes over the first points of an event.
    Labels are used only by the AR detector, to keep anomalies out of its fit.
    """
    x = np.asarray(signal, dtype=np.float64)
    y = as_labels(labels, "labels")
    check_pair(x, y, ("signal", "labels"))
    if detector not in DETECTORS:
        raise InvalidParameter(f"unknown detector {detector!r}")
    warmup = {"moving_average": 2 * MA_WINDOW, "seasonal_naive": 40, "ar": 4 * (AR_ORDER + 1)}[detector]
    if x.size < max(warmup, 2 * SIGMA_WINDOW):
        raise SeriesTooShort(f"{detector} needs at least {max(warmup, 2 * SIGMA_WINDOW)} points")
    if detector == "moving_average":
        f = _forecast_moving_average(x)
    elif detector == "seasonal_naive":
        f = _forecast_seasonal_naive(x)
    else:
        f = _forecast_ar(x, y)
    resid = x - f
    s = _trailing_mean(np.abs(resid) / local_sigma(resid), SCORE_SMOOTH)
    lo, hi = s.min(), s.max()
    if hi - lo <= 0:
        return np.zeros_like(s)
    return (s - lo) / (hi - lo)


def genuine_run(signal, labels, detector: str, seed: int | None = None) -> PredictionRun:
    """Forecaster run with the same alarm budget as the random controls."""
    y = as_labels(labels, "labels")
    s = genuine_scores(signal, y, detector)
    pred, thr = top_k_predictions(s, _alarm_budget(y))
    return PredictionRun(s, pred, "genuine", seed, thr, meta={"detector": detector})


# --- quality gradient ----------------------------------------------------

def bernoulli_mix_probability(alpha: float) -> float:
    """Chance of replacing a point by a Bernoulli(p) draw; 0 above 0.4, 1 at or below 0.2."""
    return float(np.clip((0.4 - alpha) / 0.2, 0.0, 1.0))


def quality_gradient(labels, alpha: float, seed: int | None = None) -> PredictionRun:
    """Degraded copy of the labels at quality ``alpha``.

    A share ``1 - alpha`` of anomalous points and ``(1 - alpha) p`` of normal
    points are flipped, low ``alpha`` blends in Bernoulli(p) draws, and the
    two-band scores get N(0, 0.1 (1 - alpha)) jitter before thresholding at 0.5.
    """
    if not 0 < alpha <= 1:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    y = as_labels(labels, "labels")
    # one stream per stage: runs sharing a seed differ across alpha only where alpha acts
    flip_rng, mix_rng, band_rng, noise_rng = (
        np.random.default_rng(c) for c in np.random.SeedSequence(_seed_entropy(seed)).spawn(4))
    T = y.size
    p = float(y.mean())
    pred = y.copy()
    phi = 1.0 - alpha
    anom = np.flatnonzero(y)
    norm = np.flatnonzero(y == 0)
    n_a = int(round(phi * anom.size))
    n_n = int(round(phi * p * norm.size))
    pred[flip_rng.permutation(anom)[:n_a]] ^= 1
    pred[flip_rng.permutation(norm)[:n_n]] ^= 1
    q = bernoulli_mix_probability(alpha)
    swap = mix_rng.random(T) < q
    draws = (mix_rng.random(T) < p).astype(np.int8)
    pred = np.where(swap, draws, pred).astype(np.int8)
    scores = two_band_scores(pred, band_rng) + 0.1 * (1.0 - alpha) * noise_rng.standard_normal(T)
    return PredictionRun(scores, (scores >= 0.5).astype(np.int8), "gradient", seed, 0.5, alpha)


# --- random controls -----------------------------------------------------

def uniform_random(labels, seed: int | None = None) -> PredictionRun:
    """U(0, 1) scores; alarms on the top ``round(p T)``."""
    y = as_labels(labels, "labels")
    rng = _rng(seed)
    s = rng.random(y.size)
    pred, thr = top_k_predictions(s, _alarm_budget(y))
    return PredictionRun(s, pred, "uniform_random", seed, thr)


CLUSTER_MEAN_LENGTH = 10.0


def clustered_random(labels, seed: int | None = None) -> PredictionRun:
    """Poisson cluster centres with geometric lengths, calibrated to cover a share p."""
    y = as_labels(labels, "labels")
    rng = _rng(seed)
    T = y.size
    p = float(y.mean())
    lam = -np.log1p(-p) / CLUSTER_MEAN_LENGTH if p < 1 else 1.0
    n = rng.poisson(lam * T)
    centres = rng.integers(0, T, size=n)
    lengths = rng.geometric(1.0 / CLUSTER_MEAN_LENGTH, size=n)
    starts = np.clip(centres - lengths // 2, 0, T)
    ends = np.clip(starts + lengths, 0, T)
    mark = np.zeros(T + 1, dtype=np.int64)
    np.add.at(mark, starts, 1)
    np.add.at(mark, ends, -1)
    pred = (np.cumsum(mark[:-1]) > 0).astype(np.int8)
    return PredictionRun(two_band_scores(pred, rng), pred, "clustered_random", seed, 0.5)


def bernoulli_random(labels, seed: int | None = None) -> PredictionRun:
    """Independent alarms at the anomaly rate."""
    y = as_labels(labels, "labels")
    rng = _rng(seed)
    p = float(y.mean())
    pred = (rng.random(y.size) < p).astype(np.int8)
    return PredictionRun(two_band_scores(pred, rng), pred, "bernoulli_random", seed, 0.5)


RANDOM_FUNCS = {
    "uniform_random": uniform_random,
    "clustered_random": clustered_random,
    "bernoulli_random": bernoulli_random,
}


# --- oracle attack -------------------------------------------------------

def _objective(metric_id, y, config):
    spec = registry.get(metric_id)
    sign = 1.0 if spec.higher_is_better else -1.0

    def f(pred):
        score = pred.astype(np.float64)
        try:
            v = registry.evaluate(y, pred, score, [metric_id], config)[metric_id]
        except Exception:  # degenerate inputs (e.g. a single class) score as worst
            return -np.inf
        return sign * v if np.isfinite(v) else -np.inf

    return f


def _propose(pred, budget, rng):
    """One random neighbour of ``pred`` within the budget, or None."""
    T = pred.size
    used = int(pred.sum())
    move = rng.random()
    cand = pred.copy()
    starts, ends = runs(pred)
    if move < 0.5 or starts.size == 0:
        t = int(rng.integers(T))
        if cand[t] == 0 and used >= budget:
            return None
        cand[t] ^= 1
        return cand
    i = int(rng.integers(starts.size))
    s, e = int(starts[i]), int(ends[i])
    if move < 0.75:
        kind = int(rng.integers(4))
        if kind == 0 and s > 0 and used < budget:
            cand[s - 1] = 1
        elif kind == 1 and e < T - 1 and used < budget:
            cand[e + 1] = 1
        elif kind == 2:
            cand[s] = 0
        elif kind == 3:
            cand[e] = 0
        else:
            return None
        return cand
    L = e - s + 1
    new = int(rng.integers(0, T - L + 1))
    cand[s:e + 1] = 0
    cand[new:new + L] = 1
    if int(cand.sum()) > budget:
        return None
    return cand


def oracle_attack(labels, metric_id: str, alarm_budget: float = 0.1, iterations: int = 2000,
                  restarts: int = 5, seed: int | None = None, config=None) -> PredictionRun:
    """Greedy hill climbing on a metric with full knowledge of the labels.

    Starts from no alarms, accepts strict improvements only, and never lets the
    alarm count exceed ``alarm_budget * T``. Returns the best restart.
    """
    registry.get(metric_id)
    if not 0 < alarm_budget < 1:
        raise InvalidParameter("alarm_budget must lie in (0, 1)")
    if iterations < 0 or restarts < 1:
        raise InvalidParameter("iterations must be >= 0 and restarts >= 1")
    y = as_labels(labels, "labels")
    T = y.size
    budget = int(np.floor(alarm_budget * T))
    f = _objective(metric_id, y, config)
    ss = np.random.SeedSequence(_seed_entropy(seed))
    best_pred, best_val = None, -np.inf
    for child in ss.spawn(restarts):
        rng = np.random.default_rng(child)
        pred = np.zeros(T, dtype=np.int8)
        val = f(pred)
        for _ in range(iterations):
            cand = _propose(pred, budget, rng)
            if cand is None:
                continue
            v = f(cand)
            if v > val:
                pred, val = cand, v
        if best_pred is None or val > best_val:
            best_pred, best_val = pred, val
    rng = np.random.default_rng(ss.spawn(1)[0])
    spec = registry.get(metric_id)
    value = best_val if spec.higher_is_better else -best_val
    return PredictionRun(two_band_scores(best_pred, rng), best_pred, "oracle", seed, 0.5,
                         meta={"metric": metric_id, "value": float(value), "budget": budget})
