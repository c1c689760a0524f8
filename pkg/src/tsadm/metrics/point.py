"""Point-level F-scores and their adjusted variants (PA, K%-PA, delayed PA)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidK, InvalidParameter
from ..labels import as_labels, check_pair, fbeta_counts, reaches, runs


@dataclass(frozen=True)
class PointMetricParams:
    beta: float = 1.0
    k_coverage: float = 0.2
    k_delay: int = 7

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidParameter("beta must be > 0")
        if not 0 < self.k_coverage <= 1:
            raise InvalidK("k_coverage must lie in (0, 1]")
        if self.k_delay < 1:
            raise InvalidParameter("k_delay must be >= 1")


def _pair(y, yhat):
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    return y, yhat


def _f_from_adjusted(y, adjusted, beta):
    tp = int(np.sum(y & adjusted))
    fp = int(np.sum((1 - y) & adjusted))
    fn = int(np.sum(y & (1 - adjusted)))
    return fbeta_counts(tp, fp, fn, beta)


def pw_f(y, yhat, beta: float = 1.0) -> float:
    """Point-wise F-beta."""
    y, yhat = _pair(y, yhat)
    return _f_from_adjusted(y, yhat, beta)


def _segment_hits(yhat, starts, ends):
    c = np.concatenate(([0], np.cumsum(yhat, dtype=np.int64)))
    return c[ends + 1] - c[starts]


def _fill(yhat, starts, ends, detected):
    """Fill detected segments with ones and clear the others."""
    out = yhat.copy()
    mark = np.zeros(yhat.size + 1, dtype=np.int64)
    np.add.at(mark, starts, 1)
    np.add.at(mark, ends + 1, -1)
    inside = np.cumsum(mark[:-1]) > 0
    seg_id = np.cumsum(np.isin(np.arange(yhat.size), starts)) - 1
    fill = np.zeros(yhat.size, dtype=bool)
    fill[inside] = detected[seg_id[inside]]
    out[inside] = 0
    out[fill] = 1
    return out


def point_adjust(y, yhat) -> np.ndarray:
    """Mark every ground-truth segment containing a predicted positive as fully detected.

    Predictions outside ground-truth segments pass through unchanged.
    """
    y, yhat = _pair(y, yhat)
    starts, ends = runs(y)
    if starts.size == 0:
        return yhat.copy()
    detected = _segment_hits(yhat, starts, ends) > 0
    # undetected segments hold no predicted positives, so clearing them is a no-op
    return _fill(yhat, starts, ends, detected)


def pa_f(y, yhat, beta: float = 1.0) -> float:
    y, yhat = _pair(y, yhat)
    return _f_from_adjusted(y, point_adjust(y, yhat), beta)


def k_pa_f(y, yhat, K: float = 0.2, beta: float = 1.0) -> float:
    """K%-point-adjusted F-beta.

    A segment of length ``L`` is filled when it holds at least ``K * L``
    predicted points; otherwise its predictions are dropped and the whole
    segment counts as missed.
    """
    if not 0 < K <= 1:
        raise InvalidK(f"K must lie in (0, 1], got {K}")
    y, yhat = _pair(y, yhat)
    starts, ends = runs(y)
    if starts.size == 0:
        return _f_from_adjusted(y, yhat, beta)
    hits = _segment_hits(yhat, starts, ends)
    detected = (hits > 0) & reaches(hits, K * (ends - starts + 1))
    return _f_from_adjusted(y, _fill(yhat, starts, ends, detected), beta)


def dt_pa_f(y, yhat, k: int = 7, beta: float = 1.0) -> float:
    """Delayed-threshold point-adjusted F-beta.

    A segment ``[s, e]`` counts as detected only when a prediction falls in
    ``[s, min(s + k - 1, e)]``.
    """
    if k < 1:
        raise InvalidParameter("k must be >= 1")
    y, yhat = _pair(y, yhat)
    starts, ends = runs(y)
    if starts.size == 0:
        return _f_from_adjusted(y, yhat, beta)
    early_end = np.minimum(starts + k - 1, ends)
    detected = _segment_hits(yhat, starts, early_end) > 0
    return _f_from_adjusted(y, _fill(yhat, starts, ends, detected), beta)
