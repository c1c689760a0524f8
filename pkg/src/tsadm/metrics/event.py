"""Event-level and hybrid metrics built on segment overlaps.

Segment-wise F, composite F, range-based F, time-tolerant F, temporal
distance, TaF, eTaF, LSF and precision at K. Affiliation, NAB and PATE live
in their own modules.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import InvalidParameter, NoAnomalies
from ..labels import as_labels, as_scores, check_pair, fbeta, fbeta_counts, reaches, runs


@dataclass(frozen=True)
class RangeFParams:
    alpha: float = 0.2
    positional_bias: str = "flat"
    cardinality: str = "inverse"

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise InvalidParameter("alpha must lie in [0, 1]")
        if self.positional_bias not in ("flat", "front", "back"):
            raise InvalidParameter(f"unknown positional bias {self.positional_bias!r}")
        if self.cardinality not in ("one", "inverse"):
            raise InvalidParameter(f"unknown cardinality {self.cardinality!r}")


@dataclass(frozen=True)
class TaFParams:
    alpha: float = 0.5
    theta: float = 0.5
    delta: int = 10

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise InvalidParameter("alpha must lie in [0, 1]")
        if not 0 < self.theta <= 1:
            raise InvalidParameter("theta must lie in (0, 1]")
        if self.delta < 0:
            raise InvalidParameter("delta must be >= 0")


@dataclass(frozen=True)
class ETaFParams:
    theta_r: float = 0.1
    theta_p: float = 0.5
    delta: int = 0

    def __post_init__(self):
        for name in ("theta_r", "theta_p"):
            if not 0 < getattr(self, name) <= 1:
                raise InvalidParameter(f"{name} must lie in (0, 1]")
        if self.delta < 0:
            raise InvalidParameter("delta must be >= 0")


@dataclass(frozen=True)
class LsfParams:
    w: int = 10
    literal: bool = False

    def __post_init__(self):
        if self.w < 1:
            raise InvalidParameter("w must be >= 1")


def _pair(y, yhat):
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    return y, yhat


def _segment_hit_flags(y, yhat):
    """Per gt segment: overlapped by a prediction; per predicted segment: overlaps gt."""
    gs, ge = runs(y)
    ps, pe = runs(yhat)
    cy = np.concatenate(([0], np.cumsum(y, dtype=np.int64)))
    cp = np.concatenate(([0], np.cumsum(yhat, dtype=np.int64)))
    g_hit = (cp[ge + 1] - cp[gs]) > 0
    p_hit = (cy[pe + 1] - cy[ps]) > 0
    return g_hit, p_hit


def segment_f(y, yhat, beta: float = 1.0) -> float:
    """Event-level F-beta: gt segments hit at least once versus isolated predicted segments."""
    y, yhat = _pair(y, yhat)
    g_hit, p_hit = _segment_hit_flags(y, yhat)
    tp = int(g_hit.sum())
    fn = g_hit.size - tp
    fp = int((~p_hit).sum())
    return fbeta_counts(tp, fp, fn, beta)


def composite_f(y, yhat, beta: float = 1.0) -> float:
    """F-beta of point-wise precision and event-level recall."""
    y, yhat = _pair(y, yhat)
    g_hit, _ = _segment_hit_flags(y, yhat)
    npred = int(yhat.sum())
    p = int(np.sum(y & yhat)) / npred if npred else 0.0
    r = float(g_hit.mean()) if g_hit.size else 0.0
    return fbeta(p, r, beta)


def _positional_mass(a, b, L, bias):
    """Sum of positional weights over 1-based positions a..b of a length-L range."""
    n = b - a + 1
    if bias == "flat":
        return n.astype(np.float64)
    ab = (a + b) * n / 2.0
    if bias == "back":
        return ab
    return n * (L + 1) - ab


def range_f(y, yhat, params: RangeFParams = RangeFParams(), beta: float = 1.0) -> float:
    """Range-based F-beta.

    Recall scores each gt range by existence plus cardinality-penalised,
    positionally weighted coverage. Precision does the same for predicted
    ranges with flat weighting.
    """
    y, yhat = _pair(y, yhat)
    gs, ge = runs(y)
    ps, pe = runs(yhat)
    if gs.size == 0 or ps.size == 0:
        return 0.0
    gi, pj, ln = kernels.interval_overlaps(gs, ge, ps, pe)
    a = params.alpha
    ng, npr = gs.size, ps.size

    n_g = np.bincount(gi, minlength=ng)
    n_p = np.bincount(pj, minlength=npr)

    Lg = (ge - gs + 1).astype(np.float64)
    lo = np.maximum(gs[gi], ps[pj]) - gs[gi] + 1
    hi = np.minimum(ge[gi], pe[pj]) - gs[gi] + 1
    mass = _positional_mass(lo, hi, Lg[gi], params.positional_bias)
    total = _positional_mass(np.ones(ng, np.int64), Lg.astype(np.int64), Lg, params.positional_bias)
    cov_g = np.bincount(gi, weights=mass, minlength=ng) / total

    Lp = (pe - ps + 1).astype(np.float64)
    cov_p = np.bincount(pj, weights=ln.astype(np.float64), minlength=npr) / Lp

    if params.cardinality == "inverse":
        g_g = 1.0 / np.maximum(n_g, 1)
        g_p = 1.0 / np.maximum(n_p, 1)
    else:
        g_g = np.ones(ng)
        g_p = np.ones(npr)
    s_g = a * (n_g > 0) + (1 - a) * g_g * cov_g
    s_p = a * (n_p > 0) + (1 - a) * g_p * cov_p
    return fbeta(float(s_p.mean()), float(s_g.mean()), beta)


def time_tolerant_f(y, yhat, d: int = 5, beta: float = 1.0) -> float:
    """F-beta where a point counts as matched if a counterpart lies within +-d steps."""
    if d < 0:
        raise InvalidParameter("d must be >= 0")
    y, yhat = _pair(y, yhat)
    T = y.size

    def near(src):
        c = np.concatenate(([0], np.cumsum(src, dtype=np.int64)))
        t = np.arange(T)
        return (c[np.minimum(t + d + 1, T)] - c[np.maximum(t - d, 0)]) > 0

    ny = int(y.sum())
    np_ = int(yhat.sum())
    hr = int(np.sum(near(yhat)[y.astype(bool)]))
    hp = int(np.sum(near(y)[yhat.astype(bool)]))
    # F of P = hp/np_ and R = hr/ny in count form, so d=0 reproduces PwF bit for bit
    b2 = beta * beta
    denom = b2 * hp * ny + hr * np_
    return (1 + b2) * hp * hr / denom if denom > 0 else 0.0


def temporal_distance(y, yhat) -> float:
    """Bidirectional nearest-neighbour distance between anomalous point sets (lower is better).

    An empty counterpart set costs the series length per point.
    """
    y, yhat = _pair(y, yhat)
    L = y.size
    A = np.flatnonzero(y)
    B = np.flatnonzero(yhat)
    if A.size == 0 or B.size == 0:
        return float(L * (A.size + B.size))
    return float(kernels.nearest_distance_sum(A, B) + kernels.nearest_distance_sum(B, A))


def td_worst_case(y, yhat) -> float:
    """Upper bound ``L * (|A| + |B|)`` used to invert TD into a [0, 1] score."""
    y, yhat = _pair(y, yhat)
    return float(y.size * (int(y.sum()) + int(yhat.sum())))


# --- TaF / eTaF -----------------------------------------------------------

def decay_weights(delta: int) -> np.ndarray:
    """Sigmoid weights for distances ``1..delta`` past a segment end."""
    if delta <= 0:
        return np.zeros(0)
    d = np.arange(1, delta + 1, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(6.0 * (2.0 * d / delta - 1.0)))


def _fuzzy_overlaps(gs, ge, ps, pe, T, delta):
    """Weighted overlaps between gt segments extended by their decay zones and predictions.

    Each gt segment ``[s, e]`` is extended to ``[s, z]`` where the trailing zone
    stops before the next gt segment and the series end. Points of the segment
    weigh 1, zone points weigh ``decay_weights(delta)[t - e - 1]``.
    """
    if delta > 0:
        nxt = np.append(gs[1:] - 1, T - 1)
        z = np.minimum(ge + delta, nxt)
        dw = decay_weights(delta)
    else:
        z = ge
    gi, pj, _ = kernels.interval_overlaps(gs, z, ps, pe)
    a = ps[pj]
    b = pe[pj]
    core = np.maximum(np.minimum(b, ge[gi]) - np.maximum(a, gs[gi]) + 1, 0).astype(np.float64)
    if delta > 0:
        lo = np.maximum(a, ge[gi] + 1) - ge[gi]
        hi = np.minimum(b, z[gi]) - ge[gi]
        # direct sums rather than cumsum differences keep single weights exact at thresholds
        d = np.arange(1, delta + 1)
        mask = (d[None, :] >= lo[:, None]) & (d[None, :] <= hi[:, None])
        core = core + np.where(mask, dw[None, :], 0.0).sum(axis=1)
    return gi, pj, core


def taf(y, yhat, params: TaFParams = TaFParams(), beta: float = 1.0) -> float:
    """Time-series-aware F-beta: thresholded detection plus clipped positional coverage."""
    y, yhat = _pair(y, yhat)
    gs, ge = runs(y)
    ps, pe = runs(yhat)
    if gs.size == 0 or ps.size == 0:
        return 0.0
    gi, pj, w = _fuzzy_overlaps(gs, ge, ps, pe, y.size, params.delta)
    ratio_g = np.bincount(gi, weights=w, minlength=gs.size) / (ge - gs + 1)
    ratio_p = np.bincount(pj, weights=w, minlength=ps.size) / (pe - ps + 1)
    a = params.alpha

    def side(ratio):
        det = np.mean(reaches(ratio, params.theta))
        pos = np.mean(np.minimum(1.0, ratio))
        return a * det + (1 - a) * pos

    return fbeta(float(side(ratio_p)), float(side(ratio_g)), beta)


def etaf_prune(gs, ge, ps, pe, T, params: ETaFParams):
    """Iteratively drop weak gt and predicted segments until nothing changes.

    Returns the retained masks and the final per-segment recall and precision
    ratios (clipped to 1).
    """
    gi, pj, w = _fuzzy_overlaps(gs, ge, ps, pe, T, params.delta)
    Lg = (ge - gs + 1).astype(np.float64)
    Lp = (pe - ps + 1).astype(np.float64)
    keep_g = np.ones(gs.size, dtype=bool)
    keep_p = np.ones(ps.size, dtype=bool)
    while True:
        live = keep_g[gi] & keep_p[pj]
        rec = np.minimum(1.0, np.bincount(gi[live], weights=w[live], minlength=gs.size) / Lg)
        prec = np.minimum(1.0, np.bincount(pj[live], weights=w[live], minlength=ps.size) / Lp)
        new_g = keep_g & reaches(rec, params.theta_r)
        new_p = keep_p & reaches(prec, params.theta_p)
        if np.array_equal(new_g, keep_g) and np.array_equal(new_p, keep_p):
            return keep_g, keep_p, rec, prec
        keep_g, keep_p = new_g, new_p


def etaf(y, yhat, params: ETaFParams = ETaFParams(), beta: float = 1.0) -> float:
    """Enhanced TaF with iterative pruning and square-root length weighting of predictions."""
    y, yhat = _pair(y, yhat)
    gs, ge = runs(y)
    ps, pe = runs(yhat)
    if gs.size == 0 or ps.size == 0:
        return 0.0
    keep_g, keep_p, rec, prec = etaf_prune(gs, ge, ps, pe, y.size, params)
    r = float(np.sum(keep_g * (1.0 + rec))) / (2.0 * gs.size)
    sq = np.sqrt(pe - ps + 1.0)
    p = float(np.sum(sq * keep_p * (1.0 + prec))) / (2.0 * sq.sum())
    return fbeta(p, r, beta)


# --- LSF -------------------------------------------------------------------

def lsf_counts(y, yhat, w: int = 10, literal: bool = False):
    """Batch-level (TP, FP, FN) after detection-state propagation."""
    if w < 1:
        raise InvalidParameter("w must be >= 1")
    y, yhat = _pair(y, yhat)
    return kernels.lsf_counts(y, yhat, int(w), bool(literal))


def lsf(y, yhat, w: int = 10, literal: bool = False) -> float:
    """Latency and sparsity aware F1 over fixed windows of ``w`` steps."""
    tp, fp, fn = lsf_counts(y, yhat, w, literal)
    d = 2 * tp + fp + fn
    return 2 * tp / d if d else 0.0


# --- P@K -------------------------------------------------------------------

def p_at_k(y, score) -> float:
    """Precision among points scoring at least the K-th largest score, K = number of anomalies."""
    y = as_labels(y, "y")
    s = as_scores(score, "score")
    check_pair(y, s, ("y", "score"))
    k = int(y.sum())
    if k == 0:
        raise NoAnomalies("p_at_k needs at least one anomalous point")
    tau = np.partition(s, s.size - k)[s.size - k]
    pred = s >= tau
    return float(np.sum(y[pred])) / float(np.sum(pred))
