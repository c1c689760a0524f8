"""Proximity-aware evaluation with pre-buffer, true and post-buffer regions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyGrid, InvalidParameter, NoGroundTruthSegments
from ..labels import as_labels, as_scores, check_pair, fbeta, runs


@dataclass(frozen=True)
class PateParams:
    eps_grid: tuple = (5, 10, 20)
    delta_grid: tuple = (5, 10, 20)

    def __post_init__(self):
        object.__setattr__(self, "eps_grid", tuple(int(v) for v in self.eps_grid))
        object.__setattr__(self, "delta_grid", tuple(int(v) for v in self.delta_grid))
        if not self.eps_grid or not self.delta_grid:
            raise EmptyGrid("PATE buffer grids must be non-empty")
        if min(self.eps_grid) < 0 or min(self.delta_grid) < 0:
            raise InvalidParameter("buffer sizes must be >= 0")


def point_weights(gs, ge, T, eps, delta):
    """Per-timestep credit split when the point is predicted.

    Returns ``(tp_w, fp_w, is_true)``: a predicted point adds ``tp_w`` to the
    weighted TP mass and ``fp_w`` to the weighted FP mass; unpredicted true
    points add 1 to the FN mass.
    """
    L = (ge - gs + 1).astype(np.float64)
    mid = (gs + ge) / 2.0
    prev_post = np.empty_like(gs)
    prev_post[0] = -1
    prev_post[1:] = np.minimum(np.minimum(ge[:-1] + delta, gs[1:] - 1), T - 1)
    pre_lo = np.maximum(np.maximum(0, gs - eps), prev_post + 1)
    nxt = np.append(gs[1:] - 1, T - 1)
    post_hi = np.minimum(np.minimum(ge + delta, nxt), T - 1)

    anchor_pre = np.maximum(0, gs - eps)
    anchor_post = np.minimum(ge + delta, T - 1)
    den_pre = L * (mid - anchor_pre)
    den_post = L * (anchor_post - mid)

    t = np.arange(T)
    tp_w = np.zeros(T)
    fp_w = np.ones(T)
    is_true = np.zeros(T, dtype=bool)

    k = np.searchsorted(gs, t, side="right") - 1
    kk = np.maximum(k, 0)
    in_true = (k >= 0) & (t <= ge[kk])
    in_post = (k >= 0) & (t > ge[kk]) & (t <= post_hi[kk])
    with np.errstate(divide="ignore", invalid="ignore"):
        w_post = 1.0 - L[kk] * (t - mid[kk]) / den_post[kk]
    kn = np.minimum(k + 1, gs.size - 1)
    in_pre = (k + 1 < gs.size) & ~in_true & ~in_post & (t >= pre_lo[kn]) & (t < gs[kn])
    with np.errstate(divide="ignore", invalid="ignore"):
        w_pre = 1.0 - L[kn] * (mid[kn] - t) / den_pre[kn]

    is_true[in_true] = True
    tp_w[in_true] = 1.0
    fp_w[in_true] = 0.0
    tp_w[in_post] = w_post[in_post]
    fp_w[in_post] = 1.0 - w_post[in_post]
    tp_w[in_pre] = w_pre[in_pre]
    fp_w[in_pre] = 1.0 - w_pre[in_pre]
    return tp_w, fp_w, is_true


def _segments(y):
    gs, ge = runs(y)
    if gs.size == 0:
        raise NoGroundTruthSegments("PATE needs at least one anomalous segment")
    return gs, ge


def _weighted_pr(tp_w, fp_w, is_true, pred):
    wtp = float(np.sum(tp_w[pred]))
    wfp = float(np.sum(fp_w[pred]))
    wfn = float(np.sum(is_true & ~pred))
    p = wtp / (wtp + wfp) if wtp + wfp > 0 else 0.0
    r = wtp / (wtp + wfn) if wtp + wfn > 0 else 0.0
    return p, r


def pate_f1(y, yhat, params: PateParams = PateParams()) -> float:
    """Weighted F1 averaged over the buffer-size grid."""
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    gs, ge = _segments(y)
    pred = yhat.astype(bool)
    vals = []
    for eps in params.eps_grid:
        for delta in params.delta_grid:
            tp_w, fp_w, is_true = point_weights(gs, ge, y.size, eps, delta)
            vals.append(fbeta(*_weighted_pr(tp_w, fp_w, is_true, pred)))
    return float(np.mean(vals))


def _weighted_ap(order, boundaries, tp_w, fp_w, is_true):
    """Step-interpolated area under the weighted PR curve over descending thresholds."""
    n_true = float(is_true.sum())
    ctp = np.cumsum(tp_w[order])[boundaries]
    cfp = np.cumsum(fp_w[order])[boundaries]
    ctrue = np.cumsum(is_true[order])[boundaries]
    wfn = n_true - ctrue
    with np.errstate(divide="ignore", invalid="ignore"):
        prec = np.where(ctp + cfp > 0, ctp / (ctp + cfp), 0.0)
        rec = np.where(ctp + wfn > 0, ctp / (ctp + wfn), 0.0)
    return float(np.sum(np.diff(np.concatenate(([0.0], rec))) * prec))


def pate(y, score, params: PateParams = PateParams(), order=None) -> float:
    """Weighted PR area averaged over the buffer-size grid.

    Thresholds sweep every distinct score, predicting ``s >= theta``.
    ``order`` may pass a precomputed descending stable argsort of ``score``.
    """
    y = as_labels(y, "y")
    s = as_scores(score, "score")
    check_pair(y, s, ("y", "score"))
    gs, ge = _segments(y)
    if order is None:
        order = np.argsort(-s, kind="stable")
    ss = s[order]
    boundaries = np.append(np.flatnonzero(np.diff(ss) != 0), ss.size - 1)
    vals = []
    for eps in params.eps_grid:
        for delta in params.delta_grid:
            tp_w, fp_w, is_true = point_weights(gs, ge, y.size, eps, delta)
            vals.append(_weighted_ap(order, boundaries, tp_w, fp_w, is_true))
    return float(np.mean(vals))
