"""Pure-numpy versions of the hot kernels.

Every function here has a twin in :mod:`tsadm.kernels.numba_impl` with the
same signature and the same results (bitwise for integer outputs, to float
round-off otherwise).
"""
import numpy as np


def interval_overlaps(gs, ge, ps, pe):
    """All overlapping pairs between two sorted, disjoint inclusive interval lists.

    Returns ``(gi, pj, length)`` where ``length`` counts shared timesteps.
    """
    gs = np.asarray(gs, dtype=np.int64)
    ge = np.asarray(ge, dtype=np.int64)
    ps = np.asarray(ps, dtype=np.int64)
    pe = np.asarray(pe, dtype=np.int64)
    if gs.size == 0 or ps.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    lo = np.searchsorted(pe, gs, side="left")
    hi = np.searchsorted(ps, ge, side="right")
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    gi = np.repeat(np.arange(gs.size, dtype=np.int64), counts)
    first = np.repeat(lo, counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    pj = (first + offsets).astype(np.int64)
    length = np.minimum(ge[gi], pe[pj]) - np.maximum(gs[gi], ps[pj]) + 1
    return gi, pj, length.astype(np.int64)


def soft_labels(y, w):
    y = np.asarray(y, dtype=np.float64)
    out = y.copy()
    if w <= 0:
        return out
    for d in range(1, w):
        f = 1.0 - d / w
        np.maximum(out[d:], y[:-d] * f, out=out[d:])
        np.maximum(out[:-d], y[d:] * f, out=out[:-d])
    return out


def weighted_curve_areas(sorted_scores, pos_w, neg_w):
    """ROC area (trapezoid) and PR area (step) for a descending score order.

    ``pos_w``/``neg_w`` are the per-point positive and negative masses,
    already permuted into the same order as ``sorted_scores``.
    """
    s = np.asarray(sorted_scores, dtype=np.float64)
    tps_all = np.cumsum(pos_w, dtype=np.float64)
    fps_all = np.cumsum(neg_w, dtype=np.float64)
    last = np.flatnonzero(np.diff(s) != 0)
    idx = np.append(last, s.size - 1)
    tps = tps_all[idx]
    fps = fps_all[idx]
    p_tot = tps[-1]
    n_tot = fps[-1]
    if n_tot > 0 and p_tot > 0:
        tpr = np.concatenate(([0.0], tps / p_tot))
        fpr = np.concatenate(([0.0], fps / n_tot))
        roc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) * 0.5))
    else:
        roc = np.nan
    if p_tot > 0:
        denom = tps + fps
        prec = np.divide(tps, denom, out=np.ones_like(tps), where=denom > 0)
        rec = tps / p_tot
        pr = float(np.sum(np.diff(np.concatenate(([0.0], rec))) * prec))
    else:
        pr = np.nan
    return roc, pr


def _run_starts(y):
    """For each anomalous index, the index where its run begins (-1 elsewhere)."""
    t = np.arange(y.size)
    starts = np.where(y & ~np.concatenate(([False], y[:-1])), t, -1)
    run_start = np.maximum.accumulate(starts)
    return np.where(y, run_start, -1)


def lsf_counts(y, yhat, w, literal):
    y = np.asarray(y).astype(bool)
    yhat = np.asarray(yhat).astype(bool)
    n = y.size
    run_start = _run_starts(y)
    tp = fp = fn = 0
    ds_prev = False
    for lo in range(0, n, w):
        hi = min(lo + w, n)
        yw = y[lo:hi]
        pw = yhat[lo:hi]
        anom = np.flatnonzero(yw)
        if anom.size == 0:
            ds = False
            fp += int(pw.any())
            ds_prev = False
            continue
        s = lo + int(anom[0])
        # detection carries over while the anomaly runs across the boundary
        cont = ds_prev and lo > 0 and y[lo - 1] and y[lo]
        hits = np.flatnonzero(yw & pw) + lo
        if hits.size == 0:
            ds = False
        elif cont:
            ds = True
        elif literal:
            ds = bool(np.any(hits == s))
        else:
            ds = bool(np.any(run_start[hits] >= lo))
        ystar = np.zeros(hi - lo, dtype=bool)
        ystar[s - lo:] = True
        pstar = pw.copy()
        if ds:
            pstar[s - lo:] = True
        tp += int(np.any(ystar & pstar))
        fp += int(np.any(~ystar & pstar))
        fn += int(np.any(ystar & ~pstar))
        ds_prev = ds
    return tp, fp, fn


def _scaled_sigmoid(r):
    return np.where(r > 3.0, -1.0, 2.0 / (1.0 + np.exp(5.0 * np.minimum(r, 3.0))) - 1.0)


def nab_raw(gs, ge, alarms, w_tp, w_fp):
    """Raw NAB score with the ground-truth segments as detection windows."""
    gs = np.asarray(gs, dtype=np.int64)
    ge = np.asarray(ge, dtype=np.int64)
    alarms = np.asarray(alarms, dtype=np.int64)
    if gs.size == 0:
        return float(-w_fp * alarms.size)
    width = (ge - gs + 1).astype(np.float64)
    # window index of the last window starting at or before each alarm
    k = np.searchsorted(gs, alarms, side="right") - 1
    inside = (k >= 0) & (alarms <= ge[np.maximum(k, 0)])
    raw = 0.0
    if inside.any():
        ki = k[inside]
        first = np.full(gs.size, -1, dtype=np.int64)
        # alarms are sorted, so the first occurrence per window is the earliest hit
        uniq, pos = np.unique(ki, return_index=True)
        first[uniq] = alarms[inside][pos]
        hit = first >= 0
        r = -(ge[hit] - first[hit] + 1) / width[hit]
        raw += float(np.sum(w_tp * _scaled_sigmoid(r)))
    out = alarms[~inside]
    if out.size:
        kp = np.searchsorted(ge, out, side="left") - 1
        has_prev = kp >= 0
        kp0 = np.maximum(kp, 0)
        denom = np.maximum(width[kp0], 2.0) - 1.0
        r = np.abs(out - ge[kp0]) / denom
        s = np.where(has_prev, _scaled_sigmoid(r), -1.0)
        raw += float(np.sum(w_fp * s))
    return raw


def rolling_median(x, w):
    """Median of the ``w`` values strictly preceding each index; the first ``w`` share x[:w]."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    out = np.empty(n)
    out[:w] = np.median(x[:w])
    if n > w:
        out[w:] = np.median(np.lib.stride_tricks.sliding_window_view(x[:-1], w), axis=1)
    return out


def nearest_distance_sum(a, b):
    """Sum over sorted ``a`` of the distance to the nearest element of sorted ``b``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0:
        return 0
    pos = np.searchsorted(b, a)
    left = b[np.maximum(pos - 1, 0)]
    right = b[np.minimum(pos, b.size - 1)]
    d = np.minimum(np.abs(a - left), np.abs(right - a))
    return int(d.sum())
