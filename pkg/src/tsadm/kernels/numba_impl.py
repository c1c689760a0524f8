"""numba-compiled versions of the hot kernels (loop form)."""
import math

import numba as nb
import numpy as np

_jit = nb.njit(cache=True, nogil=True)


@_jit
def _interval_overlaps(gs, ge, ps, pe):
    ng = gs.size
    npred = ps.size
    count = 0
    j0 = 0
    for i in range(ng):
        while j0 < npred and pe[j0] < gs[i]:
            j0 += 1
        j = j0
        while j < npred and ps[j] <= ge[i]:
            count += 1
            j += 1
    gi = np.empty(count, np.int64)
    pj = np.empty(count, np.int64)
    length = np.empty(count, np.int64)
    k = 0
    j0 = 0
    for i in range(ng):
        while j0 < npred and pe[j0] < gs[i]:
            j0 += 1
        j = j0
        while j < npred and ps[j] <= ge[i]:
            gi[k] = i
            pj[k] = j
            length[k] = min(ge[i], pe[j]) - max(gs[i], ps[j]) + 1
            k += 1
            j += 1
    return gi, pj, length


def interval_overlaps(gs, ge, ps, pe):
    return _interval_overlaps(
        np.ascontiguousarray(gs, dtype=np.int64),
        np.ascontiguousarray(ge, dtype=np.int64),
        np.ascontiguousarray(ps, dtype=np.int64),
        np.ascontiguousarray(pe, dtype=np.int64),
    )


@_jit
def _soft_labels(y, w):
    n = y.size
    out = y.copy()
    if w <= 0:
        return out
    for i in range(n):
        if y[i] <= 0.0:
            continue
        lo = max(0, i - w + 1)
        hi = min(n - 1, i + w - 1)
        for t in range(lo, hi + 1):
            v = y[i] * (1.0 - abs(i - t) / w)
            if v > out[t]:
                out[t] = v
    return out


def soft_labels(y, w):
    return _soft_labels(np.ascontiguousarray(y, dtype=np.float64), int(w))


@_jit
def _weighted_curve_areas(s, pos_w, neg_w):
    n = s.size
    p_tot = 0.0
    n_tot = 0.0
    for i in range(n):
        p_tot += pos_w[i]
        n_tot += neg_w[i]
    tp = 0.0
    fp = 0.0
    prev_tpr = 0.0
    prev_fpr = 0.0
    prev_rec = 0.0
    roc = 0.0
    pr = 0.0
    for i in range(n):
        tp += pos_w[i]
        fp += neg_w[i]
        if i + 1 < n and s[i + 1] == s[i]:
            continue
        if p_tot > 0.0 and n_tot > 0.0:
            tpr = tp / p_tot
            fpr = fp / n_tot
            roc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5
            prev_tpr = tpr
            prev_fpr = fpr
        if p_tot > 0.0:
            rec = tp / p_tot
            denom = tp + fp
            prec = tp / denom if denom > 0.0 else 1.0
            pr += (rec - prev_rec) * prec
            prev_rec = rec
    if not (p_tot > 0.0 and n_tot > 0.0):
        roc = np.nan
    if not p_tot > 0.0:
        pr = np.nan
    return roc, pr


def weighted_curve_areas(sorted_scores, pos_w, neg_w):
    roc, pr = _weighted_curve_areas(
        np.ascontiguousarray(sorted_scores, dtype=np.float64),
        np.ascontiguousarray(pos_w, dtype=np.float64),
        np.ascontiguousarray(neg_w, dtype=np.float64),
    )
    return float(roc), float(pr)


@_jit
def _lsf_counts(y, yhat, w, literal):
    n = y.size
    run_start = np.full(n, -1, np.int64)
    cur = -1
    for t in range(n):
        if y[t]:
            if t == 0 or not y[t - 1]:
                cur = t
            run_start[t] = cur
    tp = 0
    fp = 0
    fn = 0
    ds_prev = False
    for lo in range(0, n, w):
        hi = min(lo + w, n)
        s = -1
        for t in range(lo, hi):
            if y[t]:
                s = t
                break
        if s < 0:
            for t in range(lo, hi):
                if yhat[t]:
                    fp += 1
                    break
            ds_prev = False
            continue
        cont = ds_prev and lo > 0 and y[lo - 1] and y[lo]
        ds = False
        for t in range(lo, hi):
            if y[t] and yhat[t]:
                if cont:
                    ds = True
                elif literal:
                    if t == s:
                        ds = True
                elif run_start[t] >= lo:
                    ds = True
                if ds:
                    break
        any_tp = False
        any_fp = False
        any_fn = False
        for t in range(lo, hi):
            ys = t >= s
            ps = yhat[t] or (ds and ys)
            if ys and ps:
                any_tp = True
            elif ps and not ys:
                any_fp = True
            elif ys and not ps:
                any_fn = True
        tp += any_tp
        fp += any_fp
        fn += any_fn
        ds_prev = ds
    return tp, fp, fn


def lsf_counts(y, yhat, w, literal):
    tp, fp, fn = _lsf_counts(
        np.ascontiguousarray(y, dtype=np.bool_),
        np.ascontiguousarray(yhat, dtype=np.bool_),
        int(w),
        bool(literal),
    )
    return int(tp), int(fp), int(fn)


@_jit
def _scaled_sigmoid(r):
    if r > 3.0:
        return -1.0
    return 2.0 / (1.0 + math.exp(5.0 * r)) - 1.0


@_jit
def _nab_raw(gs, ge, alarms, w_tp, w_fp):
    ng = gs.size
    raw = 0.0
    k = -1  # index of the last window whose start is <= current alarm
    seen = np.zeros(ng, np.bool_)
    for a in alarms:
        while k + 1 < ng and gs[k + 1] <= a:
            k += 1
        if k >= 0 and a <= ge[k]:
            if not seen[k]:
                seen[k] = True
                width = ge[k] - gs[k] + 1
                raw += w_tp * _scaled_sigmoid(-(ge[k] - a + 1) / width)
        elif k < 0:
            raw += w_fp * -1.0
        else:
            width = ge[k] - gs[k] + 1
            denom = max(width, 2) - 1.0
            raw += w_fp * _scaled_sigmoid(abs(a - ge[k]) / denom)
    return raw


def nab_raw(gs, ge, alarms, w_tp, w_fp):
    return float(_nab_raw(
        np.ascontiguousarray(gs, dtype=np.int64),
        np.ascontiguousarray(ge, dtype=np.int64),
        np.ascontiguousarray(alarms, dtype=np.int64),
        float(w_tp),
        float(w_fp),
    ))


@_jit
def _sorted_median(buf, w):
    h = w // 2
    if w % 2:
        return buf[h]
    return (buf[h - 1] + buf[h]) / 2.0


@_jit
def _rolling_median(x, w):
    n = x.size
    out = np.empty(n)
    m = min(w, n)
    buf = np.sort(x[:m])
    head = _sorted_median(buf, m)
    for t in range(m):
        out[t] = head
    # sorted copy of the trailing window, updated by one removal and one insertion
    for t in range(w, n):
        out[t] = _sorted_median(buf, w)
        old = x[t - w]
        new = x[t]
        i = np.searchsorted(buf, old)
        j = np.searchsorted(buf, new)
        if j > i:
            j -= 1
            buf[i:j] = buf[i + 1:j + 1].copy()
        else:
            buf[j + 1:i + 1] = buf[j:i].copy()
        buf[j] = new
    return out


def rolling_median(x, w):
    return _rolling_median(np.ascontiguousarray(x, dtype=np.float64), int(w))


@_jit
def _nearest_distance_sum(a, b):
    total = 0
    j = 0
    nb_ = b.size
    for v in a:
        while j + 1 < nb_ and b[j + 1] <= v:
            j += 1
        d = abs(v - b[j])
        if j + 1 < nb_:
            d = min(d, abs(b[j + 1] - v))
        total += d
    return total


def nearest_distance_sum(a, b):
    a = np.ascontiguousarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    return int(_nearest_distance_sum(a, np.ascontiguousarray(b, dtype=np.int64)))
