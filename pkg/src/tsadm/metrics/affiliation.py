"""Affiliation precision/recall with exact integration over zone survival functions.

Each timestep ``t`` occupies the continuous cell ``[t, t + 1)``, so a segment
``[s, e]`` becomes ``[s, e + 1)``. Every gt segment ``J`` owns the zone ``E``
bounded by the midpoints of the gaps to its neighbours (and by 0 and ``T`` at
the ends). Predictions are cut at zone borders.

Precision credit for a predicted point ``x`` is the share of ``E`` lying at
least as far from ``J`` as ``x``. Recall credit for a gt point ``y`` is the
share of ``E`` lying at least as far from the zone's predictions as ``y``.
Both integrands are piecewise linear, so the integrals below are closed form.
"""
from __future__ import annotations

import numpy as np

from ..errors import NoGroundTruthSegments
from ..labels import as_labels, check_pair, fbeta, runs


def zones(gs, ge, T):
    """Continuous zone bounds ``(A, B)`` for gt segments given as inclusive indices."""
    mids = (ge[:-1] + 1 + gs[1:]) / 2.0
    A = np.concatenate(([0.0], mids))
    B = np.concatenate((mids, [float(T)]))
    return A, B


def _cut_predictions(ps, pe, A, B):
    """Split continuous predictions ``[ps, pe)`` at zone borders.

    Returns ``(zone_id, lo, hi)`` sorted by position.
    """
    inner = A[1:]
    z0 = np.searchsorted(inner, ps, side="right")
    z1 = np.searchsorted(inner, pe, side="left")
    counts = z1 - z0 + 1
    pid = np.repeat(np.arange(ps.size), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    zid = z0[pid] + offs
    lo = np.maximum(ps[pid], A[zid])
    hi = np.minimum(pe[pid], B[zid])
    keep = hi > lo
    return zid[keep], lo[keep], hi[keep]


def _sq_pos(v):
    v = np.maximum(v, 0.0)
    return v * v


def _precision_mass(zid, lo, hi, A, B, s, e):
    """Integral of the precision survival over each piece, times the zone width."""
    a, b = A[zid], B[zid]
    js, je = s[zid], e[zid]
    total = np.zeros(zid.size)

    # left of J: distance d = js - x; integrand (x - a) + max(0, x - (js + je - b))
    u, v = lo, np.minimum(hi, js)
    m = v > u
    c = js + je - b
    total += np.where(m, (v * v - u * u) / 2 - a * (v - u) + (_sq_pos(v - c) - _sq_pos(u - c)) / 2, 0.0)

    # inside J: full credit
    u, v = np.maximum(lo, js), np.minimum(hi, je)
    total += np.where(v > u, (v - u) * (b - a), 0.0)

    # right of J: distance d = x - je; integrand (b - x) + max(0, (js + je - a) - x)
    u, v = np.maximum(lo, je), hi
    m = v > u
    c = js + je - a
    total += np.where(m, b * (v - u) - (v * v - u * u) / 2 + (_sq_pos(c - u) - _sq_pos(c - v)) / 2, 0.0)
    return total


class _SurvivalIntegral:
    """``I(D) = integral_0^D G(d) dd`` for ``G(d) = sum_m (c_m - k_m d)_+``.

    ``G(d)`` is the measure of the zone lying at distance at least ``d`` from
    the predictions: one ramp per outer margin (slope 1) and one per gap
    between pieces (slope 2, both sides shrink).
    """

    def __init__(self, c, k):
        b = c / k
        order = np.argsort(b)
        self.b = b[order]
        c, k = c[order], k[order]
        self.full = np.concatenate(([0.0], np.cumsum(c * c / (2 * k))))
        # suffix sums of c and k over ramps still active at D
        self.c_tail = np.concatenate((np.cumsum(c[::-1])[::-1], [0.0]))
        self.k_tail = np.concatenate((np.cumsum(k[::-1])[::-1], [0.0]))

    def __call__(self, D):
        D = np.maximum(D, 0.0)
        i = np.searchsorted(self.b, D, side="right")
        return self.full[i] + D * self.c_tail[i] - 0.5 * D * D * self.k_tail[i]


def _recall_mass(zid, lo, hi, A, B, s, e):
    """Integral of the recall survival over each gt segment, times the zone width.

    Every piece owns the part of its zone closer to it than to the other
    pieces; there the distance to the nearest prediction falls to 0 across
    the piece and rises after it, so each part integrates through ``I(D)``.
    Returns one value per zone that holds pieces, keyed by zone id.
    """
    out = {}
    bounds = np.flatnonzero(np.diff(zid)) + 1
    for idx in np.split(np.arange(zid.size), bounds):
        z = int(zid[idx[0]])
        a, b = A[z], B[z]
        plo, phi = lo[idx], hi[idx]
        gaps = plo[1:] - phi[:-1]
        c = np.concatenate(([plo[0] - a, b - phi[-1]], gaps))
        k = np.concatenate(([1.0, 1.0], np.full(gaps.size, 2.0)))
        keep = c > 0
        integral = _SurvivalIntegral(c[keep], k[keep]) if keep.any() else (lambda D: np.zeros_like(D))
        cl = np.concatenate(([a], (phi[:-1] + plo[1:]) / 2))
        cr = np.concatenate(((phi[:-1] + plo[1:]) / 2, [b]))
        js, je = s[z], e[z]
        total = 0.0
        # falling part [cl, lo): d = lo - y
        u, v = np.maximum(cl, js), np.minimum(plo, je)
        m = v > u
        total += float(np.sum(integral(plo[m] - u[m]) - integral(plo[m] - v[m])))
        # inside the piece: every zone point is at least as far
        u, v = np.maximum(plo, js), np.minimum(phi, je)
        total += float(np.sum(np.maximum(v - u, 0.0))) * (b - a)
        # rising part [hi, cr): d = y - hi
        u, v = np.maximum(phi, js), np.minimum(cr, je)
        m = v > u
        total += float(np.sum(integral(v[m] - phi[m]) - integral(u[m] - phi[m])))
        out[z] = total
    return out


def affiliation_pr(y, yhat) -> tuple[float, float]:
    """Affiliation precision and recall (both point-weighted)."""
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    gs, ge = runs(y)
    if gs.size == 0:
        raise NoGroundTruthSegments("affiliation needs at least one anomalous segment")
    ps, pe = runs(yhat)
    if ps.size == 0:
        return 0.0, 0.0
    T = y.size
    A, B = zones(gs, ge, T)
    s = gs.astype(np.float64)
    e = ge + 1.0
    zid, lo, hi = _cut_predictions(ps.astype(np.float64), pe + 1.0, A, B)
    width = (B - A)[zid]
    p = float(np.sum(_precision_mass(zid, lo, hi, A, B, s, e) / width)) / float(np.sum(pe - ps + 1))
    rec = _recall_mass(zid, lo, hi, A, B, s, e)
    r = float(sum(v / (B[z] - A[z]) for z, v in rec.items())) / float(np.sum(ge - gs + 1))
    return p, r


def affiliation_f(y, yhat, beta: float = 1.0) -> float:
    p, r = affiliation_pr(y, yhat)
    return fbeta(p, r, beta)
