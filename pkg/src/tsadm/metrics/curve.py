"""Threshold-free metrics over raw score series."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .. import kernels
from ..errors import InvalidParameter, NoPositives, SingleClass
from ..labels import as_labels, as_scores, check_pair


class CurvePoint(NamedTuple):
    threshold: float
    tpr_or_recall: float
    fpr_or_precision: float


@dataclass(frozen=True)
class VusParams:
    w_max: int = 10

    def __post_init__(self):
        if self.w_max < 0:
            raise InvalidParameter("w_max must be >= 0")


def _prep(y, score):
    y = as_labels(y, "y")
    s = as_scores(score, "score")
    check_pair(y, s, ("y", "score"))
    return y, s


def descending_order(score) -> np.ndarray:
    """Stable argsort by decreasing score; shared by every curve metric."""
    return np.argsort(-np.asarray(score, dtype=np.float64), kind="stable")


def _areas(s, pos_w, neg_w, order):
    if order is None:
        order = descending_order(s)
    return kernels.weighted_curve_areas(s[order], pos_w[order], neg_w[order])


def auc_roc(y, score, order=None) -> float:
    """Trapezoidal ROC area over distinct-score thresholds (ties count one half)."""
    y, s = _prep(y, score)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise SingleClass("ROC area needs both classes")
    yf = y.astype(np.float64)
    return _areas(s, yf, 1.0 - yf, order)[0]


def auc_pr(y, score, order=None) -> float:
    """Step-interpolated area under the precision-recall curve."""
    y, s = _prep(y, score)
    if not y.any():
        raise NoPositives("PR area needs at least one positive")
    yf = y.astype(np.float64)
    return _areas(s, yf, 1.0 - yf, order)[1]


def roc_curve(y, score) -> list[CurvePoint]:
    """ROC points from (0, 0) to (1, 1) over descending thresholds."""
    y, s = _prep(y, score)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC curve needs both classes")
    order = descending_order(s)
    ss = s[order]
    idx = np.append(np.flatnonzero(np.diff(ss) != 0), ss.size - 1)
    tp = np.cumsum(y[order])[idx]
    fp = (idx + 1) - tp
    pts = [CurvePoint(float("inf"), 0.0, 0.0)]
    pts += [CurvePoint(float(ss[i]), t / n_pos, f / n_neg) for i, t, f in zip(idx, tp, fp)]
    return pts


def best_pwf(y, score, beta: float = 1.0, order=None) -> float:
    """Best point-wise F-beta over thresholds ``s >= theta`` for every distinct score."""
    y, s = _prep(y, score)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise NoPositives("best_pwf needs at least one positive")
    if order is None:
        order = descending_order(s)
    ss = s[order]
    idx = np.append(np.flatnonzero(np.diff(ss) != 0), ss.size - 1)
    tp = np.cumsum(y[order], dtype=np.float64)[idx]
    n_pred = idx + 1.0
    b2 = beta * beta
    f = (1 + b2) * tp / (n_pred + b2 * n_pos)
    return float(f.max())


def soft_labels(y, w: int) -> np.ndarray:
    """Triangular tolerance labels ``max_i y_i (1 - |i - t| / w)`` within ``|i - t| <= w``."""
    if w < 0:
        raise InvalidParameter("w must be >= 0")
    y = as_labels(y, "y")
    return kernels.soft_labels(y.astype(np.float64), int(w))


def vus_curves(y, score, params: VusParams = VusParams(), order=None):
    """Per-window ``(roc, pr)`` areas for ``w = 0..w_max`` on soft labels.

    A point carries its soft label as positive mass; only points whose soft
    label is exactly 0 count as negatives. Windows wide enough to leave no
    negatives are dropped, so the result may have fewer than ``w_max + 1`` rows.
    """
    y, s = _prep(y, score)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise SingleClass("VUS needs both classes")
    if order is None:
        order = descending_order(s)
    ss = s[order]
    yf = y.astype(np.float64)
    rows = []
    for w in range(params.w_max + 1):
        soft = kernels.soft_labels(yf, w)[order]
        neg = (soft == 0.0).astype(np.float64)
        if not neg.any():
            break
        rows.append(kernels.weighted_curve_areas(ss, soft, neg))
    return np.array(rows, dtype=np.float64)


def _unit_trapezoid_mean(v):
    if v.size == 1:
        return float(v[0])
    return float((v.sum() - 0.5 * (v[0] + v[-1])) / (v.size - 1))


def vus(y, score, params: VusParams = VusParams(), kind: str = "roc", order=None) -> float:
    """Soft-label AUC averaged over integer tolerance windows with the trapezoid rule."""
    if kind not in ("roc", "pr"):
        raise InvalidParameter(f"kind must be 'roc' or 'pr', got {kind!r}")
    areas = vus_curves(y, score, params, order)
    return _unit_trapezoid_mean(areas[:, 0 if kind == "roc" else 1])


def vus_both(y, score, params: VusParams = VusParams(), order=None) -> tuple[float, float]:
    areas = vus_curves(y, score, params, order)
    return _unit_trapezoid_mean(areas[:, 0]), _unit_trapezoid_mean(areas[:, 1])
