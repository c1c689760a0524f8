"""Label views, thresholding, interval algebra and confusion counting.

Labels travel as 1-D numpy arrays of 0/1. Segments are inclusive integer
intervals ``[start, end]`` on timestep indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataShapeError, LengthMismatch, SegmentOutOfRange


class Segment(NamedTuple):
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class ConfusionCounts:
    tp: float
    fp: float
    fn: float
    tn: float

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d > 0 else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d > 0 else 0.0

    @property
    def total(self) -> float:
        return self.tp + self.fp + self.fn + self.tn


def as_labels(values, name: str = "labels") -> np.ndarray:
    """Validate a 0/1 series and return it as an int8 array."""
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise DataShapeError(f"{name} must be a non-empty 1-D sequence")
    if arr.dtype == bool:
        return arr.astype(np.int8)
    if not np.all((arr == 0) | (arr == 1)):
        raise DataShapeError(f"{name} must contain only 0 and 1")
    return arr.astype(np.int8)


def as_scores(values, name: str = "scores") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DataShapeError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise DataShapeError(f"{name} must be finite")
    return arr


def check_pair(y, yhat, names=("y", "yhat")):
    if len(y) != len(yhat):
        raise LengthMismatch(f"{names[0]} has length {len(y)} but {names[1]} has length {len(yhat)}")


def runs(labels) -> tuple[np.ndarray, np.ndarray]:
    """Start and inclusive end indices of the maximal runs of ones."""
    y = np.asarray(labels).astype(bool)
    padded = np.concatenate(([False], y, [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return edges[0::2].astype(np.int64), (edges[1::2] - 1).astype(np.int64)


def segments_from_labels(labels) -> list[Segment]:
    """Maximal runs of consecutive ones as a sorted list of segments.

    >>> segments_from_labels([0, 1, 1, 1, 0, 0, 0, 1, 0, 0])
    [Segment(start=1, end=3), Segment(start=7, end=7)]
    """
    starts, ends = runs(as_labels(labels))
    return [Segment(int(s), int(e)) for s, e in zip(starts, ends)]


def canonical_segments(segments: Iterable[Sequence[int]]) -> list[Segment]:
    """Sort segments and merge any that overlap or touch."""
    segs = sorted((int(s), int(e)) for s, e in segments)
    merged: list[list[int]] = []
    for s, e in segs:
        if e < s:
            raise DataShapeError(f"segment [{s}, {e}] has end before start")
        if merged and s <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [Segment(s, e) for s, e in merged]


def labels_from_segments(segments: Iterable[Sequence[int]], length: int) -> np.ndarray:
    if length < 1:
        raise DataShapeError("series length must be at least 1")
    y = np.zeros(length, dtype=np.int8)
    for s, e in segments:
        if s < 0 or e >= length or e < s:
            raise SegmentOutOfRange(f"segment [{s}, {e}] outside [0, {length})")
        y[s:e + 1] = 1
    return y


RATIO_TOL = 1e-12


def reaches(value, bound):
    """``value >= bound`` up to float round-off in sums of weights (relative 1e-12)."""
    return np.asarray(value) >= np.asarray(bound) - RATIO_TOL * np.maximum(1.0, np.abs(bound))


def threshold(scores, tau: float) -> np.ndarray:
    """Binary predictions ``1[s_t > tau]``; ties at ``tau`` are negatives."""
    return (as_scores(scores) > tau).astype(np.int8)


def overlap(a: Sequence[int], b: Sequence[int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def pointwise_confusion(y, yhat) -> ConfusionCounts:
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    tp = int(np.sum(y & yhat))
    fp = int(np.sum((1 - y) & yhat))
    fn = int(np.sum(y & (1 - yhat)))
    return ConfusionCounts(tp, fp, fn, y.size - tp - fp - fn)


def fbeta(p: float, r: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean of precision and recall; 0 when both vanish."""
    b2 = beta * beta
    denom = b2 * p + r
    if denom <= 0 or not np.isfinite(denom):
        return 0.0
    return (1 + b2) * p * r / denom


def fbeta_counts(tp: float, fp: float, fn: float, beta: float = 1.0) -> float:
    """F-beta written directly on counts, ``(1+b2)TP / ((1+b2)TP + b2 FN + FP)``."""
    b2 = beta * beta
    denom = (1 + b2) * tp + b2 * fn + fp
    return (1 + b2) * tp / denom if denom > 0 else 0.0
