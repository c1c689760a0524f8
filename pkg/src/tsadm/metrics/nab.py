"""NAB-style scoring with the ground-truth segments as detection windows."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import InvalidParameter, NoGroundTruthSegments
from ..labels import as_labels, check_pair, runs


@dataclass(frozen=True)
class NabParams:
    w_tp: float = 1.0
    w_fp: float = 0.11
    window_mode: str = "segment_length"

    def __post_init__(self):
        if self.w_tp < 0 or self.w_fp < 0:
            raise InvalidParameter("NAB weights must be >= 0")
        if self.window_mode != "segment_length":
            raise InvalidParameter(f"unsupported window mode {self.window_mode!r}")


def scaled_sigmoid(r: float) -> float:
    """``2 * sigmoid(-5 r) - 1``, saturating to -1 beyond ``r = 3``."""
    if r > 3.0:
        return -1.0
    return 2.0 / (1.0 + math.exp(5.0 * r)) - 1.0


def _raw_and_windows(y, yhat, params):
    y = as_labels(y, "y")
    yhat = as_labels(yhat, "yhat")
    check_pair(y, yhat)
    gs, ge = runs(y)
    if gs.size == 0:
        raise NoGroundTruthSegments("NAB needs at least one anomalous segment")
    raw = kernels.nab_raw(gs, ge, np.flatnonzero(yhat), params.w_tp, params.w_fp)
    return raw, gs.size


def nab_raw(y, yhat, params: NabParams = NabParams()) -> float:
    """Unnormalised score: earliest-hit reward per window plus false-alarm penalties.

    False alarms with no preceding window take the saturated penalty.
    """
    return _raw_and_windows(y, yhat, params)[0]


def nab_score(y, yhat, params: NabParams = NabParams()) -> float:
    """Normalised NAB score: 0 for an empty detector, 100 for earliest hits and no false alarms."""
    raw, n_windows = _raw_and_windows(y, yhat, params)
    perfect = n_windows * params.w_tp * scaled_sigmoid(-1.0)
    null = 0.0
    if perfect == null:
        return 0.0
    return 100.0 * (raw - null) / (perfect - null)
