"""Stable string identifiers for every metric, with kind, orientation and range."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from typing import Callable

import numpy as np

from ..errors import DataShapeError, InvalidParameter, UnknownMetric
from . import affiliation, curve, event, nab, pate, point


@dataclass(frozen=True)
class MetricConfig:
    """Parameters for every registered metric, one record for the whole suite."""
    beta: float = 1.0
    point: point.PointMetricParams = field(default_factory=point.PointMetricParams)
    range_flat: event.RangeFParams = field(default_factory=event.RangeFParams)
    range_front: event.RangeFParams = field(
        default_factory=lambda: event.RangeFParams(positional_bias="front"))
    tf_d: int = 5
    taf: event.TaFParams = field(default_factory=event.TaFParams)
    etaf: event.ETaFParams = field(default_factory=event.ETaFParams)
    lsf: event.LsfParams = field(default_factory=event.LsfParams)
    nab: nab.NabParams = field(default_factory=nab.NabParams)
    pate: pate.PateParams = field(default_factory=pate.PateParams)
    vus: curve.VusParams = field(default_factory=curve.VusParams)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricConfig":
        """Build from a nested mapping; unknown keys are rejected."""
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        base = cls()
        for key, val in d.items():
            if key not in known:
                raise InvalidParameter(f"unknown metric parameter {key!r}")
            cur = getattr(base, key)
            if is_dataclass(cur):
                if not isinstance(val, dict):
                    raise InvalidParameter(f"{key} must be a mapping")
                bad = set(val) - {f.name for f in fields(cur)}
                if bad:
                    raise InvalidParameter(f"unknown keys for {key}: {sorted(bad)}")
                kwargs[key] = replace(cur, **val)
            else:
                kwargs[key] = type(cur)(val)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, dict):
                d[k] = {kk: list(vv) if isinstance(vv, tuple) else vv for kk, vv in v.items()}
        return d


class EvalCache:
    """Per-run memo for work shared between score metrics (sort order, VUS areas)."""

    def __init__(self, score):
        self.score = score
        self._order = None
        self._vus = None

    @property
    def order(self):
        if self._order is None:
            self._order = curve.descending_order(self.score)
        return self._order

    def vus(self, y, cfg):
        if self._vus is None:
            self._vus = curve.vus_both(y, self.score, cfg.vus, self.order)
        return self._vus


@dataclass(frozen=True)
class MetricSpec:
    id: str
    name: str
    kind: str  # "binary" (needs predictions) or "score" (needs scores)
    higher_is_better: bool
    value_range: tuple
    func: Callable = field(repr=False, compare=False)


def _b(fn):
    return lambda y, yhat, s, cfg, cache: fn(y, yhat, cfg)


def _s(fn):
    return lambda y, yhat, s, cfg, cache: fn(y, s, cfg, cache)


_SPECS = [
    MetricSpec("pwf", "PwF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: point.pw_f(y, p, c.beta))),
    MetricSpec("paf", "PAF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: point.pa_f(y, p, c.beta))),
    MetricSpec("sf", "SF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.segment_f(y, p, c.beta))),
    MetricSpec("cf", "CF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.composite_f(y, p, c.beta))),
    MetricSpec("kpaf", "K%-PAF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: point.k_pa_f(y, p, c.point.k_coverage, c.beta))),
    MetricSpec("dtpaf", "dT-PAF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: point.dt_pa_f(y, p, c.point.k_delay, c.beta))),
    MetricSpec("rf.flat", "RF(flat)", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.range_f(y, p, c.range_flat, c.beta))),
    MetricSpec("rf.front", "RF(front)", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.range_f(y, p, c.range_front, c.beta))),
    MetricSpec("tf", "TF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.time_tolerant_f(y, p, c.tf_d, c.beta))),
    MetricSpec("td", "TD", "binary", False, (0.0, np.inf),
               _b(lambda y, p, c: event.temporal_distance(y, p))),
    MetricSpec("af", "AF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: affiliation.affiliation_f(y, p, c.beta))),
    MetricSpec("taf", "TaF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.taf(y, p, c.taf, c.beta))),
    MetricSpec("etaf", "eTaF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.etaf(y, p, c.etaf, c.beta))),
    MetricSpec("lsf", "LSF", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: event.lsf(y, p, c.lsf.w, c.lsf.literal))),
    MetricSpec("nab", "NAB", "binary", True, (-np.inf, 100.0),
               _b(lambda y, p, c: nab.nab_score(y, p, c.nab))),
    MetricSpec("pate", "PATE", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: pate.pate(y, s, c.pate, k.order))),
    MetricSpec("pate_f1", "PATE-F1", "binary", True, (0.0, 1.0),
               _b(lambda y, p, c: pate.pate_f1(y, p, c.pate))),
    MetricSpec("p_at_k", "P@K", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: event.p_at_k(y, s))),
    MetricSpec("best_pwf", "Best-PwF", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: curve.best_pwf(y, s, c.beta, k.order))),
    MetricSpec("auc_roc", "AUC-ROC", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: curve.auc_roc(y, s, k.order))),
    MetricSpec("auc_pr", "AUC-PR", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: curve.auc_pr(y, s, k.order))),
    MetricSpec("vus_roc", "VUS-ROC", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: k.vus(y, c)[0])),
    MetricSpec("vus_pr", "VUS-PR", "score", True, (0.0, 1.0),
               _s(lambda y, s, c, k: k.vus(y, c)[1])),
]

REGISTRY: dict[str, MetricSpec] = {m.id: m for m in _SPECS}
METRIC_IDS: tuple = tuple(m.id for m in _SPECS)


def get(metric_id: str) -> MetricSpec:
    try:
        return REGISTRY[metric_id]
    except KeyError:
        raise UnknownMetric(f"unknown metric {metric_id!r}; known: {', '.join(METRIC_IDS)}") from None


def resolve(metric_ids) -> list[str]:
    """Validate a list of ids (``None`` or ``"all"`` selects every metric)."""
    if metric_ids is None or metric_ids == "all" or list(metric_ids) == ["all"]:
        return list(METRIC_IDS)
    out = []
    for m in metric_ids:
        get(m)
        if m not in out:
            out.append(m)
    return out


def evaluate(y, yhat=None, score=None, metric_ids=None, config: MetricConfig | None = None) -> dict:
    """Evaluate metrics on one run.

    Binary metrics need ``yhat`` and score metrics need ``score``; asking for
    a metric whose input is missing raises :class:`DataShapeError`.
    """
    cfg = config or MetricConfig()
    ids = resolve(metric_ids)
    y = np.asarray(y)
    cache = EvalCache(np.asarray(score, dtype=np.float64)) if score is not None else None
    out = {}
    for mid in ids:
        spec = REGISTRY[mid]
        if spec.kind == "binary" and yhat is None:
            raise DataShapeError(f"metric {mid} needs binary predictions (or a threshold)")
        if spec.kind == "score" and score is None:
            raise DataShapeError(f"metric {mid} needs a score series")
        out[mid] = float(spec.func(y, yhat, score, cfg, cache))
    return out
