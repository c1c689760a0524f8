"""Separability indicators and report aggregation."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateVariance, InvalidParameter, MissingMetric, TooFewLevels
from .metrics import registry


@dataclass
class MetricSamples:
    """Metric values for one metric within one aggregation unit."""
    genuine: list = field(default_factory=list)
    random: list = field(default_factory=list)
    by_alpha: dict = field(default_factory=dict)
    oracle: list = field(default_factory=list)
    random_by_strategy: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["by_alpha"] = {f"{float(k):g}": list(v) for k, v in sorted(self.by_alpha.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricSamples":
        return cls(
            genuine=list(d.get("genuine", [])),
            random=list(d.get("random", [])),
            by_alpha={float(k): list(v) for k, v in d.get("by_alpha", {}).items()},
            oracle=list(d.get("oracle", [])),
            random_by_strategy={k: list(v) for k, v in d.get("random_by_strategy", {}).items()},
        )


@dataclass(frozen=True)
class MetricReportRow:
    metric_id: str
    avg_effect_size: float
    avg_auc: float
    avg_genuine: float
    avg_random: float
    monotonicity: float
    n_units: int = 0
    n_infinite_effect: int = 0

    @property
    def name(self) -> str:
        return registry.get(self.metric_id).name


def cohens_d(genuine, random, on_degenerate: str = "raise") -> float:
    """Standardized mean difference with the pooled (n - 1) standard deviation.

    When the pooled deviation is zero but the means differ, raises
    :class:`DegenerateVariance` or, with ``on_degenerate="inf"``, returns a
    signed infinity.
    """
    g = np.asarray(genuine, dtype=np.float64)
    r = np.asarray(random, dtype=np.float64)
    if g.size < 2 or r.size < 2:
        raise InvalidParameter("each group needs at least two values")
    ng, nr = g.size, r.size
    pooled = math.sqrt(((ng - 1) * g.var(ddof=1) + (nr - 1) * r.var(ddof=1)) / (ng + nr - 2))
    diff = g.mean() - r.mean()
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        if on_degenerate == "inf":
            return math.copysign(math.inf, diff)
        raise DegenerateVariance("pooled standard deviation is zero")
    return float(diff / pooled)


def separability_auc(genuine, random) -> float:
    """P(genuine > random) + P(tie) / 2 over all pairs."""
    g = np.asarray(genuine, dtype=np.float64)
    r = np.asarray(random, dtype=np.float64)
    if g.size == 0 or r.size == 0:
        raise InvalidParameter("both groups must be non-empty")
    ranks = stats.rankdata(np.concatenate((g, r)))
    u = ranks[:g.size].sum() - g.size * (g.size + 1) / 2.0
    return float(u / (g.size * r.size))


def monotonicity_rho(by_alpha: dict) -> float:
    """Spearman correlation between quality levels and their mean metric values.

    A constant sequence of means carries no ordering and scores 0.
    """
    if len(by_alpha) < 3:
        raise TooFewLevels("monotonicity needs at least three quality levels")
    alphas = np.array(sorted(by_alpha), dtype=np.float64)
    means = np.array([np.mean(by_alpha[a]) for a in sorted(by_alpha)], dtype=np.float64)
    if np.all(means == means[0]):
        return 0.0
    return float(stats.spearmanr(alphas, means).statistic)


def td_max(length: int, n_gt: int, n_pred: int) -> float:
    """Worst-case temporal distance: every point pays the full length."""
    return float(length) * (n_gt + n_pred)


def normalize_for_report(metric_id: str, raw: float, context: dict | None = None) -> float:
    """Map a raw value onto a higher-is-better [0, 1] scale where needed.

    NAB is divided by 100 and clamped; TD becomes ``1 - TD / TD_max``, with
    ``context`` holding either ``td_max`` or ``length``, ``n_gt`` and ``n_pred``.
    Everything else passes through.
    """
    registry.get(metric_id)
    if metric_id == "nab":
        return float(np.clip(raw / 100.0, 0.0, 1.0))
    if metric_id == "td":
        ctx = context or {}
        if "td_max" in ctx:
            worst = float(ctx["td_max"])
        else:
            try:
                worst = td_max(ctx["length"], ctx["n_gt"], ctx["n_pred"])
            except KeyError:
                raise InvalidParameter("TD normalization needs td_max or length/n_gt/n_pred") from None
        if worst <= 0:
            return 1.0
        return float(np.clip(1.0 - raw / worst, 0.0, 1.0))
    return float(raw)


def unit_indicators(s: MetricSamples) -> dict:
    """Effect size, AUC, group means and monotonicity for one unit."""
    out = {
        "effect_size": cohens_d(s.genuine, s.random, on_degenerate="inf"),
        "auc": separability_auc(s.genuine, s.random),
        "genuine": float(np.mean(s.genuine)),
        "random": float(np.mean(s.random)),
        "monotonicity": monotonicity_rho(s.by_alpha) if len(s.by_alpha) >= 3 else float("nan"),
    }
    return out


def _finite_mean(v):
    v = np.asarray(v, dtype=np.float64)
    v = v[np.isfinite(v)]
    return float(v.mean()) if v.size else float("nan")


def summarize(metric_id: str, units) -> MetricReportRow:
    """Unweighted mean of the indicators over units; infinite effect sizes are counted, not averaged."""
    if isinstance(units, MetricSamples):
        units = [units]
    ind = [unit_indicators(u) for u in units]
    d = np.array([i["effect_size"] for i in ind])
    return MetricReportRow(
        metric_id=metric_id,
        avg_effect_size=_finite_mean(d),
        avg_auc=_finite_mean([i["auc"] for i in ind]),
        avg_genuine=_finite_mean([i["genuine"] for i in ind]),
        avg_random=_finite_mean([i["random"] for i in ind]),
        monotonicity=_finite_mean([i["monotonicity"] for i in ind]),
        n_units=len(ind),
        n_infinite_effect=int(np.isinf(d).sum()),
    )


def build_report(all_samples: dict, metric_ids=None) -> list[MetricReportRow]:
    """One row per metric, sorted by average effect size (descending), then id.

    ``all_samples`` maps a metric id to a :class:`MetricSamples` or a list of
    them (one per aggregation unit). Every metric in ``metric_ids`` (default:
    all registered) must be present.
    """
    ids = registry.resolve(metric_ids)
    missing = [m for m in ids if m not in all_samples]
    if missing:
        raise MissingMetric(f"no samples for: {', '.join(missing)}")
    rows = [summarize(m, all_samples[m]) for m in ids]
    return sorted(rows, key=lambda r: (-_sort_key(r.avg_effect_size), r.metric_id))


def _sort_key(v):
    return -math.inf if math.isnan(v) else v


REPORT_COLUMNS = ("metric_id", "name", "avg_effect_size", "avg_auc", "avg_genuine",
                  "avg_random", "monotonicity", "n_units", "n_infinite_effect")


def report_records(rows) -> list[dict]:
    return [{**asdict(r), "name": r.name} for r in rows]
