"""Benchmark grid: datasets x strategies x metrics, then aggregation into a report."""
from __future__ import annotations

import csv
import json
import logging
import multiprocessing as mp
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import analysis, io, strategies, synth
from .errors import ParseError, TsadmError
from .metrics import registry
from .metrics.event import td_worst_case

logger = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class BenchConfig:
    lengths: tuple = (5000, 10000)
    contaminations: tuple = (0.05, 0.10, 0.15, 0.20)
    repetitions: int = 10
    outer_repeats: int = 5
    random_runs: int = 20
    alphas: tuple = DEFAULT_ALPHAS
    genuine_alphas: tuple = (0.8, 0.9)
    detectors: tuple = strategies.DETECTORS
    random_strategies: tuple = strategies.RANDOM_STRATEGIES
    metrics: tuple = ("all",)
    seed: int = 0
    mix: dict | None = None
    metric_params: dict = field(default_factory=dict)
    oracle_metrics: tuple = ()
    oracle_iterations: int = 2000
    oracle_restarts: int = 5
    oracle_budget: float = 0.1

    def __post_init__(self):
        for name in ("lengths", "contaminations", "alphas", "genuine_alphas", "detectors",
                     "random_strategies", "metrics", "oracle_metrics"):
            v = getattr(self, name)
            object.__setattr__(self, name, (v,) if isinstance(v, str) else tuple(v))
        if not self.lengths or not self.contaminations:
            raise ParseError("lengths and contaminations must be non-empty")
        if self.repetitions < 1 or self.outer_repeats < 1 or self.random_runs < 2:
            raise ParseError("repetitions and outer_repeats must be >= 1, random_runs >= 2")
        if not set(self.genuine_alphas) <= set(self.alphas):
            raise ParseError("genuine_alphas must be a subset of alphas")
        if any(d not in strategies.DETECTORS for d in self.detectors):
            raise ParseError(f"detectors must come from {strategies.DETECTORS}")
        if any(r not in strategies.RANDOM_STRATEGIES for r in self.random_strategies):
            raise ParseError(f"random_strategies must come from {strategies.RANDOM_STRATEGIES}")
        if not self.random_strategies:
            raise ParseError("at least one random strategy is required")
        registry.resolve(self.metrics)
        if self.oracle_metrics:
            registry.resolve(self.oracle_metrics)
        registry.MetricConfig.from_dict(self.metric_params)

    @classmethod
    def from_dict(cls, d: dict, path="config") -> "BenchConfig":
        body = io.check_schema(d, {f.name for f in fields(cls)}, path)
        try:
            return cls(**body)
        except TypeError as exc:
            raise ParseError(f"{path}: {exc}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        out["schema_version"] = io.SCHEMA_VERSION
        return out

    @property
    def metric_ids(self) -> list:
        return registry.resolve(self.metrics)


def work_items(cfg: BenchConfig) -> list[tuple]:
    return [(int(L), float(c), o, r) for L in cfg.lengths for c in cfg.contaminations
            for o in range(cfg.outer_repeats) for r in range(cfg.repetitions)]


def _evaluate(y, run, ids, mcfg, failures, where):
    """All metrics on one run; a raising metric yields None and a failure record."""
    cache = registry.EvalCache(np.asarray(run.scores, dtype=np.float64))
    out = {}
    for mid in ids:
        spec = registry.REGISTRY[mid]
        try:
            raw = float(spec.func(y, run.predictions, run.scores, mcfg, cache))
            ctx = {"td_max": td_worst_case(y, run.predictions)} if mid == "td" else None
            v = analysis.normalize_for_report(mid, raw, ctx)
            out[mid] = v if np.isfinite(v) else None
        except TsadmError as exc:
            failures.append({**where, "metric": mid, "error": f"{type(exc).__name__}: {exc}"})
            out[mid] = None
    return out


def run_item(item, cfg: BenchConfig) -> dict:
    """Every strategy on one dataset; metric values are report-normalized."""
    L, c, outer, rep = item
    ids = cfg.metric_ids
    mcfg = registry.MetricConfig.from_dict(cfg.metric_params)
    key = {"length": L, "contamination": c, "outer": outer, "rep": rep}
    res = {"key": key, "ok": False, "failures": [], "values": {}}
    base = (int(cfg.seed), L, round(c, 12), outer, rep)
    try:
        data = synth.generate(synth.SynthConfig(L, c, synth.stable_seed("data", *base),
                                                dict(cfg.mix or synth.DEFAULT_MIX)))
    except TsadmError as exc:
        res["failures"].append({**key, "stage": "synth", "error": f"{type(exc).__name__}: {exc}"})
        return res
    y = data.labels
    vals = {m: {"genuine": [], "random": {s: [] for s in cfg.random_strategies},
                "alpha": {}, "oracle": []} for m in ids}
    fails = res["failures"]

    def add(run, where, put):
        for m, v in _evaluate(y, run, ids, mcfg, fails, {**key, **where}).items():
            if v is not None:
                put(vals[m], v)

    for det in cfg.detectors:
        try:
            run = strategies.genuine_run(data.signal, y, det)
        except TsadmError as exc:
            fails.append({**key, "stage": det, "error": f"{type(exc).__name__}: {exc}"})
            continue
        add(run, {"stage": det}, lambda d, v: d["genuine"].append(v))
    for a in cfg.alphas:
        run = strategies.quality_gradient(y, a, synth.stable_seed("gradient", *base))
        genuine = a in cfg.genuine_alphas

        def put(d, v, a=a, genuine=genuine):
            d["alpha"].setdefault(f"{a:g}", []).append(v)
            if genuine:
                d["genuine"].append(v)
        add(run, {"stage": f"alpha={a:g}"}, put)
    for name in cfg.random_strategies:
        fn = strategies.RANDOM_FUNCS[name]
        for k in range(cfg.random_runs):
            run = fn(y, synth.stable_seed(name, k, *base))
            add(run, {"stage": name}, lambda d, v, name=name: d["random"][name].append(v))
    for m in cfg.oracle_metrics:
        if m not in vals:
            continue
        run = strategies.oracle_attack(y, m, cfg.oracle_budget, cfg.oracle_iterations,
                                       cfg.oracle_restarts, synth.stable_seed("oracle", m, *base), mcfg)
        v = _evaluate(y, run, [m], mcfg, fails, {**key, "stage": "oracle"})[m]
        if v is not None:
            vals[m]["oracle"].append(v)
    res["values"] = vals
    res["ok"] = True
    return res


def _worker(args):
    return run_item(*args)


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_grid(cfg: BenchConfig, jobs: int | None = None) -> list[dict]:
    """Results in work-item order, independent of the worker count."""
    items = work_items(cfg)
    jobs = max(1, min(jobs or default_jobs(), len(items)))
    args = [(it, cfg) for it in items]
    logger.info("bench: %d datasets on %d worker(s)", len(items), jobs)
    if jobs == 1:
        out = []
        for i, a in enumerate(args):
            out.append(_worker(a))
            logger.debug("bench: %d/%d", i + 1, len(args))
        return out
    with mp.get_context("fork").Pool(jobs) as pool:
        return list(pool.imap(_worker, args, chunksize=1))


def collect(cfg: BenchConfig, results: list[dict]) -> dict:
    """Group per-dataset results into aggregation units (length, contamination, outer repeat)."""
    ids = cfg.metric_ids
    units: dict = {}
    failures = []
    for res in results:
        failures.extend(res["failures"])
        if not res["ok"]:
            continue
        k = res["key"]
        ukey = (k["length"], k["contamination"], k["outer"])
        u = units.setdefault(ukey, {"datasets": 0, "samples": {m: analysis.MetricSamples() for m in ids}})
        u["datasets"] += 1
        for m in ids:
            v = res["values"][m]
            s = u["samples"][m]
            s.genuine.extend(v["genuine"])
            for name, xs in v["random"].items():
                s.random.extend(xs)
                s.random_by_strategy.setdefault(name, []).extend(xs)
            for a, xs in v["alpha"].items():
                s.by_alpha.setdefault(float(a), []).extend(xs)
            s.oracle.extend(v["oracle"])
    manifest = io.RunManifest("bench", cfg.to_dict(), ids, {"seed": int(cfg.seed)})
    return {
        "schema_version": io.SCHEMA_VERSION,
        "manifest": manifest.to_dict(),
        "metrics": ids,
        "units": [{"length": L, "contamination": c, "outer": o, "datasets": u["datasets"],
                   "samples": {m: s.to_dict() for m, s in u["samples"].items()}}
                  for (L, c, o), u in sorted(units.items())],
        "failures": failures,
    }


# --- report ----------------------------------------------------------------

HIST_BINS = 20


def _usable(s: analysis.MetricSamples) -> bool:
    return len(s.genuine) >= 2 and len(s.random) >= 2


def parse_raw(raw: dict, path="raw_samples") -> tuple[list, dict]:
    """Validate a raw-samples document; returns ``(metric_ids, {metric: [MetricSamples]})``."""
    try:
        ids = list(raw["metrics"])
        per_metric = {m: [] for m in ids}
        for u in raw["units"]:
            for m in ids:
                per_metric[m].append(analysis.MetricSamples.from_dict(u["samples"][m]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"{path}: malformed raw samples ({type(exc).__name__}: {exc})") from None
    for m in ids:
        registry.get(m)
    return ids, per_metric


def build(raw: dict, metric_ids=None, path="raw_samples") -> dict:
    """Report rows, skip records and plot tables from raw samples."""
    ids, per_metric = parse_raw(raw, path)
    if metric_ids is not None:
        wanted = registry.resolve(metric_ids)
        missing = [m for m in wanted if m not in ids]
        if missing:
            raise registry.UnknownMetric(f"not in raw samples: {', '.join(missing)}")
        ids = wanted
    skipped, usable = [], {}
    for m in ids:
        units = [s for s in per_metric[m] if _usable(s)]
        if units:
            usable[m] = units
        else:
            skipped.append({"metric_id": m, "reason": "no aggregation unit with >= 2 genuine and random values"})
    rows = analysis.build_report(usable, list(usable)) if usable else []
    return {"rows": rows, "skipped": skipped, "per_metric": {m: per_metric[m] for m in ids}}


def _groups(units) -> dict:
    g: dict = {"genuine": [], "random": []}
    for s in units:
        g["genuine"] += s.genuine
        g["random"] += s.random
        for name, xs in sorted(s.random_by_strategy.items()):
            g.setdefault(name, []).extend(xs)
        for a, xs in sorted(s.by_alpha.items()):
            g.setdefault(f"alpha={a:g}", []).extend(xs)
        if s.oracle:
            g.setdefault("oracle", []).extend(s.oracle)
    return g


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([io._fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])


def write_report(out_dir, raw: dict, metric_ids=None, path="raw_samples") -> list:
    """Write metric_report.csv/json and plot tables; returns the report rows."""
    out = Path(out_dir)
    (out / "plots").mkdir(parents=True, exist_ok=True)
    rep = build(raw, metric_ids, path)
    rows = rep["rows"]
    records = analysis.report_records(rows)
    _write_csv(out / "metric_report.csv", analysis.REPORT_COLUMNS,
               [[r[c] for c in analysis.REPORT_COLUMNS] for r in records])
    io.write_json(out / "metric_report.json", {
        "schema_version": io.SCHEMA_VERSION,
        "config_digest": raw.get("manifest", {}).get("config_digest", ""),
        "rows": records,
        "skipped": rep["skipped"],
        "random_by_strategy": {m: _per_strategy(units) for m, units in rep["per_metric"].items()},
        "failures": len(raw.get("failures", [])),
    })
    edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
    hist, heat = [], []
    for m in sorted(rep["per_metric"]):
        for g, xs in _groups(rep["per_metric"][m]).items():
            if not xs:
                continue
            x = np.asarray(xs, dtype=np.float64)
            counts, _ = np.histogram(np.clip(x, 0.0, 1.0), edges)
            hist += [[m, g, float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(HIST_BINS)]
            heat.append([m, g, float(x.mean()), float(x.std()), int(x.size)])
    _write_csv(out / "plots" / "score_distributions.csv", ["metric_id", "group", "bin_lo", "bin_hi", "count"], hist)
    _write_csv(out / "plots" / "heatmap.csv", ["metric_id", "group", "mean", "std", "n"], heat)
    _write_csv(out / "plots" / "effect_auc.csv", ["metric_id", "avg_effect_size", "avg_auc", "monotonicity"],
               [[r.metric_id, r.avg_effect_size, r.avg_auc, r.monotonicity] for r in rows])
    return rows


def _per_strategy(units) -> dict:
    """Indicators against each random group separately (the report pools them)."""
    out = {}
    names = sorted({n for s in units for n in s.random_by_strategy})
    for n in names:
        sub = [analysis.MetricSamples(s.genuine, s.random_by_strategy.get(n, []), s.by_alpha)
               for s in units if len(s.random_by_strategy.get(n, [])) >= 2 and len(s.genuine) >= 2]
        if sub:
            out[n] = _row_dict(sub)
    return out


def _row_dict(units) -> dict:
    ind = [analysis.unit_indicators(s) for s in units]
    d = np.array([i["effect_size"] for i in ind])
    fin = d[np.isfinite(d)]
    return {"avg_effect_size": float(fin.mean()) if fin.size else float("nan"),
            "avg_auc": float(np.mean([i["auc"] for i in ind])),
            "avg_random": float(np.mean([i["random"] for i in ind]))}


def run_bench(cfg: BenchConfig, out_dir, jobs: int | None = None) -> list:
    """Full pipeline: grid, raw samples, report, manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw = collect(cfg, run_grid(cfg, jobs))
    if raw["failures"]:
        logger.warning("bench: %d failure record(s); see raw_samples.json", len(raw["failures"]))
    text = io.dumps(raw)
    (out / "raw_samples.json").write_text(text, encoding="utf-8")
    io.write_json(out / "manifest.json", raw["manifest"])
    return write_report(out, json.loads(text))
