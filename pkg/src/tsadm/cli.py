"""Command-line entry point: ``tsadm {evaluate,synth,bench,report}``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bench, io, synth
from .errors import DataShapeError, ParseError, TsadmError
from .labels import check_pair, threshold
from .metrics import registry

logger = logging.getLogger("tsadm")


def _metric_list(text):
    if text is None:
        return None
    ids = [m.strip() for m in text.split(",") if m.strip()]
    return registry.resolve(ids)


def _metric_config(path):
    if path is None:
        return registry.MetricConfig()
    body = io.check_schema(io.load_json(path), {f.name for f in dataclasses.fields(registry.MetricConfig)},
                           str(path))
    return registry.MetricConfig.from_dict(body)


def format_table(values: dict) -> str:
    w = max(len(registry.get(m).name) for m in values)
    lines = [f"{'metric':<{w}}  value"]
    for m, v in values.items():
        lines.append(f"{registry.get(m).name:<{w}}  {v:.6g}")
    return "\n".join(lines)


def cmd_evaluate(args) -> int:
    y = io.read_labels(args.labels)
    scores, preds = io.read_scores_or_predictions(args.predictions)
    check_pair(y, scores if preds is None else preds, ("labels", "predictions"))
    cfg = _metric_config(args.config)
    if preds is None and args.threshold is not None:
        preds = threshold(scores, args.threshold)
    if scores is None:
        scores = preds.astype(np.float64)
    requested = _metric_list(args.metrics)
    ids = requested or list(registry.METRIC_IDS)
    skipped = []
    if preds is None:
        binary = [m for m in ids if registry.get(m).kind == "binary"]
        if requested and binary:
            raise DataShapeError(f"{', '.join(binary)} need a predictions file or --threshold")
        skipped = binary
        ids = [m for m in ids if m not in binary]
    values = registry.evaluate(y, preds, scores, ids, cfg)
    doc = {"metrics": values, "skipped": skipped, "length": int(y.size)}
    if args.out:
        io.write_json(args.out, doc)
    print(json.dumps(values, indent=1))
    print(format_table(values))
    if skipped:
        print(f"skipped (no predictions or --threshold): {', '.join(skipped)}", file=sys.stderr)
    return 0


def _synth_config(args):
    if args.config:
        body = io.check_schema(io.load_json(args.config), {"length", "contamination", "seed", "mix"},
                               str(args.config))
        cfg = synth.SynthConfig(**body)
    else:
        cfg = synth.SynthConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def cmd_synth(args) -> int:
    cfg = _synth_config(args)
    data = synth.generate(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_columns(out / "data.csv", {"value": data.signal, "label": data.labels})
    io.write_columns(out / "labels.csv", {"label": data.labels})
    io.write_json(out / "events.json", {"events": [
        {"start": int(e.segment.start), "end": int(e.segment.end), "family": e.family,
         "params": {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in e.params.items()}}
        for e in data.events]})
    manifest = io.RunManifest("synth", {**cfg.to_dict(), "schema_version": io.SCHEMA_VERSION},
                              seeds={"seed": int(cfg.seed)})
    doc = manifest.to_dict()
    doc["files"] = {n: io.file_digest(out / n) for n in ("data.csv", "labels.csv", "events.json")}
    io.write_json(out / "manifest.json", doc)
    print(f"wrote {out} ({cfg.length} points, {int(data.labels.sum())} anomalous, {len(data.events)} events)")
    return 0


def cmd_bench(args) -> int:
    raw = io.load_json(args.config) if args.config else {}
    cfg = bench.BenchConfig.from_dict(raw, str(args.config or "defaults"))
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.metrics:
        cfg = dataclasses.replace(cfg, metrics=tuple(_metric_list(args.metrics)))
    t0 = time.perf_counter()
    rows = bench.run_bench(cfg, args.out, args.jobs)
    logger.info("bench finished in %.1f s", time.perf_counter() - t0)
    _print_rows(rows)
    return 0


def cmd_report(args) -> int:
    raw = io.load_json(args.raw_samples)
    out = args.out or str(Path(args.raw_samples).parent)
    rows = bench.write_report(out, raw, _metric_list(args.metrics), str(args.raw_samples))
    _print_rows(rows)
    return 0


def _print_rows(rows):
    print(f"{'metric':<10} {'effect':>9} {'auc':>6} {'genuine':>8} {'random':>8} {'mono':>7}")
    for r in rows:
        print(f"{r.name:<10} {r.avg_effect_size:9.3f} {r.avg_auc:6.3f} {r.avg_genuine:8.3f} "
              f"{r.avg_random:8.3f} {r.monotonicity:7.3f}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsadm", description="Anomaly-detection metric evaluation and benchmark.")
    p.add_argument("--version", action="version", version=f"tsadm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evaluate", help="score one prediction file against labels")
    e.add_argument("labels", help="CSV with a 'label' column (t,value,label or t,label)")
    e.add_argument("predictions", help="CSV with 't,score' or 't,pred'")
    e.add_argument("--metrics", help="comma-separated metric ids (default: all)")
    e.add_argument("--threshold", type=float, help="alarm when score > threshold")
    e.add_argument("--config", help="JSON metric parameters")
    e.add_argument("--out", help="also write the values as JSON here")
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("synth", help="generate one synthetic dataset")
    s.add_argument("--config", help="JSON with length, contamination, seed, mix")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("bench", help="run the benchmark grid and write the report")
    b.add_argument("--config", help="JSON bench configuration (default: desk scale)")
    b.add_argument("--out", required=True)
    b.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    b.add_argument("--seed", type=int)
    b.add_argument("--metrics", help="comma-separated metric ids (default: all)")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="rebuild the report from raw_samples.json")
    r.add_argument("raw_samples")
    r.add_argument("--out", help="output directory (default: next to the input)")
    r.add_argument("--metrics", help="comma-separated metric ids")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("TSADM_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TsadmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
