"""CSV series formats, versioned JSON configs and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LengthMismatch, ParseError

SCHEMA_VERSION = 1


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_columns(path, columns: dict) -> None:
    """Write equal-length columns plus a leading ``t`` index (UTF-8, LF)."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise LengthMismatch("columns differ in length")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *names])
        for t in range(n):
            w.writerow([t, *(_fmt(c[t]) for c in cols)])


def read_columns(path, required=()) -> dict:
    """Read a CSV with a ``t`` column running 0..T-1; returns column name to float array."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror or exc})") from None
    except UnicodeDecodeError:
        raise ParseError(f"{path}: not UTF-8 text") from None
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t":
        raise ParseError(f"{path}: first column must be 't'")
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"{path}: missing column(s) {', '.join(missing)}")
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(x) for x in r] for r in body], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: non-numeric value ({exc})") from None
    if data.size == 0:
        raise ParseError(f"{path}: no data rows")
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ParseError(f"{path}: ragged rows")
    if not np.array_equal(data[:, 0], np.arange(data.shape[0])):
        raise ParseError(f"{path}: 't' must run 0..T-1 without gaps")
    return {h: data[:, i] for i, h in enumerate(header) if h != "t"}


def _binary(col, path, name):
    if not np.all((col == 0) | (col == 1)):
        raise ParseError(f"{path}: column '{name}' must hold 0/1 values")
    return col.astype(np.int8)


def read_data(path):
    """``t,value,label`` file; returns ``(value, label)``."""
    c = read_columns(path, ("value", "label"))
    return c["value"], _binary(c["label"], path, "label")


def read_labels(path):
    """Labels from any CSV carrying a ``label`` column."""
    c = read_columns(path, ("label",))
    return _binary(c["label"], path, "label")


def read_scores(path):
    return read_columns(path, ("score",))["score"]


def read_predictions(path):
    return _binary(read_columns(path, ("pred",))["pred"], path, "pred")


def read_scores_or_predictions(path):
    """Returns ``(scores, predictions)`` with the absent one set to None."""
    c = read_columns(path)
    if "pred" in c:
        return c.get("score"), _binary(c["pred"], path, "pred")
    if "score" in c:
        return c["score"], None
    raise ParseError(f"{path}: needs a 'score' or 'pred' column")


def load_json(path) -> dict:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror or exc})") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return obj


def check_schema(obj: dict, allowed, path="config") -> dict:
    """Strip and verify ``schema_version``; unknown keys are an error."""
    version = obj.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"{path}: unsupported schema_version {version!r}")
    body = {k: v for k, v in obj.items() if k != "schema_version"}
    unknown = sorted(set(body) - set(allowed))
    if unknown:
        raise ParseError(f"{path}: unknown key(s) {', '.join(unknown)}")
    return body


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": "), allow_nan=True) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def digest_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def digest_obj(obj) -> str:
    return digest_bytes(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode())


def file_digest(path) -> str:
    with open(path, "rb") as fh:
        return digest_bytes(fh.read())


def tree_digests(root) -> dict:
    """Relative path to sha256 for every file under ``root``."""
    root = Path(root)
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            p = Path(dirpath) / f
            out[p.relative_to(root).as_posix()] = file_digest(p)
    return dict(sorted(out.items()))


@dataclass
class RunManifest:
    kind: str
    config: dict
    metrics: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    version: str = __version__
    config_digest: str = ""

    def __post_init__(self):
        if not self.config_digest:
            self.config_digest = digest_obj({"kind": self.kind, "config": self.config,
                                             "metrics": self.metrics, "version": self.version})

    def to_dict(self) -> dict:
        return asdict(self)
