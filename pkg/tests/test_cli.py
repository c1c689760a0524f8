import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from tsadm import io
from tsadm.cli import main
from tsadm.metrics import registry

from conftest import P10, Y10

ROOT = Path(__file__).resolve().parents[1]
SMALL = ROOT / "configs" / "small.json"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fixture_files(tmp_path):
    io.write_columns(tmp_path / "labels.csv", {"label": Y10})
    io.write_columns(tmp_path / "pred.csv", {"pred": P10})
    io.write_columns(tmp_path / "perfect.csv", {"pred": Y10})
    io.write_columns(tmp_path / "scores.csv", {"score": np.linspace(0, 1, 10)})
    return tmp_path


def test_evaluate_ten_point_fixture(capsys, fixture_files):
    d = fixture_files
    code, out, _ = run(capsys, "evaluate", d / "labels.csv", d / "pred.csv",
                       "--metrics", "pwf,paf,sf,cf,td", "--out", d / "v.json")
    assert code == 0
    v = json.loads((d / "v.json").read_text())["metrics"]
    assert v == {"pwf": 0.4, "paf": 6 / 7, "sf": 2 / 3, "cf": 2 / 3, "td": 7.0}
    assert "PwF" in out and "0.857143" in out


def test_evaluate_perfect_predictions(capsys, fixture_files):
    d = fixture_files
    code, _, _ = run(capsys, "evaluate", d / "labels.csv", d / "perfect.csv", "--out", d / "v.json")
    assert code == 0
    v = json.loads((d / "v.json").read_text())["metrics"]
    for m in ("pwf", "paf", "sf", "cf", "kpaf", "dtpaf", "rf.flat", "rf.front", "tf", "af",
              "taf", "etaf", "lsf", "pate_f1", "best_pwf"):
        assert v[m] == pytest.approx(1.0, abs=1e-12), m
    assert v["td"] == 0.0 and v["nab"] == pytest.approx(100.0)


def test_evaluate_scores_with_and_without_threshold(capsys, fixture_files):
    d = fixture_files
    code, _, err = run(capsys, "evaluate", d / "labels.csv", d / "scores.csv", "--out", d / "a.json")
    assert code == 0 and "skipped" in err
    doc = json.loads((d / "a.json").read_text())
    assert "pwf" in doc["skipped"] and "auc_roc" in doc["metrics"]
    code, _, _ = run(capsys, "evaluate", d / "labels.csv", d / "scores.csv", "--threshold", "0.5",
                     "--metrics", "pwf", "--out", d / "b.json")
    assert code == 0 and "pwf" in json.loads((d / "b.json").read_text())["metrics"]
    code, _, _ = run(capsys, "evaluate", d / "labels.csv", d / "scores.csv", "--metrics", "pwf")
    assert code == 3


@pytest.mark.parametrize("case, code", [("missing", 2), ("short", 3), ("metric", 5)])
def test_evaluate_exit_codes(capsys, fixture_files, case, code):
    d = fixture_files
    io.write_columns(d / "short.csv", {"pred": [0, 1]})
    args = {"missing": ("evaluate", d / "labels.csv", d / "nope.csv"),
            "short": ("evaluate", d / "labels.csv", d / "short.csv"),
            "metric": ("evaluate", d / "labels.csv", d / "pred.csv", "--metrics", "f9")}[case]
    got, _, err = run(capsys, *args)
    assert got == code
    if case == "missing":
        assert "nope.csv" in err


def test_synth_files_and_determinism(capsys, tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"schema_version": 1, "length": 5000, "contamination": 0.1, "seed": 5}))
    assert run(capsys, "synth", "--config", cfg, "--out", tmp_path / "a")[0] == 0
    assert run(capsys, "synth", "--config", cfg, "--out", tmp_path / "b")[0] == 0
    assert io.tree_digests(tmp_path / "a") == io.tree_digests(tmp_path / "b")
    value, label = io.read_data(tmp_path / "a" / "data.csv")
    assert label.size == 5000 and 0.09 <= label.mean() <= 0.11
    assert io.read_labels(tmp_path / "a" / "labels.csv").size == 5000
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["files"]["data.csv"] == io.file_digest(tmp_path / "a" / "data.csv")


def test_synth_default_config(capsys, tmp_path):
    assert run(capsys, "synth", "--out", tmp_path)[0] == 0
    assert io.read_labels(tmp_path / "labels.csv").size == 5000


def test_synth_errors(capsys, tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"length": 800, "contamination": 0.1}))
    assert run(capsys, "synth", "--config", cfg, "--out", tmp_path / "o")[0] == 4
    cfg.write_text(json.dumps({"length": 800, "colour": "red"}))
    assert run(capsys, "synth", "--config", cfg, "--out", tmp_path / "o")[0] == 2


@pytest.fixture(scope="module")
def small_bench(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    assert main(["bench", "--config", str(SMALL), "--out", str(out), "--jobs", "1"]) == 0
    return out


def test_bench_outputs(small_bench):
    rows = list((small_bench / "metric_report.csv").read_text().splitlines())
    assert rows[0].startswith("metric_id,name,avg_effect_size,avg_auc")
    assert sorted(r.split(",")[0] for r in rows[1:]) == sorted(registry.METRIC_IDS)
    for f in ("raw_samples.json", "manifest.json", "metric_report.json", "plots/heatmap.csv",
              "plots/score_distributions.csv", "plots/effect_auc.csv"):
        assert (small_bench / f).is_file(), f
    effects = [float(r.split(",")[2]) for r in rows[1:]]
    assert effects == sorted(effects, reverse=True)


def test_report_rebuild_byte_identical(capsys, small_bench, tmp_path):
    code, _, _ = run(capsys, "report", small_bench / "raw_samples.json", "--out", tmp_path)
    assert code == 0
    for f in ("metric_report.csv", "metric_report.json", "plots/heatmap.csv"):
        assert (tmp_path / f).read_bytes() == (small_bench / f).read_bytes(), f


def test_report_single_metric(capsys, small_bench, tmp_path):
    code, out, _ = run(capsys, "report", small_bench / "raw_samples.json", "--out", tmp_path,
                       "--metrics", "nab")
    assert code == 0
    assert len((tmp_path / "metric_report.csv").read_text().splitlines()) == 2


def test_report_corrupt_json(capsys, tmp_path):
    bad = tmp_path / "raw.json"
    bad.write_text("{\"units\": [")
    assert run(capsys, "report", bad)[0] == 2


def test_bench_rerun_identical(small_bench, tmp_path):
    assert main(["bench", "--config", str(SMALL), "--out", str(tmp_path), "--jobs", "2"]) == 0
    assert io.tree_digests(tmp_path) == io.tree_digests(small_bench)


def test_bench_unknown_metric_and_bad_config(capsys, tmp_path):
    assert run(capsys, "bench", "--config", SMALL, "--out", tmp_path, "--metrics", "zz")[0] == 5
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps({"lengths": [2000], "turbo": True}))
    assert run(capsys, "bench", "--config", cfg, "--out", tmp_path)[0] == 2


def test_console_script_and_log_env(tmp_path):
    exe = shutil.which("tsadm")
    argv = [exe] if exe else [sys.executable, "-m", "tsadm.cli"]
    r = subprocess.run([*argv, "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("tsadm ")
    r = subprocess.run([*argv, "synth", "--out", str(tmp_path)], capture_output=True, text=True,
                       env={"TSADM_LOG": "DEBUG", "PATH": "/usr/bin:/usr/local/bin"})
    assert r.returncode == 0 and "DEBUG" in r.stderr
