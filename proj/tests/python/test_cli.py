# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The epsnode Authors
# ------------------------------------------------------------------------

import csv
import json
import math
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("EPSNODE_CLI", "epsnode-cli")


def run(*args, env=None, check=None):
    full_env = {k: v for k, v in os.environ.items() if k != "EPSNODE_SEED"}
    full_env.update(env or {})
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env)
    if check is not None:
        assert proc.returncode == check, proc.stdout + proc.stderr
    return proc


def read_map(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {(int(r["i"]), int(r["j"])): float(r["value"]) for r in rows}


@pytest.fixture(scope="session")
def work(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    run("simulate", "--scenario", "nominal", "--passes", 5, "--samples", 10, "--seed", 42,
        "--out", root / "nominal.jsonl", check=0)
    run("simulate", "--scenario", "nominal", "--passes", 1, "--samples", 10, "--seed", 7,
        "--out", root / "heldout.jsonl", check=0)
    run("simulate", "--scenario", "B", "--passes", 1, "--samples", 10, "--seed", 9,
        "--out", root / "b.jsonl", check=0)
    return root


def test_unknown_scenario_lists_presets(tmp_path):
    proc = run("simulate", "--scenario", "D", "--out", tmp_path / "x.jsonl", check=2)
    assert "nominal, A, B, C" in proc.stderr


def test_bad_flags_are_usage_errors(tmp_path):
    run("simulate", "--passes", "many", "--out", tmp_path / "x.jsonl", check=2)
    run("frobnicate", check=2)
    run(check=2)


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    proc = run("simulate", "--scenario", "C", "--passes", 1, "--samples", 2, "--seed", 3, "--out", a, check=0)
    assert "80 measurements" in proc.stdout
    run("simulate", "--scenario", "C", "--passes", 1, "--samples", 2, "--seed", 3, "--out", b, check=0)
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads(Path(str(a) + ".meta.json").read_text())
    assert meta["command"] == "simulate" and meta["seed"] == 3 and "created" in meta


def test_seed_precedence(tmp_path):
    base = ("simulate", "--passes", 1, "--samples", 1)
    run(*base, "--seed", 5, "--out", tmp_path / "flag.jsonl", check=0)
    run(*base, "--out", tmp_path / "env.jsonl", env={"EPSNODE_SEED": "5"}, check=0)
    run(*base, "--seed", 5, "--out", tmp_path / "both.jsonl", env={"EPSNODE_SEED": "6"}, check=0)
    run(*base, "--out", tmp_path / "default.jsonl", check=0)
    flag = (tmp_path / "flag.jsonl").read_bytes()
    assert (tmp_path / "env.jsonl").read_bytes() == flag
    assert (tmp_path / "both.jsonl").read_bytes() == flag
    assert (tmp_path / "default.jsonl").read_bytes() != flag


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"scenario": "A", "passes": 1, "samples": 3, "seed": 11,
                               "out": str(tmp_path / "cfg.jsonl")}))
    proc = run("simulate", "--config", cfg, check=0)
    assert "120 measurements" in proc.stdout and "scenario A" in proc.stdout
    proc = run("simulate", "--config", cfg, "--samples", 1, check=0)
    assert "40 measurements" in proc.stdout

    cfg.write_text(json.dumps({"passes": 1, "colour": "red"}))
    proc = run("simulate", "--config", cfg, "--out", tmp_path / "x.jsonl", check=2)
    assert "colour" in proc.stderr
    run("simulate", "--config", tmp_path / "missing.json", check=2)


def test_train_and_score_self_consistency(work):
    out = work / "rng"
    proc = run("train", "--data", work / "nominal.jsonl", "--pipeline", "RNG", "--out-dir", out, check=0)
    assert "validation MSE" in proc.stdout
    report = json.loads((out / "train_report.json").read_text())
    rmse = math.sqrt(report["final_val_mse"])

    scores = work / "rng_heldout"
    run("score", "--model", out / "model.json", "--data", work / "heldout.jsonl", "--out-dir", scores, check=0)
    values = read_map(scores / "error_map.csv").values()
    assert sum(values) / len(values) <= 3 * rmse


def test_score_artifacts_are_reproducible(work):
    model = work / "rng" / "model.json"
    if not model.exists():
        run("train", "--data", work / "nominal.jsonl", "--out-dir", work / "rng", check=0)
    first, second = work / "s1", work / "s2"
    for d in (first, second):
        run("score", "--model", model, "--data", work / "b.jsonl", "--out-dir", d, check=0)
    names = ["error_map.csv", "error_map.pgm", "heatmap.txt"] + [f"anchor_{k}.csv" for k in range(4)]
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert (first / "error_map.csv").read_text().startswith("i,j,value,count\n")
    pgm = (first / "error_map.pgm").read_text().split()
    assert pgm[:4] == ["P2", str(8 * 16), str(5 * 16), "255"]
    assert "scale:" in (first / "heatmap.txt").read_text()


def test_mismatched_pipeline_is_a_usage_error(work):
    model = work / "rng" / "model.json"
    if not model.exists():
        run("train", "--data", work / "nominal.jsonl", "--out-dir", work / "rng", check=0)
    proc = run("score", "--model", model, "--data", work / "b.jsonl", "--pipeline", "MA",
               "--out-dir", work / "bad", check=2)
    assert "pipeline" in proc.stderr


def test_ma_model_on_preset_b_peaks_top_right(work):
    out = work / "ma"
    run("train", "--data", work / "nominal.jsonl", "--pipeline", "MA", "--out-dir", out, check=0)
    scores = work / "ma_b"
    run("score", "--model", out / "model.json", "--data", work / "b.jsonl", "--out-dir", scores, check=0)
    values = read_map(scores / "error_map.csv")
    corner = {c: v for c, v in values.items() if c[0] >= 4 and c[1] >= 2}
    rest = [v for c, v in values.items() if c not in corner]
    assert sum(corner.values()) / len(corner) > 1.25 * sum(rest) / len(rest)
    top5 = sorted(values, key=values.get)[-5:]
    assert sum(c in corner for c in top5) >= 2, top5

    report = work / "kl.json"
    proc = run("evaluate", "--error-map", scores / "error_map.csv", "--scenario", "B", "--pipeline", "MA",
               "--out", report, check=0)
    assert "nats" in proc.stdout
    entry = json.loads(report.read_text())["entries"][0]
    assert entry["scenario"] == "B" and entry["pipeline"] == "MA"
    assert entry["kl"] < entry["kl_uniform"]

    run("evaluate", "--error-map", scores / "error_map.csv", "--nx", 4, "--out", work / "kl2.json", check=2)
    run("evaluate", "--error-map", scores / "error_map.csv", "--scenario", "nominal",
        "--out", work / "kl3.json", check=2)


def test_divergent_training_exits_1(work, tmp_path):
    proc = run("train", "--data", work / "nominal.jsonl", "--learning-rate", "1e300", "--out-dir", tmp_path, check=1)
    assert "diverged" in proc.stderr


def test_constraint_violation_exits_2(work, tmp_path):
    proc = run("train", "--data", work / "nominal.jsonl", "--e1", 4, "--out-dir", tmp_path, check=2)
    assert "N < N_E1" in proc.stderr


def test_gridsearch_report(work, tmp_path):
    args = ("gridsearch", "--data", work / "nominal.jsonl", "--max-epochs", 2, "--patience", 2)
    run(*args, "--jobs", 1, "--out-dir", tmp_path / "j1", check=0)
    proc = run(*args, "--jobs", 4, "--out-dir", tmp_path / "j4",
               "--novelty-data", work / "b.jsonl", check=0)
    assert "48 trials (6 excluded" in proc.stdout
    sweep = json.loads((tmp_path / "j1" / "sweep.json").read_text())
    assert len(sweep["trials"]) == 48 and len(sweep["excluded"]) == 6
    assert [t["rank"] for t in sweep["trials"]] == list(range(1, 49))
    parallel = json.loads((tmp_path / "j4" / "sweep.json").read_text())
    assert [t["index"] for t in parallel["trials"]] == [t["index"] for t in sweep["trials"]]
    assert all("novelty_separation" in t for t in parallel["trials"])
    assert (tmp_path / "j1" / "sweep.csv").read_text().startswith("rank,index,")
