"""End-to-end command-line workflow: generate, measure, certify, sweep.

Every subcommand reads a JSON config, writes a deterministic JSON report
(identical bytes across reruns except the "timing" key), and exits 0 on
success, 1 when a requested bound clause fails, 2 on configuration errors.
"""

import json
import os
import subprocess
import sys
import tempfile

POPULATION = {
    "pi_s": 0.5,
    "p_y_given_s": [[0.7, 0.3], [0.3, 0.7]],
    "cells": {
        "0,0": {"mean": [0.0, 0.0], "cov": [[0.25, 0.0], [0.0, 0.25]]},
        "0,1": {"mean": [1.5, 0.0], "cov": [[0.25, 0.0], [0.0, 0.25]]},
        "1,0": {"mean": [0.6, 0.8], "cov": [[0.25, 0.0], [0.0, 0.25]]},
        "1,1": {"mean": [2.0, 0.5], "cov": [[0.25, 0.0], [0.0, 0.25]]},
    },
}


def run(cfg, *args):
    """Write the config, run one subcommand, return the parsed report."""
    path = os.path.join(tmp, f"{args[0]}.json")
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    cmd = [sys.executable, "-m", "fairmmd", *args, "--config", path]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(f"$ fairmmd {' '.join(args)} --config {os.path.basename(path)}"
          f"   -> exit {proc.returncode}")
    if proc.returncode == 2:
        print(proc.stderr.strip())
        raise SystemExit(1)
    report_path = os.path.join(tmp, "reports", f"{args[0]}.json")
    with open(report_path) as fh:
        return json.load(fh)


with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "reports")

    # 1. generate a dataset CSV from a population spec
    rep = run({"seed": 5, "n": 2000, "population": POPULATION, "out": out},
              "generate")
    csv_path = rep["result"]["path"]
    print(f"   wrote {os.path.basename(csv_path)}, "
          f"sha256 {rep['result']['csv_sha256'][:12]}…")

    # 2. fairness metrics of a logistic head over that CSV
    rep = run({"seed": 5, "dataset": csv_path, "out": out,
               "kernel": {"family": "rbf", "sigma": "median"},
               "metrics": {"classifier": {"kind": "logistic_head",
                                          "weights": [2.0, -0.5],
                                          "bias": -1.5}}},
              "metrics")
    m = rep["result"]["metrics"]
    print(f"   dp = {m['dp']:.4f}, dodds = {m['dodds']:.4f}, "
          f"balanced_accuracy_y = {m['balanced_accuracy_y']:.4f}")

    # 3. the kernel statistic itself, both estimation routes
    rep = run({"seed": 5, "dataset": csv_path, "out": out,
               "kernel": {"family": "rbf", "sigma": 1.0},
               "eok": {"method": "both"}},
              "eok")
    r = rep["result"]
    print(f"   plugin eok2 = {r['plugin']['eok2']:.5f}, "
          f"bootstrap eok2 = {r['bootstrap']['eok2']:.5f}")

    # 4. bound certificates (exit 1 would mean a clause failed)
    rep = run({"seed": 5, "dataset": csv_path, "out": out,
               "kernel": {"family": "rbf", "sigma": 1.0},
               "bounds": {"checks": ["biased_lower_bound", "ba_bounds",
                                     "calibration_chain"]}},
              "bounds")
    for clause in rep["result"]["clauses"]:
        print(f"   {clause['name']:24s} holds={clause['holds']}")

    # 5. a small penalty sweep; the frontier lands in sweep.csv
    rep = run({"seed": 5, "population": POPULATION, "n": 500, "out": out,
               "kernel": {"family": "rbf", "sigma": 1.0},
               "train": {"steps": 150, "step_size": 0.5, "encoder_dim": 2},
               "sweep": {"lambdas": [0.0, 2.0]}},
              "sweep")
    r = rep["result"]
    print(f"   spearman(lambda, eok2) = {r['spearman_lambda_eok2']:.2f}; "
          f"rows in {os.path.basename(r['csv_path'])}")

    # every report carries the same envelope
    print("report envelope keys:", sorted(rep.keys()))
