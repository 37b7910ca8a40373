#!/usr/bin/env python3
"""Regenerate the committed sample CSVs consumed by the renderer tests.

Uses the primary package's public surface only; the renderer itself never
imports it.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np

from infhist.bench import ExperimentPlan, run_experiment, write_rows_csv
from infhist.dataset import Dataset, save_csv
from infhist.histogram import Histogram
from infhist.geometry import CubicPartition
from infhist.interpolate import InflatedHistogram
from infhist.losses import LossKind
from infhist.relunet import compile_interpolant, save_weights
from infhist.risk import DistributionSpec

HERE = Path(__file__).parent
CLI = [sys.executable, "-m", "infhist.cli"]


def rates():
    plan = ExperimentPlan(
        dist=DistributionSpec(dim=1, task="regression", fstar="linear", C=0.5, noise_b=0.5),
        loss=LossKind.LEAST_SQUARES,
        n_grid=(256, 512, 1024, 2048, 4096),
        gamma=2.0 / 3.0,
        repetitions=5,
        mc_eval_points=20_000,
        seed=3,
        predictors=("good_erm", "bad_erm"),
    )
    write_rows_csv(run_experiment(plan, workers=4), HERE / "rates.csv")


def decision_maps():
    rng = np.random.default_rng(12)
    n = 120
    xs = rng.uniform(-1, 1, (n, 2))
    flip = rng.random(n) < 0.15
    ys = np.where(np.sign(xs[:, 0]) * np.where(flip, -1.0, 1.0) >= 0, 1.0, -1.0)
    train = HERE / "decision_train.csv"
    save_csv(Dataset(xs, ys), train)
    for kind in ("good", "bad"):
        model = HERE / f"decision_{kind}.json"
        subprocess.run(CLI + ["build-interpolant", f"--{kind}", "--data", str(train),
                              "--width", str(2.0 / 7.0), "--loss", "class",
                              "--out", str(model)], check=True)
        subprocess.run(CLI + ["eval", "--model", str(model), "--grid", "120",
                              "--out", str(HERE / f"decision_map_{kind}.csv")], check=True)
        model.unlink()
    train.unlink()


def bump_profile():
    # single indicator-approximation unit on the cell [0, 0.5), shell 0.1
    part = CubicPartition(1, 0.5, np.zeros(1))
    base = Histogram(part, {(0,): 1.0}, 0.0)
    model = InflatedHistogram(base, np.empty((0, 1)), np.empty(0), radius=0.3)
    net = compile_interpolant(model)
    weights = HERE / "bump.json"
    save_weights(net, weights)
    subprocess.run(CLI + ["eval", "--weights", str(weights), "--grid", "2000",
                          "--out", str(HERE / "bump_profile.csv")], check=True)
    weights.unlink()


if __name__ == "__main__":
    rates()
    decision_maps()
    bump_profile()
    print("wrote", ", ".join(p.name for p in sorted(HERE.glob("*.csv"))))
