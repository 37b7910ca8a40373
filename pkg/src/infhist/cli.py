"""Command-line interface.

Subcommands mirror the library pipeline: fit a histogram, build a good/bad
interpolant, compile it to network weights, evaluate models on points or
grids, verify interpolation, and run rate experiments to CSV.  Exit code 0
on success, 2 on validation failure.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from .bench import ExperimentPlan, run_experiment, write_rows_csv
from .dataset import load_csv
from .geometry import CubicPartition, align_offset
from .histogram import as_batch_predictor, fit_histogram
from .interpolate import InflatedHistogram, bad_erm, check_interpolation, good_erm
from .losses import LossKind
from .relunet import compile_interpolant, export_weights, import_weights, load_weights, save_weights
from .risk import load_config


def _validated(fn):
    """Map library validation errors to exit code 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main():
    """Interpolating histogram rules, explicit ReLU networks, experiments."""


@main.command("fit-histogram")
@click.option("--data", "data_path", required=True, help="training CSV (x1,...,xd,y)")
@click.option("--width", type=float, required=True)
@click.option("--loss", default="least_squares", show_default=True)
@click.option("--offset", default=None, help="comma-separated grid offset; default aligns to the data")
@click.option("--out", "out_path", required=True)
@_validated
def fit_histogram_cmd(data_path, width, loss, offset, out_path):
    """Fit a plain histogram rule (no bumps) and save it as a model."""
    data = load_csv(data_path)
    loss = LossKind.parse(loss)
    if offset is None:
        off = align_offset(data.distinct_points(), width).offset
    else:
        off = np.asarray([float(v) for v in offset.split(",")], dtype=np.float64)
    part = CubicPartition(data.dim, width, off)
    hist = fit_histogram(data, part, loss)
    model = InflatedHistogram(hist, np.empty((0, data.dim)), np.empty(0), radius=width / 6.0)
    model.save(out_path)
    click.echo(f"fitted histogram with {len(hist.coeffs)} occupied cells -> {out_path}")


@main.command("build-interpolant")
@click.option("--good", "kind", flag_value="good", default=True)
@click.option("--bad", "kind", flag_value="bad")
@click.option("--data", "data_path", required=True)
@click.option("--width", type=float, required=True)
@click.option("--loss", default="least_squares", show_default=True)
@click.option("--out", "out_path", required=True)
@_validated
def build_interpolant_cmd(kind, data_path, width, loss, out_path):
    """Build the good or bad interpolating predictor for a dataset."""
    data = load_csv(data_path)
    loss = LossKind.parse(loss)
    maker = good_erm if kind == "good" else bad_erm
    model = maker(data, width, loss)
    model.save(out_path)
    click.echo(f"{kind} interpolant: {model.bump_count} bumps, radius {model.radius:g} -> {out_path}")


@main.command("compile-dnn")
@click.option("--model", "model_path", required=True)
@click.option("--out", "out_path", required=True)
@_validated
def compile_dnn_cmd(model_path, out_path):
    """Compile an interpolant model into explicit network weights."""
    net = compile_interpolant(InflatedHistogram.load(model_path))
    save_weights(net, out_path)
    widths = net.width_vector()
    click.echo(f"compiled network with widths {widths} -> {out_path}")


@main.command("export-weights")
@click.option("--weights", "in_path", required=True, help="weight document to validate")
@click.option("--out", "out_path", required=True)
@_validated
def export_weights_cmd(in_path, out_path):
    """Validate a weight document and rewrite it (lossless round trip)."""
    with open(in_path, "r", encoding="utf-8") as fh:
        net = import_weights(json.load(fh))
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(export_weights(net), fh)
        fh.write("\n")
    click.echo(f"round-tripped weights for architecture {net.width_vector()} -> {out_path}")


def _load_predictor(model_path, weights_path):
    if (model_path is None) == (weights_path is None):
        raise ValueError("pass exactly one of --model or --weights")
    if model_path is not None:
        model = InflatedHistogram.load(model_path)
        return model, model.base.partition.dim
    net = load_weights(weights_path)
    return net, net.input_dim


@main.command("eval")
@click.option("--model", "model_path", default=None)
@click.option("--weights", "weights_path", default=None)
@click.option("--points", "points_path", default=None, help="CSV of points (x1,...,xd header)")
@click.option("--grid", type=int, default=None, help="midpoint grid resolution per dimension")
@click.option("--out", "out_path", required=True)
@_validated
def eval_cmd(model_path, weights_path, points_path, grid, out_path):
    """Evaluate a model on points or on a regular grid; write x,prediction CSV."""
    predictor, dim = _load_predictor(model_path, weights_path)
    if (points_path is None) == (grid is None):
        raise ValueError("pass exactly one of --points or --grid")
    if points_path is not None:
        with open(points_path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if header != [f"x{i + 1}" for i in range(dim)]:
                raise ValueError(f"points header must be x1,...,x{dim}")
            pts = np.asarray([[float(v) for v in line.split(",")]
                              for line in fh if line.strip()], dtype=np.float64)
        pts = pts.reshape(-1, dim)
    else:
        if grid < 1:
            raise ValueError("--grid must be >= 1")
        axes = [-1.0 + (np.arange(grid) + 0.5) * (2.0 / grid) for _ in range(dim)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    preds = as_batch_predictor(predictor)(pts)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(f"x{i + 1}" for i in range(dim)) + ",prediction\n")
        for row, value in zip(pts, preds):
            fh.write(",".join(format(v, ".17g") for v in row) + f",{format(value, '.17g')}\n")
    click.echo(f"evaluated {pts.shape[0]} points -> {out_path}")


@main.command("verify-interpolation")
@click.option("--model", "model_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--loss", default="least_squares", show_default=True)
@_validated
def verify_interpolation_cmd(model_path, data_path, loss):
    """Check that the model attains the minimal training risk on the data."""
    model = InflatedHistogram.load(model_path)
    data = load_csv(data_path)
    report = check_interpolation(model, data, LossKind.parse(loss))
    click.echo(json.dumps({
        "ok": report.ok,
        "gap": report.gap,
        "empirical_risk": report.empirical_risk,
        "optimal_risk": report.optimal_risk,
    }))
    if not report.ok:
        sys.exit(2)


@main.command("experiment")
@click.option("--dist", "dist_path", required=True, help="distribution config (key=value)")
@click.option("--loss", default="least_squares", show_default=True)
@click.option("--gamma", type=float, required=True)
@click.option("--n-grid", required=True, help="comma-separated sample sizes")
@click.option("--reps", type=int, default=10, show_default=True)
@click.option("--mc", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None, help="defaults to the config's seed, else 0")
@click.option("--out", "out_path", required=True)
@click.option("--predictors", default="good_erm,bad_erm", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--alt-schedule", is_flag=True, help="use the smoothness-free 1/log(n) widths")
@click.option("--timing", is_flag=True, help="append a wall_time_s column (breaks byte determinism)")
@_validated
def experiment_cmd(dist_path, loss, gamma, n_grid, reps, mc, seed, out_path,
                   predictors, workers, alt_schedule, timing):
    """Run a rate/divergence experiment and write the rate rows as CSV."""
    dist, extras = load_config(dist_path)
    if seed is None:
        seed = extras.get("seed") or 0
    plan = ExperimentPlan(
        dist=dist,
        loss=LossKind.parse(loss),
        n_grid=tuple(int(v) for v in n_grid.split(",")),
        gamma=gamma,
        repetitions=reps,
        mc_eval_points=mc,
        seed=seed,
        predictors=tuple(p.strip() for p in predictors.split(",")),
        alt_schedule=alt_schedule,
    )
    rows = run_experiment(plan, workers=workers)
    write_rows_csv(rows, out_path, include_timing=timing)
    click.echo(f"wrote {len(rows)} rows -> {out_path}")


if __name__ == "__main__":
    main()
