"""End-to-end CLI coverage: every subcommand plus exit-code conventions."""

import json

import numpy as np
from click.testing import CliRunner

from infhist.cli import main
from infhist.dataset import Dataset, save_csv
from infhist.risk import DistributionSpec, format_config


def write_dataset(path, n=40, seed=0):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-1, 1, (n, 1))
    ys = np.where(xs[:, 0] >= 0, 1.0, -1.0)
    save_csv(Dataset(xs, ys), path)


def run(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


class TestPipeline:
    def test_fit_build_verify_compile_eval(self, tmp_path):
        data = tmp_path / "train.csv"
        write_dataset(data)

        hist = tmp_path / "hist.json"
        res = run(["fit-histogram", "--data", str(data), "--width", "0.5",
                   "--loss", "class", "--out", str(hist)])
        assert res.exit_code == 0, res.output

        model = tmp_path / "good.json"
        res = run(["build-interpolant", "--good", "--data", str(data), "--width", "0.5",
                   "--loss", "class", "--out", str(model)])
        assert res.exit_code == 0, res.output

        res = run(["verify-interpolation", "--model", str(model), "--data", str(data),
                   "--loss", "class"])
        assert res.exit_code == 0
        assert json.loads(res.output)["ok"] is True

        weights = tmp_path / "net.json"
        res = run(["compile-dnn", "--model", str(model), "--out", str(weights)])
        assert res.exit_code == 0, res.output

        weights2 = tmp_path / "net2.json"
        res = run(["export-weights", "--weights", str(weights), "--out", str(weights2)])
        assert res.exit_code == 0
        assert json.load(open(weights)) == json.load(open(weights2))

        preds = tmp_path / "preds.csv"
        res = run(["eval", "--weights", str(weights), "--grid", "64", "--out", str(preds)])
        assert res.exit_code == 0
        lines = preds.read_text().strip().splitlines()
        assert lines[0] == "x1,prediction"
        assert len(lines) == 65

        pts = tmp_path / "pts.csv"
        pts.write_text("x1\n-0.5\n0.5\n")
        res = run(["eval", "--model", str(model), "--points", str(pts), "--out", str(preds)])
        assert res.exit_code == 0
        rows = [line.split(",") for line in preds.read_text().strip().splitlines()[1:]]
        assert float(rows[0][1]) == -1.0 and float(rows[1][1]) == 1.0

    def test_fit_histogram_with_explicit_offset(self, tmp_path):
        data = tmp_path / "train.csv"
        write_dataset(data)
        hist = tmp_path / "hist.json"
        res = run(["fit-histogram", "--data", str(data), "--width", "0.5",
                   "--loss", "class", "--offset", "0.1", "--out", str(hist)])
        assert res.exit_code == 0
        assert json.load(open(hist))["partition"]["offset"] == [0.1]

    def test_bad_interpolant_flag(self, tmp_path):
        data = tmp_path / "train.csv"
        write_dataset(data)
        model = tmp_path / "bad.json"
        res = run(["build-interpolant", "--bad", "--data", str(data), "--width", "0.5",
                   "--loss", "class", "--out", str(model)])
        assert res.exit_code == 0
        res = run(["verify-interpolation", "--model", str(model), "--data", str(data),
                   "--loss", "class"])
        assert res.exit_code == 0  # the bad predictor still interpolates

    def test_verify_fails_with_exit_2_on_non_interpolant(self, tmp_path):
        data = tmp_path / "train.csv"
        rng = np.random.default_rng(1)
        xs = rng.uniform(-1, 1, (30, 1))
        ys = rng.choice([-1.0, 1.0], 30)
        save_csv(Dataset(xs, ys), data)
        hist = tmp_path / "hist.json"
        run(["fit-histogram", "--data", str(data), "--width", "1.0",
             "--loss", "class", "--out", str(hist)])
        res = CliRunner().invoke(
            main, ["verify-interpolation", "--model", str(hist), "--data", str(data),
                   "--loss", "class"])
        assert res.exit_code == 2
        assert json.loads(res.output.strip().splitlines()[-1])["ok"] is False


class TestExperiment:
    def test_experiment_writes_csv(self, tmp_path):
        cfg = tmp_path / "dist.cfg"
        cfg.write_text(format_config(
            DistributionSpec(dim=1, task="regression", fstar="linear", C=0.5, noise_b=0.5),
            seed=9,
        ))
        out = tmp_path / "rates.csv"
        res = run(["experiment", "--dist", str(cfg), "--loss", "ls", "--gamma", "0.6",
                   "--n-grid", "32,64", "--reps", "2", "--mc", "2000",
                   "--out", str(out)])
        assert res.exit_code == 0, res.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == ("n,s,rep,predictor,risk,risk_stderr,excess_risk,"
                            "gap_to_worst,l2_ref,interpolation_ok")
        assert len(lines) == 1 + 2 * 2 * 2

    def test_validation_failure_is_exit_2(self, tmp_path):
        cfg = tmp_path / "dist.cfg"
        cfg.write_text("dim=1\ntask=regression\nfstar=linear\nC=0.5\nnoise_b=0.5\n")
        res = CliRunner().invoke(
            main, ["experiment", "--dist", str(cfg), "--loss", "ls", "--gamma", "0.99",
                   "--n-grid", "32", "--reps", "1", "--mc", "100",
                   "--out", str(tmp_path / "x.csv")])
        assert res.exit_code == 2
        assert "gamma" in res.output


class TestValidationErrors:
    def test_missing_model_is_exit_2(self, tmp_path):
        res = CliRunner().invoke(
            main, ["compile-dnn", "--model", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "w.json")])
        assert res.exit_code == 2

    def test_eval_requires_exactly_one_source(self, tmp_path):
        res = CliRunner().invoke(
            main, ["eval", "--grid", "8", "--out", str(tmp_path / "p.csv")])
        assert res.exit_code == 2

    def test_bad_width_is_exit_2(self, tmp_path):
        data = tmp_path / "train.csv"
        write_dataset(data)
        res = CliRunner().invoke(
            main, ["build-interpolant", "--data", str(data), "--width", "1.5",
                   "--loss", "class", "--out", str(tmp_path / "m.json")])
        assert res.exit_code == 2
