"""Compiled and pure kernel backends must agree bitwise."""

import os
import subprocess
import sys

import numpy as np
import pytest

from infhist import kernels
from infhist.interpolate import good_erm
from infhist.losses import LossKind

from test_interpolate import random_dataset


def random_workload(rng, n_pts=5000, d=2):
    width = 0.4
    offset = rng.uniform(0, width, d)
    kmin = np.floor((-1.0 - offset) / width).astype(np.int64)
    kmax = np.floor((1.0 - offset) / width).astype(np.int64)
    shape = kmax - kmin + 1
    strides = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    table = rng.uniform(-1, 1, int(shape.prod()))
    pts = np.ascontiguousarray(rng.uniform(-1, 1, (n_pts, d)))
    return pts, offset, width, kmin, strides, table


class TestBackendEquivalence:
    def test_hist_eval_bitwise(self):
        impls = kernels.backends()
        if len(impls) < 2:
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(0)
        for d in (1, 2, 3):
            pts, offset, width, kmin, strides, table = random_workload(rng, d=d)
            outs = {}
            for name, impl in impls.items():
                out = np.empty(pts.shape[0])
                impl.hist_eval(pts, offset, width, kmin, strides, table, out)
                outs[name] = out
            assert np.array_equal(outs["pure"], outs["compiled"])

    def test_bump_adjust_bitwise(self):
        impls = kernels.backends()
        if len(impls) < 2:
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(1)
        for d in (1, 2):
            pts = np.ascontiguousarray(rng.uniform(-1, 1, (4000, d)))
            centers = np.ascontiguousarray(
                rng.uniform(-0.9, 0.9, (50, d))[np.argsort(rng.uniform(-0.9, 0.9, 50))]
            )
            centers = centers[np.argsort(centers[:, 0], kind="stable")]
            amps = rng.uniform(-2, 2, 50)
            t = 0.05
            outs = {}
            for name, impl in impls.items():
                out = np.zeros(pts.shape[0])
                impl.bump_adjust(pts, centers, amps, t, out)
                outs[name] = out
            assert np.array_equal(outs["pure"], outs["compiled"])
            assert np.count_nonzero(outs["pure"]) > 0  # the workload actually hit bumps

    def test_predictors_identical_across_backends(self):
        impls = kernels.backends()
        if len(impls) < 2:
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(2)
        data = random_dataset(rng, LossKind.LEAST_SQUARES, d=2, n=80)
        f = good_erm(data, 0.5, LossKind.LEAST_SQUARES)
        pts = rng.uniform(-1, 1, (1000, 2))
        expected = f.predict_batch(pts)
        code = (
            "import numpy as np, pickle, sys\n"
            "from infhist import kernels\n"
            "assert kernels.BACKEND == 'pure', kernels.BACKEND\n"
            "from infhist.interpolate import InflatedHistogram\n"
            "doc, pts = pickle.load(open(sys.argv[1], 'rb'))\n"
            "f = InflatedHistogram.from_doc(doc)\n"
            "np.save(sys.argv[2], f.predict_batch(np.asarray(pts)))\n"
        )
        import pickle
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            blob = os.path.join(tmp, "model.pkl")
            out = os.path.join(tmp, "preds.npy")
            with open(blob, "wb") as fh:
                pickle.dump((f.to_doc(), pts.tolist()), fh)
            env = dict(os.environ, INFHIST_PURE_PYTHON="1")
            subprocess.run([sys.executable, "-c", code, blob, out], check=True, env=env)
            pure = np.load(out)
        assert np.array_equal(expected, pure)


class TestBackendSelection:
    def test_env_forces_pure(self):
        env = dict(os.environ, INFHIST_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", "from infhist.kernels import BACKEND; print(BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "pure"

    def test_default_prefers_compiled_when_built(self):
        if "compiled" not in kernels.backends():
            pytest.skip("compiled backend not built")
        env = {k: v for k, v in os.environ.items() if k != "INFHIST_PURE_PYTHON"}
        out = subprocess.run(
            [sys.executable, "-c", "from infhist.kernels import BACKEND; print(BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "compiled"
