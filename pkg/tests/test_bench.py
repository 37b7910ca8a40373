"""Width schedules, experiment determinism, slope fits, budget accounting."""

import time

import numpy as np
import pytest

from infhist.bench import (
    ExperimentPlan,
    RateRow,
    fit_loglog_slope,
    read_rows_csv,
    rows_to_csv,
    run_experiment,
    width_schedule,
)
from infhist.losses import LossKind
from infhist.relunet import compile_interpolant
from infhist.risk import DistributionSpec, sample
from infhist.interpolate import good_erm


def reg_dist():
    return DistributionSpec(dim=1, task="regression", fstar="linear", C=0.5, noise_b=0.5)


def small_plan(**kw):
    base = dict(
        dist=reg_dist(),
        loss=LossKind.LEAST_SQUARES,
        n_grid=(64, 128),
        gamma=2.0 / 3.0,
        repetitions=3,
        mc_eval_points=4000,
        seed=42,
        predictors=("good_erm", "bad_erm"),
    )
    base.update(kw)
    return ExperimentPlan(**base)


class TestWidthSchedule:
    def test_optimal_gamma_exponent(self):
        # exponent (1-gamma)/d = 1/3 at gamma = 2/3, alpha = 1, d = 1
        n = 3
        assert width_schedule(n, 2.0 / 3.0, 1) == pytest.approx((np.log(n) / n) ** (1.0 / 3.0))

    def test_gamma_zero(self):
        for n in (10, 100):
            assert width_schedule(n, 0.0, 2) == pytest.approx((np.log(n) / n) ** 0.5)

    def test_schedule_shrinks_but_cells_fill(self):
        ns = [2**k for k in range(4, 16)]
        s = [width_schedule(n, 2.0 / 3.0, 1) for n in ns]
        assert all(a > b for a, b in zip(s, s[1:]))
        occupancy = [np.log(n) / (n * sn) for n, sn in zip(ns, s)]
        assert all(a > b for a, b in zip(occupancy, occupancy[1:]))

    def test_alt_schedule(self):
        assert width_schedule(100, 0.0, 3, alt=True) == pytest.approx(1 / np.log(100))

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            width_schedule(1, 0.0, 1)


class TestSlopeFit:
    def synth_rows(self, exponent, ns):
        rows = []
        for n in ns:
            excess = (n / np.log(n)) ** exponent
            rows.append(RateRow(n=n, s=0.1, rep=0, predictor="good_erm", risk=0.0,
                                risk_stderr=0.0, excess_risk=excess, gap_to_worst=0.0,
                                l2_ref=0.0, interpolation_ok=True))
        return rows

    def test_exact_power_law(self):
        rows = self.synth_rows(-2.0 / 3.0, [2**k for k in range(8, 16)])
        assert fit_loglog_slope(rows, "good_erm") == pytest.approx(-2.0 / 3.0, abs=1e-9)

    def test_constant_rows(self):
        rows = self.synth_rows(0.0, [2**k for k in range(8, 13)])
        assert fit_loglog_slope(rows, "good_erm") == pytest.approx(0.0, abs=1e-12)

    def test_too_few_sizes_rejected(self):
        rows = self.synth_rows(-0.5, [256, 512, 1024])
        with pytest.raises(ValueError):
            fit_loglog_slope(rows, "good_erm")


class TestRunExperiment:
    def test_deterministic_csv(self):
        rows_a = run_experiment(small_plan())
        rows_b = run_experiment(small_plan())
        assert rows_to_csv(rows_a) == rows_to_csv(rows_b)

    def test_worker_count_does_not_change_bytes(self):
        rows_1 = run_experiment(small_plan(), workers=1)
        rows_8 = run_experiment(small_plan(), workers=8)
        assert rows_to_csv(rows_1) == rows_to_csv(rows_8)

    def test_rows_in_canonical_order(self):
        rows = run_experiment(small_plan())
        seen = [(r.n, r.rep, r.predictor) for r in rows]
        assert seen == sorted(seen, key=lambda x: (x[0], x[1], 0 if x[2] == "good_erm" else 1))

    def test_every_row_interpolates(self):
        rows = run_experiment(small_plan())
        assert all(r.interpolation_ok for r in rows)

    def test_excess_risk_noise_floor(self):
        rows = run_experiment(small_plan(mc_eval_points=20_000))
        assert all(r.excess_risk >= -3 * r.risk_stderr for r in rows)

    def test_dnn_rows_match_erm_rows(self):
        plan = small_plan(predictors=("good_erm", "good_dnn"), n_grid=(64,),
                          repetitions=2, mc_eval_points=20_000)
        rows = run_experiment(plan)
        by = {}
        for r in rows:
            by.setdefault((r.n, r.rep), {})[r.predictor] = r
        for pair in by.values():
            erm, dnn = pair["good_erm"], pair["good_dnn"]
            # identical eval draws; they may differ only on the thin shells
            slack = 3 * (erm.risk_stderr + dnn.risk_stderr) + 1e-6
            assert abs(erm.excess_risk - dnn.excess_risk) <= slack

    def test_csv_round_trip(self, tmp_path):
        from infhist.bench import write_rows_csv

        rows = run_experiment(small_plan(n_grid=(64,), repetitions=1))
        path = tmp_path / "rates.csv"
        write_rows_csv(rows, path)
        back = read_rows_csv(path)
        assert rows_to_csv(back) == rows_to_csv(rows)

    def test_gamma_outside_legal_range_rejected(self):
        with pytest.raises(ValueError, match="gamma"):
            small_plan(gamma=0.9)

    def test_unknown_predictor_rejected(self):
        with pytest.raises(ValueError, match="predictors"):
            small_plan(predictors=("good_erm", "weird"))


class TestBudget:
    def test_dnn_weight_slots_within_bound(self):
        # d=2, n=1000, s >= 2 n^{-1/d}: first layer at most 4dn rows of d slots
        d, n = 2, 1000
        dist = DistributionSpec(dim=d, task="regression", fstar="linear", C=0.4, noise_b=0.4)
        data = sample(dist, n, seed=0)
        s = max(width_schedule(n, 0.5, d), 2.0 * n ** (-1.0 / d))
        net = compile_interpolant(good_erm(data, s, LossKind.LEAST_SQUARES))
        A1, _ = net.hidden[0]
        A2, _ = net.hidden[1]
        assert A1.shape[0] <= 4 * d * n and A1.shape[1] == d
        assert A1.size <= 4 * d * n * d
        assert A2.shape[0] <= 2 * n

    def test_build_time_scales_gently_on_doubling(self):
        # wall-clock doubling check, deliberately loose
        dist = reg_dist()
        times = {}
        for n in (2000, 4000):
            data = sample(dist, n, seed=1)
            s = width_schedule(n, 2.0 / 3.0, 1)
            best = np.inf
            for _ in range(3):
                t0 = time.perf_counter()
                good_erm(data, s, LossKind.LEAST_SQUARES)
                best = min(best, time.perf_counter() - t0)
            times[n] = best
        assert times[4000] <= max(5.0 * times[2000], times[2000] + 0.05)
