"""Experiment harness: width schedules, rate/divergence runs, slope fits.

A run sweeps sample sizes, builds the requested interpolating predictors on
fresh draws, and records Monte-Carlo excess risks plus L2 distances to the
(possibly negated) Bayes function.  Reference risks come from closed forms,
never from Monte Carlo, so the estimation noise is one-sided.  Rows are
deterministic functions of (plan, seed): repetitions may run on any number
of worker threads and are always emitted in (n, repetition, predictor)
order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .interpolate import InflatedHistogram, bad_erm, check_interpolation, good_erm
from .losses import LossKind
from .relunet import compile_interpolant
from .risk import DistributionSpec, bayes_risk, l2_distance, mc_risk, sample, worst_risk

PREDICTOR_ORDER = ("good_erm", "bad_erm", "good_dnn", "bad_dnn")

CSV_COLUMNS = ("n", "s", "rep", "predictor", "risk", "risk_stderr",
               "excess_risk", "gap_to_worst", "l2_ref", "interpolation_ok")


def width_schedule(n: int, gamma: float, d: int, alt: bool = False) -> float:
    """Cell width for sample size n: (log n / n)^((1-gamma)/d), clamped to (0, 1].

    The alternative schedule 1/log(n) is smoothness-free.
    """
    if n < 2:
        raise ValueError("width schedule needs n >= 2")
    if alt:
        return min(1.0, 1.0 / math.log(n))
    if not (0.0 <= gamma <= 1.0):
        raise ValueError("gamma must lie in [0, 1]")
    return min(1.0, (math.log(n) / n) ** ((1.0 - gamma) / d))


@dataclass(frozen=True)
class ExperimentPlan:
    dist: DistributionSpec
    loss: LossKind
    n_grid: tuple
    gamma: float
    repetitions: int = 10
    mc_eval_points: int = 100_000
    seed: int = 0
    predictors: tuple = ("good_erm", "bad_erm")
    alt_schedule: bool = False
    l2_resolution: int = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "predictors", tuple(self.predictors))
        if not self.n_grid or any(n < 2 for n in self.n_grid):
            raise ValueError("n_grid must contain sample sizes >= 2")
        if self.repetitions < 1 or self.mc_eval_points < 1:
            raise ValueError("repetitions and mc_eval_points must be >= 1")
        bad = set(self.predictors) - set(PREDICTOR_ORDER)
        if bad or not self.predictors:
            raise ValueError(f"predictors must be a non-empty subset of {PREDICTOR_ORDER}")
        gmax = 2.0 * self.dist.holder_alpha / (2.0 * self.dist.holder_alpha + self.dist.dim)
        if not (0.0 <= self.gamma <= gmax + 1e-12):
            raise ValueError(f"gamma must lie in [0, {gmax}] for alpha={self.dist.holder_alpha}")


@dataclass
class RateRow:
    n: int
    s: float
    rep: int
    predictor: str
    risk: float
    risk_stderr: float
    excess_risk: float
    gap_to_worst: float
    l2_ref: float
    interpolation_ok: bool
    wall_time_s: float = field(default=0.0, compare=False)


def _derived_seed(*entropy) -> int:
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _run_cell(plan: ExperimentPlan, refs, ni: int, rep: int) -> list:
    n = plan.n_grid[ni]
    d = plan.dist.dim
    s = width_schedule(n, plan.gamma, d, plan.alt_schedule)
    data = sample(plan.dist, n, _derived_seed(plan.seed, ni, rep, 0))
    bayes, worst = refs
    built: dict = {}

    def erm(kind: str) -> InflatedHistogram:
        if kind not in built:
            maker = good_erm if kind == "good" else bad_erm
            built[kind] = maker(data, s, plan.loss)
        return built[kind]

    rows = []
    for p_idx, tag in enumerate(PREDICTOR_ORDER):
        if tag not in plan.predictors:
            continue
        t0 = time.perf_counter()
        kind = "good" if tag.startswith("good") else "bad"
        model = erm(kind)
        predictor = compile_interpolant(model) if tag.endswith("dnn") else model
        report = check_interpolation(predictor, data, plan.loss)
        est = mc_risk(predictor, plan.dist, plan.mc_eval_points,
                      _derived_seed(plan.seed, ni, rep, 1 + p_idx), loss=plan.loss)
        ref_sign = 1.0 if kind == "good" else -1.0
        l2 = l2_distance(predictor,
                         lambda pts: ref_sign * plan.dist.fstar_ls(pts),
                         plan.dist, resolution=plan.l2_resolution)
        rows.append(RateRow(
            n=n, s=s, rep=rep, predictor=tag,
            risk=est.mean, risk_stderr=est.stderr,
            excess_risk=est.mean - bayes, gap_to_worst=worst - est.mean,
            l2_ref=l2, interpolation_ok=report.ok,
            wall_time_s=time.perf_counter() - t0,
        ))
    return rows


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> list:
    """All rate rows for the plan, in deterministic (n, rep, predictor) order."""
    refs = (bayes_risk(plan.dist, plan.loss), worst_risk(plan.dist, plan.loss))
    jobs = [(ni, rep) for ni in range(len(plan.n_grid)) for rep in range(plan.repetitions)]
    if workers <= 1:
        results = [_run_cell(plan, refs, ni, rep) for ni, rep in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell, plan, refs, ni, rep) for ni, rep in jobs]
            results = [f.result() for f in futures]
    rows = []
    for cell in results:
        rows.extend(cell)
    order = {tag: i for i, tag in enumerate(PREDICTOR_ORDER)}
    rows.sort(key=lambda r: (plan.n_grid.index(r.n), r.rep, order[r.predictor]))
    return rows


def fit_loglog_slope(rows, predictor: str) -> float:
    """Least-squares slope of log median excess risk against log(n / log n)."""
    by_n: dict = {}
    for row in rows:
        if row.predictor == predictor:
            by_n.setdefault(row.n, []).append(row.excess_risk)
    if len(by_n) < 4:
        raise ValueError("slope fit needs at least 4 distinct sample sizes")
    ns = sorted(by_n)
    medians = np.array([np.median(by_n[n]) for n in ns])
    if np.any(medians <= 0):
        raise ValueError("median excess risk must be positive to fit a log-log slope")
    x = np.log(np.array(ns) / np.log(ns))
    y = np.log(medians)
    return float(np.polyfit(x, y, 1)[0])


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(rows, include_timing: bool = False) -> str:
    """Render rows with fixed columns and 17 significant digits.

    Timing is opt-in: the default output is byte-identical across runs and
    worker counts for a fixed plan and seed.
    """
    cols = CSV_COLUMNS + (("wall_time_s",) if include_timing else ())
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in cols))
    return "\n".join(lines) + "\n"


def write_rows_csv(rows, path, include_timing: bool = False):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows, include_timing))


def read_rows_csv(path) -> list:
    """Inverse of write_rows_csv (timing column optional)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = list(CSV_COLUMNS)
        if header not in (expected, expected + ["wall_time_s"]):
            raise ValueError(f"unexpected rate CSV header: {header}")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals = dict(zip(header, line.split(",")))
            rows.append(RateRow(
                n=int(vals["n"]), s=float(vals["s"]), rep=int(vals["rep"]),
                predictor=vals["predictor"], risk=float(vals["risk"]),
                risk_stderr=float(vals["risk_stderr"]),
                excess_risk=float(vals["excess_risk"]),
                gap_to_worst=float(vals["gap_to_worst"]),
                l2_ref=float(vals["l2_ref"]),
                interpolation_ok=vals["interpolation_ok"] == "true",
                wall_time_s=float(vals.get("wall_time_s", 0.0)),
            ))
    return rows
