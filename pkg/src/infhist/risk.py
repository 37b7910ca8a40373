"""Synthetic distributions with analytic Bayes quantities, and risk estimation.

Shipped families keep every reference quantity closed-form: the marginal is
uniform or a truncated-linear tilt of it (both satisfy the small-box mass
bound P(x + t*B_inf) <= c*t), regression targets are linear/cosine/power
curves in the first coordinate with bounded uniform label noise, and
classification posteriors are linear, noiseless, or constant.  Monte-Carlo
estimators are chunked with per-chunk derived seeds and a fixed reduction
order, so results are bitwise reproducible at any parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .histogram import as_batch_predictor
from .losses import LossKind, is_binary, loss_eval, loss_eval_batch, sign_plus  # noqa: F401

_MARGINALS = ("uniform", "trunclin")
_FSTARS = ("linear", "cosine", "power")
_ETAS = ("linear", "noiseless", "constant")

MC_CHUNK = 1 << 14


@dataclass(frozen=True)
class DistributionSpec:
    """Synthetic data-generating distribution on [-1,1]^d x Y."""

    dim: int
    marginal: str = "uniform"
    beta: float = 0.0
    task: str = "regression"
    fstar: str = "linear"
    alpha: float = 1.0
    C: float = 0.5
    intercept: float = 0.0
    noise_b: float = 0.5
    eta: str = "linear"
    eta_p: float = 0.5

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.marginal not in _MARGINALS:
            raise ValueError(f"marginal must be one of {_MARGINALS}")
        if self.marginal == "trunclin" and not (-1.0 < self.beta < 1.0):
            raise ValueError("trunclin tilt beta must lie in (-1, 1)")
        if self.task == "regression":
            if self.fstar not in _FSTARS:
                raise ValueError(f"fstar must be one of {_FSTARS}")
            if not (0.0 < self.alpha <= 1.0):
                raise ValueError("alpha must lie in (0, 1]")
            if self.noise_b < 0.0:
                raise ValueError("noise_b must be >= 0")
            if abs(self.intercept) + abs(self.C) + self.noise_b > 1.0 + 1e-12:
                raise ValueError("need sup|f*| + noise_b <= 1 so labels stay in [-1, 1]")
        elif self.task == "classification":
            if self.eta not in _ETAS:
                raise ValueError(f"eta must be one of {_ETAS}")
            if self.eta == "linear" and abs(self.C) > 1.0:
                raise ValueError("linear posterior needs |C| <= 1")
            if self.eta == "constant" and not (0.0 <= self.eta_p <= 1.0):
                raise ValueError("eta_p must lie in [0, 1]")
        else:
            raise ValueError("task must be regression or classification")

    # -- analytic pieces ---------------------------------------------------

    @property
    def density_bound(self) -> float:
        """Witness c for the small-box bound P(x + t*B_inf) <= c*t."""
        if self.marginal == "uniform":
            return 1.0
        return 1.0 + abs(self.beta)

    @property
    def holder_alpha(self) -> float:
        if self.task == "regression" and self.fstar == "power":
            return self.alpha
        return 1.0

    @property
    def holder_C(self) -> float:
        """Holder constant of f* under the sup-norm."""
        if self.task == "classification":
            return abs(self.C) if self.eta == "linear" else math.inf
        if self.fstar == "linear":
            return abs(self.C)
        if self.fstar == "cosine":
            return abs(self.C) * math.pi
        return abs(self.C)

    def density(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        if self.marginal == "uniform":
            return np.full(pts.shape[0], 0.5**self.dim)
        return np.prod((1.0 + self.beta * pts) / 2.0, axis=1)

    def fstar_ls(self, points) -> np.ndarray:
        """Least-squares Bayes function E[y | x] (the target curve, or 2*eta - 1)."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        x1 = pts[:, 0]
        if self.task == "regression":
            if self.fstar == "linear":
                return self.intercept + self.C * x1
            if self.fstar == "cosine":
                return self.intercept + self.C * np.cos(np.pi * x1)
            return self.intercept + self.C * np.abs(x1) ** self.alpha
        if self.eta == "linear":
            return self.C * x1
        if self.eta == "noiseless":
            return np.asarray(sign_plus(x1))
        return np.full(pts.shape[0], 2.0 * self.eta_p - 1.0)

    def eta_of(self, points) -> np.ndarray:
        if self.task != "classification":
            raise ValueError("eta is only defined for classification tasks")
        return (1.0 + self.fstar_ls(points)) / 2.0

    def _expect_min_eta(self) -> float:
        """E min(eta, 1-eta); E|x1| = 1/2 under both marginals (the tilt is odd)."""
        if self.eta == "linear":
            return (1.0 - abs(self.C) / 2.0) / 2.0
        if self.eta == "noiseless":
            return 0.0
        return min(self.eta_p, 1.0 - self.eta_p)

    def _expect_fstar_sq(self) -> float:
        """Closed-form E[f*_ls^2] for classification families (E x1^2 = 1/3)."""
        if self.eta == "linear":
            return self.C**2 / 3.0
        if self.eta == "noiseless":
            return 1.0
        return (2.0 * self.eta_p - 1.0) ** 2


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int


def _sample_marginal(dist: DistributionSpec, n: int, rng) -> np.ndarray:
    u = rng.random((n, dist.dim))
    if dist.marginal == "uniform":
        return 2.0 * u - 1.0
    beta = dist.beta
    if beta == 0.0:
        return 2.0 * u - 1.0
    disc = ((1.0 - beta) / 2.0) ** 2 + beta * u
    x = (-0.5 + np.sqrt(disc)) / (beta / 2.0)
    return np.clip(x, -1.0, 1.0)


def sample_points(dist: DistributionSpec, n: int, seed) -> np.ndarray:
    """Marginal-only draw (for quadrature-free integration)."""
    return _sample_marginal(dist, n, np.random.default_rng(seed))


def sample(dist: DistributionSpec, n: int, seed) -> Dataset:
    """Deterministic i.i.d. draw: inverse-CDF points, then labels."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    xs = _sample_marginal(dist, n, rng)
    if dist.task == "regression":
        noise = (2.0 * rng.random(n) - 1.0) * dist.noise_b
        ys = np.clip(dist.fstar_ls(xs) + noise, -1.0, 1.0)
    else:
        u = rng.random(n)
        ys = np.where(u < dist.eta_of(xs), 1.0, -1.0)
    return Dataset(xs=xs, ys=ys)


def bayes_risk(dist: DistributionSpec, loss: LossKind) -> float:
    """Closed-form minimal risk for the shipped families."""
    if dist.task == "regression":
        if loss is not LossKind.LEAST_SQUARES:
            raise ValueError("regression tasks carry [-1,1] labels: least squares only")
        return dist.noise_b**2 / 3.0
    if loss is LossKind.CLASSIFICATION:
        return dist._expect_min_eta()
    if loss is LossKind.HINGE:
        return 2.0 * dist._expect_min_eta()
    return 1.0 - dist._expect_fstar_sq()


def fstar_l2sq(dist: DistributionSpec, resolution: int = None, mc_points: int = 1 << 18, seed: int = 0) -> float:
    """||f*||_2^2 under the marginal: quadrature at d <= 2, Monte Carlo above."""
    return l2_distance(dist.fstar_ls, lambda pts: np.zeros(pts.shape[0]), dist,
                       resolution=resolution, mc_points=mc_points, seed=seed) ** 2


def worst_risk(dist: DistributionSpec, loss: LossKind) -> float:
    """Risk of the negated Bayes function -f*.

    Least squares: Bayes risk + 4*||f*||^2.  Classification: 1 - Bayes risk
    (every Bayes-correct point flips).  Hinge: 2 - Bayes risk.
    """
    if loss is LossKind.LEAST_SQUARES:
        return bayes_risk(dist, loss) + 4.0 * fstar_l2sq(dist)
    if dist.task != "classification":
        raise ValueError("binary losses need a classification distribution")
    if loss is LossKind.CLASSIFICATION:
        return 1.0 - bayes_risk(dist, loss)
    return 2.0 - bayes_risk(dist, loss)


def mc_risk(f, dist: DistributionSpec, n_points: int, seed: int, loss: LossKind = None,
            chunk: int = MC_CHUNK) -> RiskEstimate:
    """Monte-Carlo risk with per-chunk derived seeds and fixed reduction order.

    ``loss`` defaults to the distribution's natural loss; passing one
    explicitly allows e.g. the least-squares risk of a sign-valued predictor
    under a classification distribution.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if loss is None:
        loss = LossKind.LEAST_SQUARES if dist.task == "regression" else LossKind.CLASSIFICATION
    if is_binary(loss) and dist.task != "classification":
        raise ValueError("binary losses need a classification distribution")
    predict = as_batch_predictor(f)
    total = 0.0
    total_sq = 0.0
    done = 0
    idx = 0
    while done < n_points:
        size = min(chunk, n_points - done)
        batch = sample(dist, size, seed=[seed, idx])
        losses = loss_eval_batch(loss, batch.ys, predict(batch.xs))
        total += float(losses.sum())
        total_sq += float((losses * losses).sum())
        done += size
        idx += 1
    mean = total / n_points
    var = max(total_sq - n_points * mean * mean, 0.0) / max(n_points - 1, 1)
    return RiskEstimate(mean=mean, stderr=math.sqrt(var / n_points), n_samples=n_points, seed=seed)


def _quadrature_grid(dist: DistributionSpec, resolution: int):
    axes = [(-1.0 + (np.arange(resolution) + 0.5) * (2.0 / resolution)) for _ in range(dist.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dist.dim)
    vol = (2.0 / resolution) ** dist.dim
    return grid, dist.density(grid) * vol


def l2_distance(f, g, dist: DistributionSpec, method: str = "auto",
                resolution: int = None, mc_points: int = 1 << 18, seed: int = 0) -> float:
    """sqrt(E_PX |f - g|^2): midpoint quadrature at d <= 2, Monte Carlo above."""
    if method == "auto":
        method = "quadrature" if dist.dim <= 2 else "mc"
    fp, gp = as_batch_predictor(f), as_batch_predictor(g)
    if method == "quadrature":
        if resolution is None:
            resolution = 10_000 if dist.dim == 1 else 256
        grid, w = _quadrature_grid(dist, resolution)
        diff = fp(grid) - gp(grid)
        return math.sqrt(max(float((diff * diff) @ w), 0.0))
    if method != "mc":
        raise ValueError("method must be auto, quadrature, or mc")
    pts = sample_points(dist, mc_points, seed)
    diff = fp(pts) - gp(pts)
    return math.sqrt(max(float((diff * diff).mean()), 0.0))


def box_mass(dist: DistributionSpec, x, t: float) -> float:
    """Analytic P_X(x + t*B_inf) for the assumption-witness checks."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape != (dist.dim,):
        raise ValueError(f"point must have dimension {dist.dim}")
    lo = np.maximum(x - t, -1.0)
    hi = np.minimum(x + t, 1.0)
    if np.any(hi <= lo):
        return 0.0
    if dist.marginal == "uniform":
        return float(np.prod((hi - lo) / 2.0))

    def cdf(v):
        return (v + 1.0) / 2.0 + dist.beta * (v * v - 1.0) / 4.0

    return float(np.prod(cdf(hi) - cdf(lo)))


# -- text config ------------------------------------------------------------

_CONFIG_KEYS = {
    "dim": int, "marginal": str, "beta": float, "c": float, "task": str,
    "fstar": str, "alpha": float, "C": float, "intercept": float,
    "noise_b": float, "eta": str, "eta_p": float, "seed": int,
}


def parse_config(text: str):
    """Parse a key=value distribution config; returns (spec, extras).

    ``extras`` carries the optional ``seed`` default; a supplied density
    bound ``c`` is validated against the analytic witness.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _CONFIG_KEYS[key](val)
    supplied_c = values.pop("c", None)
    extras = {"seed": values.pop("seed", None)}
    if "dim" not in values:
        raise ValueError("config must set dim")
    spec = DistributionSpec(**values)
    if supplied_c is not None and supplied_c < spec.density_bound - 1e-12:
        raise ValueError(
            f"declared density bound c={supplied_c} is below the analytic witness {spec.density_bound}"
        )
    return spec, extras


def format_config(dist: DistributionSpec, seed: int = None) -> str:
    lines = [f"dim={dist.dim}", f"marginal={dist.marginal}"]
    if dist.marginal == "trunclin":
        lines.append(f"beta={dist.beta!r}")
    lines.append(f"c={dist.density_bound!r}")
    lines.append(f"task={dist.task}")
    if dist.task == "regression":
        lines += [f"fstar={dist.fstar}", f"alpha={dist.alpha!r}", f"C={dist.C!r}",
                  f"intercept={dist.intercept!r}", f"noise_b={dist.noise_b!r}"]
    else:
        lines += [f"eta={dist.eta}", f"C={dist.C!r}"]
        if dist.eta == "constant":
            lines.append(f"eta_p={dist.eta_p!r}")
    if seed is not None:
        lines.append(f"seed={seed}")
    return "\n".join(lines) + "\n"


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
