"""Histogram rules over cubic partitions.

Fitting assigns each non-empty cell its per-cell empirical risk minimizer
(label mean for least squares, majority sign with ties voting +1 for hinge
and classification); empty cells carry a fixed default (0 for regression,
+1 for the binary losses).  The population histogram replaces the empirical
cell averages by conditional expectations under a synthetic distribution,
computed with a deterministic tensor midpoint rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dataset import Dataset
from .geometry import (
    X_HI,
    X_LO,
    CubicPartition,
    cell_index,
    cell_index_batch,
    cover_keys_range,
)
from .losses import LossKind, is_binary, loss_eval_batch, sign_plus, validate_labels

# Above this many table entries the dense-gather path is abandoned for a
# per-point dict lookup (partitions this fine only occur with tiny widths).
_MAX_TABLE_SIZE = 1 << 26


def empty_default_for(loss: LossKind) -> float:
    return 1.0 if is_binary(loss) else 0.0


@dataclass(frozen=True)
class CellStats:
    """Occupancy of one cell: sample count and label sum."""

    count: int
    label_sum: float

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("empty cell has no mean")
        return self.label_sum / self.count


class Histogram:
    """Piecewise-constant predictor: one coefficient per partition cell.

    Immutable after construction; batch prediction lazily builds a dense
    coefficient table over the cells meeting X and dispatches to the
    selected kernel backend.
    """

    def __init__(self, partition: CubicPartition, coeffs: dict, empty_default: float):
        self.partition = partition
        self.coeffs = {tuple(int(v) for v in k): float(c) for k, c in coeffs.items()}
        self.empty_default = float(empty_default)
        for key in self.coeffs:
            if len(key) != partition.dim:
                raise ValueError(f"cell key {key} has wrong dimension")
        self._table = None

    def coefficient(self, key) -> float:
        return self.coeffs.get(tuple(int(v) for v in key), self.empty_default)

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if np.any(np.abs(x) > X_HI) or not np.all(np.isfinite(x)):
            raise ValueError("point must lie in [-1, 1]^d")
        return self.coefficient(cell_index(x, self.partition))

    def _dense_table(self):
        if self._table is None:
            part = self.partition
            kmin, kmax = cover_keys_range(part)
            shape = (kmax - kmin + 1).astype(np.int64)
            size = int(np.prod(shape))
            if size > _MAX_TABLE_SIZE:
                self._table = (None, kmin, None)
                return self._table
            strides = np.ones(part.dim, dtype=np.int64)
            for i in range(part.dim - 2, -1, -1):
                strides[i] = strides[i + 1] * shape[i + 1]
            table = np.full(size, self.empty_default, dtype=np.float64)
            for key, c in self.coeffs.items():
                rel = np.asarray(key, dtype=np.int64) - kmin
                if np.any(rel < 0) or np.any(rel >= shape):
                    continue  # coefficient on a cell outside X never predicts
                table[int(rel @ strides)] = c
            self._table = (table, kmin, strides)
        return self._table

    def predict_batch(self, points) -> np.ndarray:
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[1] != self.partition.dim:
            raise ValueError(f"points must have dimension {self.partition.dim}")
        if pts.size and (np.max(np.abs(pts)) > X_HI or not np.all(np.isfinite(pts))):
            raise ValueError("points must lie in [-1, 1]^d")
        table, kmin, strides = self._dense_table()
        out = np.empty(pts.shape[0], dtype=np.float64)
        if table is None:
            keys = cell_index_batch(pts, self.partition)
            for i, key in enumerate(map(tuple, keys.tolist())):
                out[i] = self.coeffs.get(key, self.empty_default)
            return out
        kernels.hist_eval(pts, self.partition.offset, self.partition.width,
                          kmin, strides, table, out)
        return out

    def negated(self) -> "Histogram":
        """The pointwise negation -h (coefficients and default flipped)."""
        return Histogram(
            self.partition,
            {k: -c for k, c in self.coeffs.items()},
            -self.empty_default,
        )


def cell_stats(dataset: Dataset, part: CubicPartition) -> dict:
    """Per-cell occupancy statistics for the non-empty cells."""
    keys = cell_index_batch(dataset.xs, part)
    kmin, _ = cover_keys_range(part)
    # Aggregate on flattened keys; uniqueness keeps this O(n log n) regardless
    # of how fine the partition is.
    rel = keys - kmin
    mult = np.int64(1)
    flat = np.zeros(dataset.n, dtype=np.int64)
    for i in range(part.dim - 1, -1, -1):
        flat += rel[:, i] * mult
        mult *= int(rel[:, i].max(initial=0)) + 2
    uniq, inverse = np.unique(flat, return_inverse=True)
    counts = np.bincount(inverse, minlength=uniq.size)
    sums = np.bincount(inverse, weights=dataset.ys, minlength=uniq.size)
    order = np.argsort(flat, kind="stable")
    rep_rows = order[np.searchsorted(flat[order], uniq, side="left")]
    stats = {}
    for g in range(uniq.size):
        key = tuple(int(v) for v in keys[rep_rows[g]])
        stats[key] = CellStats(count=int(counts[g]), label_sum=float(sums[g]))
    return stats


def fit_histogram(dataset: Dataset, part: CubicPartition, loss: LossKind) -> Histogram:
    """Empirical histogram rule: per-cell label mean (HRR) or majority sign (HRC)."""
    if dataset.dim != part.dim:
        raise ValueError("dataset/partition dimension mismatch")
    validate_labels(dataset.ys, loss)
    coeffs = {}
    for key, st in cell_stats(dataset, part).items():
        mean = st.mean
        coeffs[key] = float(sign_plus(mean)) if is_binary(loss) else mean
    return Histogram(part, coeffs, empty_default_for(loss))


def population_histogram(dist, part: CubicPartition, quadrature_resolution: int = 1024) -> Histogram:
    """Infinite-sample histogram: per-cell conditional mean of the target.

    ``dist`` must expose ``density(points)`` and ``fstar_ls(points)``.  Each
    restricted cell is integrated with a tensor midpoint rule at the given
    per-dimension resolution; cells with (numerically) zero mass fall back to
    the regression default 0.
    """
    if quadrature_resolution < 1:
        raise ValueError("quadrature_resolution must be >= 1")
    kmin, kmax = cover_keys_range(part)
    coeffs = {}
    res = quadrature_resolution
    for rel in np.ndindex(*(kmax - kmin + 1)):
        key = tuple(int(k) for k in (np.asarray(rel) + kmin))
        lo = part.offset + part.width * np.asarray(key, dtype=np.float64)
        hi = lo + part.width
        a_lo = np.maximum(lo, X_LO)
        a_hi = np.minimum(hi, X_HI)
        side = a_hi - a_lo
        if np.any(side < 0):
            continue
        axes = [a_lo[i] + (np.arange(res) + 0.5) * (side[i] / res) for i in range(part.dim)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, part.dim)
        vol = float(np.prod(side / res))
        dens = dist.density(grid)
        mass = float(dens.sum()) * vol
        if mass <= 1e-15 * max(float(np.prod(side)), np.finfo(float).tiny):
            continue
        num = float((dist.fstar_ls(grid) * dens).sum()) * vol
        coeffs[key] = num / mass
    return Histogram(part, coeffs, empty_default=0.0)


def as_batch_predictor(f):
    """Normalize a predictor (object with predict_batch, or callable) to a
    batch function (n, d) -> (n,)."""
    if hasattr(f, "predict_batch"):
        return f.predict_batch
    if hasattr(f, "eval_batch"):
        return f.eval_batch
    if callable(f):
        return lambda pts: np.asarray(f(np.asarray(pts, dtype=np.float64)), dtype=np.float64).reshape(-1)
    raise TypeError(f"not a predictor: {f!r}")


def empirical_risk(f, dataset: Dataset, loss: LossKind) -> float:
    """Mean per-sample loss of the predictor on the dataset."""
    preds = as_batch_predictor(f)(dataset.xs)
    return float(loss_eval_batch(loss, dataset.ys, preds).mean())
