"""Labeled datasets on X = [-1,1]^d and their CSV form.

The on-disk format is plain CSV with header ``x1,...,xd,y`` and finite
decimal literals; floats are written with shortest round-trip repr.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import X_HI


@dataclass(frozen=True)
class Dataset:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64).reshape(-1)
        if xs.ndim == 1:
            xs = xs.reshape(-1, 1)
        if xs.ndim != 2 or xs.shape[0] != ys.shape[0]:
            raise ValueError("xs must be (n, d) with one label per row")
        if xs.shape[0] == 0:
            raise ValueError("dataset must contain at least one sample")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("dataset entries must be finite")
        if np.any(np.abs(xs) > X_HI):
            raise ValueError("sample points must lie in [-1, 1]^d")
        # +0.0 normalizes -0.0 so bitwise duplicate detection matches value
        # equality; also forces an owned C-contiguous copy.
        xs = np.ascontiguousarray(xs + 0.0)
        ys = ys + 0.0
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def distinct_points(self) -> np.ndarray:
        """Distinct sample points, in first-occurrence order, compared bitwise."""
        centers, _ = group_distinct_rows(self.xs)
        return centers


def group_distinct_rows(xs: np.ndarray):
    """Bitwise row grouping: (distinct rows in first-occurrence order,
    per-row group index).  Rows are compared as raw bytes, which matches
    value equality because construction normalizes -0.0."""
    void = np.ascontiguousarray(xs).view([("", np.float64)] * xs.shape[1]).reshape(-1)
    _, first, inverse = np.unique(void, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return xs[first[order]], rank[inverse.reshape(-1)]


def save_csv(dataset: Dataset, path):
    header = ",".join(f"x{i + 1}" for i in range(dataset.dim)) + ",y"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row, y in zip(dataset.xs, dataset.ys):
            fh.write(",".join(repr(float(v)) for v in row) + f",{float(y)!r}\n")


def load_csv(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = [c.strip() for c in header.split(",")]
        if len(cols) < 2 or cols[-1] != "y" or cols[:-1] != [f"x{i + 1}" for i in range(len(cols) - 1)]:
            raise ValueError(f"bad dataset header {header!r}; expected x1,...,xd,y")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValueError(f"line {lineno}: expected {len(cols)} fields")
            rows.append([float(p) for p in parts])
    if not rows:
        raise ValueError("dataset file has no rows")
    data = np.asarray(rows, dtype=np.float64)
    return Dataset(xs=data[:, :-1], ys=data[:, -1])
