"""Pure-numpy fallback for the batch prediction kernels.

Mirrors ``_kernels.pyx`` operation for operation so both backends produce
bitwise-identical output.
"""

from __future__ import annotations

import numpy as np


def hist_eval(pts, offset, width, kmin, strides, table, out):
    """Gather per-point cell coefficients from a dense flat table.

    Points must lie inside the table's key range (callers validate X
    membership, and the table covers every cell meeting X).
    """
    keys = np.floor((pts - offset) / width).astype(np.int64)
    flat = (keys - kmin) @ strides
    np.take(table, flat, out=out)
    return out


def bump_adjust(pts, centers, amps, t, out):
    """Add the bump amplitude to points inside a bump cube.

    ``centers`` must be sorted by first coordinate; candidates are found by
    bisection on that coordinate, then confirmed with the full sup-norm test.
    Cubes are closed and pairwise disjoint, so the first hit is the only one.
    """
    if centers.shape[0] == 0:
        return out
    c0 = centers[:, 0]
    lo = np.searchsorted(c0, pts[:, 0] - t, side="left")
    hi = np.searchsorted(c0, pts[:, 0] + t, side="right")
    candidates = np.flatnonzero(hi > lo)
    for p in candidates:
        for j in range(lo[p], hi[p]):
            if np.max(np.abs(pts[p] - centers[j])) <= t:
                out[p] += amps[j]
                break
    return out
