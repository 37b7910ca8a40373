"""Cubic partitions of [-1,1]^d: cell indexing, gap separation, offset alignment.

A cubic partition of width ``s`` tiles R^d with half-open cells
``offset + s*k + [0, s)^d`` indexed by integer vectors ``k``.  Restricting
the cells to the domain ``X = [-1, 1]^d`` gives the partitions the histogram
estimators live on.  The offset-alignment search places the grid so that a
small cube around every sample point stays strictly inside its cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

X_LO = -1.0
X_HI = 1.0


class AlignmentError(ValueError):
    """A bump cube violates proper alignment (containment or disjointness)."""


def _as_points(points, dim=None):
    """Coerce to a (m, d) float64 array; accepts a single point or a list."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2:
        raise ValueError(f"points must be a (m, d) array, got shape {pts.shape}")
    if dim is not None and pts.shape[1] != dim:
        raise ValueError(f"expected dimension {dim}, got {pts.shape[1]}")
    return pts


def _frozen(arr):
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class CubicPartition:
    """Grid of half-open cubes ``offset + s*k + [0, s)^d``.

    The offset is reduced modulo the width so each coordinate lies in
    ``[0, s)``; this does not change the partition, only the key labels.
    """

    dim: int
    width: float
    offset: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (0.0 < self.width <= 1.0):
            raise ValueError(f"width must be in (0, 1], got {self.width}")
        off = np.asarray(self.offset, dtype=np.float64).reshape(-1)
        if off.shape != (self.dim,):
            raise ValueError(f"offset must have shape ({self.dim},)")
        if not np.all(np.isfinite(off)):
            raise ValueError("offset must be finite")
        object.__setattr__(self, "offset", _frozen(np.mod(off, self.width)))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with corners ``lo`` and ``hi`` (lo <= hi)."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _frozen(np.atleast_1d(self.lo)))
        object.__setattr__(self, "hi", _frozen(np.atleast_1d(self.hi)))
        if self.lo.shape != self.hi.shape:
            raise ValueError("lo/hi shape mismatch")

    @property
    def dim(self):
        return self.lo.shape[0]


@dataclass(frozen=True)
class AlignmentResult:
    """Outcome of the coordinate-wise offset search.

    ``tmax = delta / 3`` is the largest cube radius guaranteed to keep every
    sample's cube inside its cell; ``candidate_count`` reports the size
    ``(m+1)^d`` of the implicit candidate family that the search never
    enumerates.
    """

    offset: np.ndarray
    delta: float
    tmax: float
    candidate_count: int

    def __post_init__(self):
        object.__setattr__(self, "offset", _frozen(self.offset))


@dataclass
class AlignmentReport:
    """Per-point containment flags plus the pairwise-disjointness verdict."""

    t: float
    inside: np.ndarray
    disjoint: bool
    violating_pairs: list = field(default_factory=list)

    @property
    def all_inside(self) -> bool:
        return bool(np.all(self.inside))

    @property
    def ok(self) -> bool:
        return self.all_inside and self.disjoint


def cell_index(x, part: CubicPartition):
    """Key of the cell containing ``x``: coordinate-wise floor((x - offset)/s)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape != (part.dim,):
        raise ValueError(f"point must have dimension {part.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite coordinates")
    k = np.floor((x - part.offset) / part.width).astype(np.int64)
    return tuple(int(v) for v in k)


def cell_index_batch(points, part: CubicPartition):
    """Vectorized cell keys for a (m, d) array of finite points."""
    pts = _as_points(points, part.dim)
    if not np.all(np.isfinite(pts)):
        raise ValueError("points have non-finite coordinates")
    return np.floor((pts - part.offset) / part.width).astype(np.int64)


def cell_bounds(key, part: CubicPartition):
    """Bounds of cell ``key``: the full cube B and its restriction A to X.

    B is half-open ``[lo, hi)``.  A is ``B ∩ [-1, 1]^d``; where A is clipped
    at the upper domain face the face is closed (the point +1 belongs to the
    cell the floor rule puts it in).  Returns ``(B, None)`` when A is empty.
    """
    k = np.asarray(key, dtype=np.float64).reshape(-1)
    if k.shape != (part.dim,):
        raise ValueError(f"key must have dimension {part.dim}")
    lo = part.offset + part.width * k
    hi = lo + part.width
    b = Box(lo, hi)
    a_lo = np.maximum(lo, X_LO)
    a_hi = np.minimum(hi, X_HI)
    # Nonempty per axis: something survives below the half-open top, or the
    # cell straddles the closed domain face at +1.
    nonempty = (a_lo < a_hi) | ((a_lo == X_HI) & (hi > X_HI))
    if not np.all(nonempty):
        return b, None
    return b, Box(a_lo, a_hi)


def cover_keys_range(part: CubicPartition):
    """Inclusive per-axis key range of all cells meeting X = [-1, 1]^d."""
    kmin = np.floor((X_LO - part.offset) / part.width).astype(np.int64)
    kmax = np.floor((X_HI - part.offset) / part.width).astype(np.int64)
    return kmin, kmax


def min_gap_separation(points) -> float:
    """One third of the smallest positive coordinate gap, over all coordinates.

    Sorting each coordinate and scanning consecutive values costs
    O(d * m log m); any two distinct points are at sup-distance at least the
    smallest positive gap, so cubes of radius up to the returned value are
    pairwise disjoint.  Returns +inf when no coordinate has a positive gap.
    """
    pts = _as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("points must be non-empty")
    best = np.inf
    for i in range(pts.shape[1]):
        col = np.sort(pts[:, i])
        gaps = np.diff(col)
        gaps = gaps[gaps > 0.0]
        if gaps.size:
            best = min(best, float(gaps.min()))
    return best / 3.0


def align_offset(points, s: float) -> AlignmentResult:
    """Find a grid offset whose cells contain each point with slack.

    Coordinate-wise: the residues ``x mod s`` of the m points are binned into
    m+1 half-open bins of width ``delta = s/(m+1)``; some bin is empty, and
    centering the offset coordinate in it guarantees every point is at least
    ``delta/2`` from both faces of its cell.  Any cube radius
    ``t <= s/(3m+3) = delta/3`` then keeps each point's cube inside its cell.
    Cost is O(d * m); bins are counted, never enumerated as offsets.
    """
    pts = _as_points(points)
    m, d = pts.shape
    if m == 0:
        raise ValueError("points must be non-empty")
    if not (0.0 < s <= 1.0):
        raise ValueError(f"width must be in (0, 1], got {s}")
    if np.unique(pts, axis=0).shape[0] != m:
        raise ValueError("points must be distinct (deduplicate first)")
    if np.any(np.abs(pts) > X_HI):
        raise ValueError("points must lie in [-1, 1]^d")
    delta = s / (m + 1)
    offset = np.empty(d, dtype=np.float64)
    for i in range(d):
        residues = np.mod(pts[:, i], s)
        bins = np.floor(residues / delta).astype(np.int64)
        np.clip(bins, 0, m, out=bins)  # guards the residue == s rounding edge
        occupied = np.zeros(m + 1, dtype=bool)
        occupied[bins] = True
        j = int(np.flatnonzero(~occupied)[0])  # exists: m residues, m+1 bins
        offset[i] = (j + 0.5) * delta
    return AlignmentResult(
        offset=offset,
        delta=delta,
        tmax=s / (3 * m + 3),
        candidate_count=(m + 1) ** d,
    )


def _pairwise_disjoint_full(pts, t, max_pairs=32):
    """Exact pairwise check: closed cubes of radius t are disjoint iff the
    sup-distance of every pair exceeds 2t."""
    m = pts.shape[0]
    pairs = []
    for i in range(m - 1):
        dist = np.max(np.abs(pts[i + 1 :] - pts[i]), axis=1)
        bad = np.flatnonzero(dist <= 2.0 * t)
        for b in bad[: max_pairs - len(pairs)]:
            pairs.append((i, i + 1 + int(b)))
        if len(pairs) >= max_pairs:
            break
    return len(pairs) == 0, pairs


def _pairwise_disjoint_grouped(pts, keys, t, max_pairs=32):
    """Pairwise check restricted to points sharing a cell.

    Valid only when every cube is inside its cell: cubes in different cells
    are then separated by the cell faces.
    """
    groups = {}
    for idx, key in enumerate(map(tuple, keys)):
        groups.setdefault(key, []).append(idx)
    pairs = []
    for members in groups.values():
        if len(members) < 2:
            continue
        sub = pts[members]
        ok, sub_pairs = _pairwise_disjoint_full(sub, t, max_pairs - len(pairs))
        for a, b in sub_pairs:
            pairs.append((members[a], members[b]))
        if len(pairs) >= max_pairs:
            break
    return len(pairs) == 0, pairs


def verify_proper_alignment(points, t: float, part: CubicPartition) -> AlignmentReport:
    """Check both alignment conditions for closed cubes ``x ± t`` per point.

    Containment uses the half-open cell convention (``lo <= x - t`` and
    ``x + t < hi``); disjointness requires every pair of cubes to have
    sup-distance strictly above 2t.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    pts = _as_points(points, part.dim)
    keys = cell_index_batch(pts, part)
    lo = part.offset + part.width * keys
    inside = np.all((lo <= pts - t) & (pts + t < lo + part.width), axis=1)
    if np.all(inside):
        disjoint, pairs = _pairwise_disjoint_grouped(pts, keys, t)
    else:
        disjoint, pairs = _pairwise_disjoint_full(pts, t)
    return AlignmentReport(t=t, inside=inside, disjoint=disjoint, violating_pairs=pairs)
