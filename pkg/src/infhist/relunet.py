"""Explicit-weight ReLU networks built from closed-form bump units.

Every network here is a stack of hidden layers (affine map + coordinate-wise
ReLU) under a single affine output neuron.  The key primitive is a two-layer
unit equal to 1 on a shrunken box, 0 outside the open box, and ramping in
between; scaled copies of it, combined block-diagonally, reproduce histogram
and inflated-histogram predictors exactly away from thin shells around the
box faces.  No training is involved anywhere: all weights are written down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .geometry import Box, cover_keys_range
from .histogram import Histogram
from .interpolate import InflatedHistogram, _validate_inflated

# Bump weights scale like 1/eps; below this floor the first-layer
# pre-activations lose the cancellation that makes the flat regions exact.
EPS_FLOOR = 2.0**-44


class ReluNet:
    """Feed-forward ReLU network with an affine scalar head.

    ``hidden`` is a list of (weight matrix, bias vector) pairs applied with a
    ReLU after each affine map; the head is an activation-free neuron.
    Networks are immutable after construction.
    """

    def __init__(self, input_dim: int, hidden, head):
        if input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        self.input_dim = int(input_dim)
        self.hidden = []
        prev = self.input_dim
        for A, b in hidden:
            A = np.ascontiguousarray(A, dtype=np.float64)
            b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1)
            if A.ndim != 2 or A.shape[1] != prev or A.shape[0] != b.shape[0]:
                raise ValueError(
                    f"layer shape {A.shape} with bias {b.shape} breaks the "
                    f"dimension chain (expected input {prev})"
                )
            A.flags.writeable = False
            b.flags.writeable = False
            self.hidden.append((A, b))
            prev = A.shape[0]
        a, b = head
        a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1)
        if a.shape[0] != prev:
            raise ValueError(f"head expects {prev} inputs, got weights of size {a.shape[0]}")
        a.flags.writeable = False
        self.head = (a, float(b))

    @property
    def depth(self) -> int:
        return len(self.hidden)

    def width_vector(self):
        return (self.input_dim, *(A.shape[0] for A, _ in self.hidden), 1)

    def eval_batch(self, points) -> np.ndarray:
        z = np.ascontiguousarray(points, dtype=np.float64)
        if z.ndim == 1:
            z = z.reshape(-1, 1)
        if z.shape[1] != self.input_dim:
            raise ValueError(f"points must have dimension {self.input_dim}")
        for A, b in self.hidden:
            z = np.maximum(z @ A.T + b, 0.0)
        a, b = self.head
        return z @ a + b

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=np.float64).reshape(1, -1)
        return float(self.eval_batch(x)[0])


@dataclass(frozen=True)
class BumpSpec:
    """Box and shell width for one bump unit.

    The shell must be strictly below half the smallest box side so that the
    inner plateau [z1+eps, z2-eps] is nondegenerate.
    """

    box: Box
    eps: float

    def __post_init__(self):
        side = self.box.hi - self.box.lo
        if np.any(side <= 0):
            raise ValueError("bump box must have positive sides")
        if not (0.0 < self.eps < float(side.min()) / 2.0):
            raise ValueError(
                f"shell width {self.eps} must lie in (0, {float(side.min()) / 2.0}) "
                "(half the smallest box side)"
            )
        if self.eps < EPS_FLOOR:
            raise ValueError(f"shell width {self.eps} below the numeric floor {EPS_FLOOR}")


def _bump_rows(z1, z2, eps):
    """First-layer rows/biases and the plateau geometry of one bump unit."""
    d = z1.shape[0]
    A = np.zeros((2 * d, d), dtype=np.float64)
    b = np.empty(2 * d, dtype=np.float64)
    for i in range(d):
        A[i, i] = -1.0 / eps
        b[i] = (z1[i] + eps) / eps
        A[d + i, i] = 1.0 / eps
        b[d + i] = -(z2[i] - eps) / eps
    return A, b


def bump_net(spec: BumpSpec) -> ReluNet:
    """Two-hidden-layer unit: 1 on [z1+eps, z2-eps], 0 outside (z1, z2).

    First layer: per coordinate one downhill and one uphill neuron with the
    single nonzero weight +-1/eps.  Second layer: one neuron with all weights
    -1 and bias 1; the head is the identity.
    """
    z1, z2 = spec.box.lo, spec.box.hi
    d = z1.shape[0]
    A1, b1 = _bump_rows(z1, z2, spec.eps)
    A2 = np.full((1, 2 * d), -1.0)
    b2 = np.ones(1)
    return ReluNet(d, [(A1, b1), (A2, b2)], (np.ones(1), 0.0))


def scale_shift(net: ReluNet, alpha: float, c: float) -> ReluNet:
    """The network computing ``alpha * net + c`` (head rescaled, body shared)."""
    a, b = net.head
    return ReluNet(net.input_dim, net.hidden, (alpha * a, alpha * b + c))


def relu_wrap(net: ReluNet) -> ReluNet:
    """The network computing ``max(0, net)`` via one extra width-1 layer."""
    a, b = net.head
    hidden = list(net.hidden) + [(a.reshape(1, -1), np.array([b]))]
    return ReluNet(net.input_dim, hidden, (np.ones(1), 0.0))


def pad_to_depth(net: ReluNet, depth: int) -> ReluNet:
    """Extend with exact passthrough layers until the hidden depth matches.

    Hidden outputs are nonnegative, so an appended (identity, 0) layer is an
    exact identity.  An affine network is first lifted with the +-pair trick
    ``x = relu(x) - relu(-x)``.
    """
    if depth < net.depth:
        raise ValueError("cannot pad to a smaller depth")
    hidden = list(net.hidden)
    a, b = net.head
    if not hidden and depth > 0:
        eye = np.eye(net.input_dim)
        hidden.append((np.vstack([eye, -eye]), np.zeros(2 * net.input_dim)))
        a = np.concatenate([a, -a])
    while len(hidden) < depth:
        m = hidden[-1][0].shape[0]
        hidden.append((np.eye(m), np.zeros(m)))
    return ReluNet(net.input_dim, hidden, (a, b))


def net_sum(f: ReluNet, g: ReluNet, pad: bool = False) -> ReluNet:
    """Block-diagonal combination computing ``f + g`` pointwise.

    First-layer matrices stack vertically, deeper layers sit on the block
    diagonal, heads concatenate with biases added.  Depths must match unless
    ``pad`` is set, in which case the shallower operand is passthrough-padded.
    """
    if f.input_dim != g.input_dim:
        raise ValueError("cannot sum networks with different input dimensions")
    if f.depth != g.depth:
        if not pad:
            raise ValueError(
                f"depth mismatch ({f.depth} vs {g.depth}); pass pad=True to passthrough-pad"
            )
        depth = max(f.depth, g.depth)
        f, g = pad_to_depth(f, depth), pad_to_depth(g, depth)
    if f.depth == 0:
        return ReluNet(f.input_dim, [], (f.head[0] + g.head[0], f.head[1] + g.head[1]))
    hidden = [(np.vstack([f.hidden[0][0], g.hidden[0][0]]),
               np.concatenate([f.hidden[0][1], g.hidden[0][1]]))]
    for (Af, bf), (Ag, bg) in zip(f.hidden[1:], g.hidden[1:]):
        A = np.zeros((Af.shape[0] + Ag.shape[0], Af.shape[1] + Ag.shape[1]))
        A[: Af.shape[0], : Af.shape[1]] = Af
        A[Af.shape[0] :, Af.shape[1] :] = Ag
        hidden.append((A, np.concatenate([bf, bg])))
    af, bf = f.head
    ag, bg = g.head
    return ReluNet(f.input_dim, hidden, (np.concatenate([af, ag]), bf + bg))


def _assemble_units(dim, boxes, epss, weights):
    """One network from many bump units: stacked first layer, block-diagonal
    second layer with all weights -1 and bias 1, unit weights as the head."""
    k = len(boxes)
    if k == 0:
        return ReluNet(dim, [], (np.zeros(dim), 0.0))
    A1 = np.zeros((2 * dim * k, dim))
    b1 = np.empty(2 * dim * k)
    A2 = np.zeros((k, 2 * dim * k))
    for u, ((z1, z2), eps) in enumerate(zip(boxes, epss)):
        rows = slice(2 * dim * u, 2 * dim * (u + 1))
        A1[rows], b1[rows] = _bump_rows(z1, z2, eps)
        A2[u, rows] = -1.0
    b2 = np.ones(k)
    return ReluNet(dim, [(A1, b1), (A2, b2)], (np.asarray(weights, dtype=np.float64), 0.0))


def _nonzero_cells(h: Histogram):
    """Cover-range cells with a nonzero effective coefficient, sorted by key."""
    kmin, kmax = cover_keys_range(h.partition)
    cells = []
    for rel in np.ndindex(*(kmax - kmin + 1)):
        key = tuple(int(v) for v in (np.asarray(rel) + kmin))
        c = h.coeffs.get(key, h.empty_default)
        if c != 0.0:
            cells.append((key, c))
    return cells


def compile_histogram(h: Histogram, eps: float) -> ReluNet:
    """Sum of coefficient-scaled bump units, one per nonzero cell.

    The unit for a cell uses the full (unrestricted) cube, so on X the
    network equals the histogram except within eps of a compiled cell face.
    Requires ``eps < s/2``.
    """
    part = h.partition
    if not (EPS_FLOOR <= eps < part.width / 2.0):
        raise ValueError(f"eps must lie in [{EPS_FLOOR}, width/2 = {part.width / 2.0})")
    boxes, weights = [], []
    for key, c in _nonzero_cells(h):
        lo = part.offset + part.width * np.asarray(key, dtype=np.float64)
        boxes.append((lo, lo + part.width))
        weights.append(c)
    return _assemble_units(part.dim, boxes, [eps] * len(boxes), weights)


def compile_interpolant(f: InflatedHistogram) -> ReluNet:
    """Network form of a properly aligned inflated histogram.

    Uses shell width eps = delta = t/3 for both the cell units and the bump
    units; at every bump center all units sit in their flat regions, so the
    network reproduces the interpolation targets exactly.  Zero-amplitude
    bumps compile to the zero function and are dropped.
    """
    _validate_inflated(f.base, f.centers, f.amplitudes, f.radius)
    part = f.base.partition
    eps = f.radius / 3.0
    if eps < EPS_FLOOR:
        raise ValueError(f"bump radius {f.radius} too small to compile (shell below {EPS_FLOOR})")
    if eps >= part.width / 2.0:
        raise ValueError(f"shell width t/3 = {eps} must stay below width/2")
    boxes, weights = [], []
    for key, c in _nonzero_cells(f.base):
        lo = part.offset + part.width * np.asarray(key, dtype=np.float64)
        boxes.append((lo, lo + part.width))
        weights.append(c)
    for center, amp in zip(f.centers, f.amplitudes):
        if amp == 0.0:
            continue
        boxes.append((center - f.radius, center + f.radius))
        weights.append(float(amp))
    return _assemble_units(part.dim, boxes, [eps] * len(boxes), weights)


def architecture(net: ReluNet):
    """Width vector and per-layer nonzero weight counts (hidden layers, head)."""
    nonzeros = [int(np.count_nonzero(A)) for A, _ in net.hidden]
    nonzeros.append(int(np.count_nonzero(net.head[0])))
    return net.width_vector(), nonzeros


def export_weights(net: ReluNet) -> dict:
    return {
        "input_dim": net.input_dim,
        "hidden": [
            {
                "rows": int(A.shape[0]),
                "cols": int(A.shape[1]),
                "weights": A.reshape(-1).tolist(),
                "bias": b.tolist(),
            }
            for A, b in net.hidden
        ],
        "head": {"weights": net.head[0].tolist(), "bias": net.head[1]},
    }


def import_weights(doc: dict) -> ReluNet:
    try:
        hidden = []
        for layer in doc["hidden"]:
            rows, cols = int(layer["rows"]), int(layer["cols"])
            w = np.asarray(layer["weights"], dtype=np.float64)
            if w.size != rows * cols:
                raise ValueError(f"layer declares {rows}x{cols} but carries {w.size} weights")
            hidden.append((w.reshape(rows, cols), np.asarray(layer["bias"], dtype=np.float64)))
        head = (np.asarray(doc["head"]["weights"], dtype=np.float64), float(doc["head"]["bias"]))
        return ReluNet(int(doc["input_dim"]), hidden, head)
    except KeyError as exc:
        raise ValueError(f"malformed weight document: missing {exc}") from None


def save_weights(net: ReluNet, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(export_weights(net), fh)
        fh.write("\n")


def load_weights(path) -> ReluNet:
    with open(path, "r", encoding="utf-8") as fh:
        return import_weights(json.load(fh))
