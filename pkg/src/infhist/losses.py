"""Loss functions and their label spaces.

Least squares pairs with labels in [-1, 1]; hinge and binary classification
pair with labels in {-1, +1}.  The classification loss scores the sign of
the prediction, with sign 0 := +1.
"""

from __future__ import annotations

import enum

import numpy as np


class LossKind(enum.Enum):
    LEAST_SQUARES = "least_squares"
    HINGE = "hinge"
    CLASSIFICATION = "classification"

    @classmethod
    def parse(cls, text: str) -> "LossKind":
        aliases = {
            "ls": cls.LEAST_SQUARES,
            "least_squares": cls.LEAST_SQUARES,
            "hinge": cls.HINGE,
            "class": cls.CLASSIFICATION,
            "classification": cls.CLASSIFICATION,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown loss {text!r}") from None


def is_binary(loss: LossKind) -> bool:
    return loss in (LossKind.HINGE, LossKind.CLASSIFICATION)


def validate_labels(ys, loss: LossKind):
    """Raise if any label is outside the loss's label space Y."""
    ys = np.asarray(ys, dtype=np.float64)
    if not np.all(np.isfinite(ys)):
        raise ValueError("labels must be finite")
    if is_binary(loss):
        if not np.all(np.abs(ys) == 1.0):
            raise ValueError(f"{loss.value} labels must be -1 or +1")
    else:
        if np.any(np.abs(ys) > 1.0):
            raise ValueError("least-squares labels must lie in [-1, 1]")


def sign_plus(t):
    """Sign with the +1 tie convention: +1 for t >= 0, -1 otherwise."""
    t = np.asarray(t, dtype=np.float64)
    out = np.where(t >= 0.0, 1.0, -1.0)
    return out if out.ndim else float(out)


def loss_eval(loss: LossKind, y: float, t: float) -> float:
    """Pointwise loss L(y, t)."""
    return float(loss_eval_batch(loss, np.asarray([y]), np.asarray([t]))[0])


def loss_eval_batch(loss: LossKind, ys, ts):
    """Vectorized loss over parallel label/prediction arrays."""
    ys = np.asarray(ys, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    if loss is LossKind.LEAST_SQUARES:
        return (ys - ts) ** 2
    if loss is LossKind.HINGE:
        return np.maximum(0.0, 1.0 - ts * ys)
    return np.where(ys * sign_plus(ts) <= 0.0, 1.0, 0.0)


def pointwise_erm(ys, loss: LossKind) -> float:
    """Minimizer over Y of the summed loss against the given labels.

    Least squares: the label mean.  Hinge/classification: the majority sign,
    ties voting +1 (either sign attains the minimum on a tie).
    """
    ys = np.asarray(ys, dtype=np.float64)
    if ys.size == 0:
        raise ValueError("need at least one label")
    mean = float(ys.mean())
    if loss is LossKind.LEAST_SQUARES:
        return mean
    return float(sign_plus(mean))
