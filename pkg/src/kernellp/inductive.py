"""Out-of-sample prediction for trained models.

Two schemes, both driven purely by the kernel matrix between training
and test samples:

  map    : F_new = Q*' K(X, X_T); each test column is the projection of
           its kernel vector.
  recons : each test point's soft label is rebuilt from the soft labels
           of its k most kernel-similar training points, weighted by the
           unit-normalized kernel sub-vector.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInputError, InputError
from .kernels import cross_gram
from .labels import SoftLabels

SCHEMES = ("map", "recons")


@dataclass(frozen=True)
class InductiveConfig:
    """Prediction-scheme selection.

    kernel_width_override retunes the test-time cross-Gram only (the
    trained soft labels are untouched) unless ``retrain`` asks the caller
    to refit the model at that width.
    """

    scheme: str = "map"
    k: int = 7
    kernel_width_override: Optional[float] = None
    retrain: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InputError(f"unknown inductive scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.kernel_width_override is not None and not self.kernel_width_override > 0:
            raise InputError("kernel_width_override must be positive")


def _test_kernel(model, X_T, width):
    spec = model.kernel if width is None else model.kernel.with_width(width)
    return cross_gram(spec, model.X_train, X_T).entries


def predict_map(model, X_T, width=None):
    """Direct kernel mapping: soft labels Q*' K(X, X_T)."""
    kx = _test_kernel(model, X_T, width)
    return SoftLabels.from_entries(model.Q_star.T @ kx)


def predict_recons(model, X_T, k=7, width=None):
    """Label reconstruction from the k most kernel-similar training points.

    Per test point: take the k largest entries of its kernel vector
    (descending, ties toward the lower training index), normalize that
    sub-vector to unit Euclidean length, and combine the corresponding
    trained soft-label columns with those coefficients.
    """
    n = model.n_train
    if not 1 <= k <= n:
        raise InputError(f"k must lie in [1, {n}], got {k}")
    kx = _test_kernel(model, X_T, width)
    order = np.argsort(-kx, axis=0, kind="stable")[:k, :]
    sub = np.take_along_axis(kx, order, axis=0)
    norms = np.sqrt((sub * sub).sum(axis=0))
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise DegenerateInputError(
            f"test sample {bad} has an all-zero kernel vector over its {k} nearest training points"
        )
    coef = sub / norms
    cols = model.F_train.entries[:, order]  # (c, k, M)
    return SoftLabels.from_entries(np.einsum("ckm,km->cm", cols, coef))


def predict(model, X_T, cfg=None):
    """Dispatch on an InductiveConfig (CLI / harness entry point)."""
    cfg = cfg or InductiveConfig()
    if cfg.scheme == "map":
        return predict_map(model, X_T, width=cfg.kernel_width_override)
    return predict_recons(model, X_T, k=cfg.k, width=cfg.kernel_width_override)
