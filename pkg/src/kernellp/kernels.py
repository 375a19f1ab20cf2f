"""Kernel evaluation and Gram / cross-Gram matrix construction.

Data layout convention for the whole package: a data matrix ``X`` has
shape ``(n, N)`` with samples as columns.  The Gaussian kernel here is
``exp(-||x - y||^2 / (2 sigma^2))`` with ``width`` = sigma; this is a
different animal from the graph-weight heat kernel in :mod:`.graphs`,
whose sigma divides the squared distance directly.
"""

from dataclasses import dataclass

import numpy as np

from .backend import pairwise_sq_dists
from .errors import InputError

KERNEL_KINDS = ("rbf", "linear", "quadratic", "polynomial")

# rbf values below this are indistinguishable from zero against O(1)
# entries, but keeping them strictly positive preserves the documented
# (0, 1] range (plain exp underflows to 0 for extreme widths) and, more
# importantly, keeps downstream BLAS out of denormal territory: products
# of e^{-400}-scale entries otherwise underflow gradually and slow dense
# solves by two orders of magnitude
RBF_FLOOR = 1e-30


@dataclass(frozen=True)
class KernelSpec:
    """Kernel function choice plus its parameters.

    width   : RBF width sigma (> 0), in the units of feature distance
    degree  : polynomial degree (>= 1), polynomial only
    offset  : additive constant inside polynomial/quadratic kernels
    """

    kind: str = "rbf"
    width: float = 1000.0
    degree: int = 3
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise InputError(f"unknown kernel kind {self.kind!r}, expected one of {KERNEL_KINDS}")
        if self.kind == "rbf" and not self.width > 0:
            raise InputError(f"rbf width must be > 0, got {self.width}")
        if self.kind == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise InputError(f"polynomial degree must be an integer >= 1, got {self.degree}")

    @property
    def effective_degree(self):
        return 2 if self.kind == "quadratic" else int(self.degree)

    def with_width(self, width):
        return KernelSpec(self.kind, float(width), self.degree, self.offset)

    def to_json(self):
        obj = {"kind": self.kind}
        if self.kind == "rbf":
            obj["width"] = float(self.width)
        if self.kind == "polynomial":
            obj["degree"] = int(self.degree)
        if self.kind in ("polynomial", "quadratic"):
            obj["offset"] = float(self.offset)
        return obj

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InputError(f"kernel spec must be an object with a 'kind' field, got {obj!r}")
        return cls(
            kind=obj["kind"],
            width=float(obj.get("width", 1000.0)),
            degree=int(obj.get("degree", 3)),
            offset=float(obj.get("offset", 0.0)),
        )


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric N x N kernel matrix over one sample set. Immutable."""

    entries: np.ndarray
    spec: KernelSpec

    @property
    def n_samples(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class CrossGram:
    """N x M kernel matrix between a training set and a test set."""

    entries: np.ndarray
    spec: KernelSpec


def _as_samples_by_rows(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"data matrix must be 2-D (features x samples), got shape {X.shape}")
    return X.T


def kernel_eval(spec, x, y):
    """Kernel value K(x, y) for two feature vectors of equal length."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InputError(f"feature dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if spec.kind == "rbf":
        diff = x - y
        return float(max(np.exp(-(diff @ diff) / (2.0 * spec.width**2)), RBF_FLOOR))
    dot = float(x @ y)
    if spec.kind == "linear":
        return dot
    return (dot + spec.offset) ** spec.effective_degree


def _kernel_from_inner(spec, inner):
    if spec.kind == "linear":
        return inner
    return (inner + spec.offset) ** spec.effective_degree


def gram(spec, X):
    """Dense Gram matrix K with K[i, j] = K(x_i, x_j), mirrored so it is
    exactly symmetric; the rbf diagonal is exactly 1."""
    rows = _as_samples_by_rows(X)
    if rows.shape[0] < 1:
        raise InputError("cannot build a Gram matrix from an empty dataset")
    if spec.kind == "rbf":
        d = pairwise_sq_dists(rows, rows)
        np.fill_diagonal(d, 0.0)
        d = np.triu(d) + np.triu(d, 1).T
        entries = np.exp(-d / (2.0 * spec.width**2))
        np.maximum(entries, RBF_FLOOR, out=entries)
    else:
        inner = rows @ rows.T
        inner = np.triu(inner) + np.triu(inner, 1).T
        entries = _kernel_from_inner(spec, inner)
    entries.setflags(write=False)
    return GramMatrix(entries=entries, spec=spec)


def cross_gram(spec, X, X_T):
    """Kernel matrix between training columns of X and test columns of X_T."""
    rows = _as_samples_by_rows(X)
    rows_t = _as_samples_by_rows(X_T)
    if rows.shape[1] != rows_t.shape[1]:
        raise InputError(
            f"feature dimension mismatch: training n={rows.shape[1]}, test n={rows_t.shape[1]}"
        )
    if rows.shape[0] < 1 or rows_t.shape[0] < 1:
        raise InputError("cannot build a cross-Gram matrix from an empty dataset")
    if spec.kind == "rbf":
        entries = np.exp(-pairwise_sq_dists(rows, rows_t) / (2.0 * spec.width**2))
        np.maximum(entries, RBF_FLOOR, out=entries)
    else:
        entries = _kernel_from_inner(spec, rows @ rows_t.T)
    entries.setflags(write=False)
    return CrossGram(entries=entries, spec=spec)
