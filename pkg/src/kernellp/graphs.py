"""Classical graph-weight construction: kNN, heat-kernel weights,
symmetrization/normalization, and weight-matrix export (CSV / PGM).

The heat-kernel weight here is exp(-||x_i - x_j||^2 / sigma) where sigma
is the mean *unsquared* Euclidean edge length over all (sample, neighbor)
pairs; note the different sigma semantics from the rbf kernel in
:mod:`.kernels`.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .backend import pairwise_sq_dists
from .errors import DegenerateInputError, InputError


@dataclass(frozen=True)
class WeightMatrix:
    """Dense nonnegative N x N edge weights; diagonal kept at zero."""

    entries: np.ndarray
    symmetric: bool = False


@dataclass(frozen=True)
class NeighborIndex:
    """Per-sample nearest-neighbor lists, shape (N, k), distance order,
    ties broken toward the lower sample index, self excluded."""

    indices: np.ndarray

    @property
    def k(self):
        return self.indices.shape[1]


def knn(X, k):
    """Euclidean k nearest neighbors of each column of X."""
    rows = np.asarray(X, dtype=np.float64).T
    n = rows.shape[0]
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if k >= n:
        raise InputError(f"k must be <= N-1 = {n - 1}, got {k}")
    d = pairwise_sq_dists(rows, rows)
    np.fill_diagonal(d, np.inf)
    # stable sort keeps equal-distance candidates in index order
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return NeighborIndex(indices=order)


def gaussian_weights(X, nbr, scale=1.0):
    """Heat-kernel weights on the symmetrized kNN edge set.

    W_ij = exp(-||x_i - x_j||^2 / sigma) when i selects j or j selects i,
    else 0; sigma = scale * mean Euclidean length over all (i, neighbor)
    pairs. All-coincident points make sigma zero, which is degenerate.
    """
    rows = np.asarray(X, dtype=np.float64).T
    n = rows.shape[0]
    sq = pairwise_sq_dists(rows, rows)
    arange = np.arange(n)[:, None]
    sigma = float(scale) * float(np.mean(np.sqrt(sq[arange, nbr.indices])))
    if sigma <= 0.0:
        raise DegenerateInputError("all points coincide: mean neighbor distance is zero")
    mask = np.zeros((n, n), dtype=bool)
    mask[arange, nbr.indices] = True
    mask |= mask.T
    entries = np.where(mask, np.exp(-sq / sigma), 0.0)
    np.fill_diagonal(entries, 0.0)
    return WeightMatrix(entries=entries, symmetric=False)


def symmetrize_normalize(W):
    """(W + W')/2 followed by D^{-1/2} S D^{-1/2}; zero rows stay zero."""
    e = np.asarray(W.entries if isinstance(W, WeightMatrix) else W, dtype=np.float64)
    s = (e + e.T) / 2.0
    d = s.sum(axis=1)
    inv_sqrt = np.zeros_like(d)
    nz = d > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(d[nz])
    scaled = np.outer(inv_sqrt, inv_sqrt)  # exactly symmetric
    scaled *= s
    return WeightMatrix(entries=scaled, symmetric=True)


def _weight_entries(W):
    return np.asarray(W.entries if isinstance(W, WeightMatrix) else W, dtype=np.float64)


def write_weights_csv(W, path):
    """Plain dense CSV dump of a weight matrix, one matrix row per line."""
    e = _weight_entries(W)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in e:
            writer.writerow([repr(float(v)) for v in row])


def write_weights_pgm(W, path):
    """8-bit binary PGM of a weight matrix under linear min-max scaling.

    A constant matrix maps to all-black, which is the honest rendering of
    'no contrast'.
    """
    e = _weight_entries(W)
    lo, hi = float(e.min()), float(e.max())
    if hi > lo:
        pixels = np.rint((e - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        pixels = np.zeros(e.shape, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{e.shape[1]} {e.shape[0]}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
