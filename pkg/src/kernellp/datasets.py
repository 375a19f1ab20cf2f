"""Dataset container, CSV ingestion/serialization, synthetic generators.

CSV layout: header row with feature columns ``f0..f{n-1}``, an optional
``label`` column (empty cell = unlabeled) and an optional ``id`` column.
Label strings map to contiguous class indices in first-appearance order.
"""

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IngestionError, InputError
from .labels import UNLABELED, LabelSet


@dataclass
class Dataset:
    """Feature matrix (n x N, samples as columns) plus optional labels.

    y_true uses -1 for samples whose label cell was empty; class_names
    records the original label strings in index order.
    """

    X: np.ndarray
    y_true: Optional[np.ndarray] = None
    names: Optional[list] = None
    class_names: Optional[list] = None

    @property
    def n_samples(self):
        return self.X.shape[1]

    @property
    def n_features(self):
        return self.X.shape[0]

    @property
    def class_count(self):
        if self.class_names:
            return len(self.class_names)
        if self.y_true is None:
            return 0
        labeled = self.y_true[self.y_true != UNLABELED]
        return int(labeled.max()) + 1 if labeled.size else 0

    def label_set(self, class_count=None):
        """View the label column as a partial LabelSet."""
        if self.y_true is None:
            raise InputError("dataset has no label column")
        c = class_count or self.class_count
        return LabelSet(assignments=self.y_true, class_count=c)


def load_csv(path):
    """Parse a dataset CSV; malformed input raises IngestionError with the
    offending 1-based row number."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise IngestionError("empty file", row=1)
    header = [h.strip() for h in rows[0]]
    feature_cols = [(i, name) for i, name in enumerate(header) if name.startswith("f")]
    expected = [f"f{j}" for j in range(len(feature_cols))]
    if not feature_cols or [name for _, name in feature_cols] != expected:
        raise IngestionError(f"header must carry feature columns f0..f{{n-1}}, got {header}", row=1)
    label_col = header.index("label") if "label" in header else None
    id_col = header.index("id") if "id" in header else None

    features = []
    raw_labels = []
    names = [] if id_col is not None else None
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise IngestionError(f"expected {len(header)} cells, got {len(row)}", row=r)
        try:
            features.append([float(row[i]) for i, _ in feature_cols])
        except ValueError:
            raise IngestionError("non-numeric feature value", row=r) from None
        if not all(np.isfinite(features[-1])):
            raise IngestionError("non-finite feature value", row=r)
        if label_col is not None:
            raw_labels.append(row[label_col].strip())
        if id_col is not None:
            names.append(row[id_col])
    if not features:
        raise IngestionError("file has a header but no data rows", row=2)

    X = np.asarray(features, dtype=np.float64).T
    y_true = None
    class_names = None
    if label_col is not None:
        class_names = []
        index = {}
        y_true = np.full(X.shape[1], UNLABELED, dtype=np.int64)
        for j, text in enumerate(raw_labels):
            if text == "":
                continue
            if text not in index:
                index[text] = len(class_names)
                class_names.append(text)
            y_true[j] = index[text]
    return Dataset(X=X, y_true=y_true, names=names, class_names=class_names)


def save_csv(ds, path):
    """Write a dataset back out; floats use repr so real64 values round-trip
    bit-exactly."""
    n = ds.n_features
    header = []
    if ds.names is not None:
        header.append("id")
    header.extend(f"f{j}" for j in range(n))
    if ds.y_true is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for j in range(ds.n_samples):
            row = []
            if ds.names is not None:
                row.append(ds.names[j])
            row.extend(repr(float(v)) for v in ds.X[:, j])
            if ds.y_true is not None:
                y = int(ds.y_true[j])
                if y == UNLABELED:
                    row.append("")
                elif ds.class_names:
                    row.append(ds.class_names[y])
                else:
                    row.append(str(y))
            writer.writerow(row)


def make_two_moons(n, noise=0.08, seed=0):
    """Two interleaving half-circles in the plane; classic linearly
    inseparable two-class benchmark."""
    if n < 4:
        raise InputError(f"need at least 4 samples, got {n}")
    rng = np.random.default_rng(seed)
    n_outer = n // 2
    n_inner = n - n_outer
    t_outer = rng.uniform(0.0, np.pi, n_outer)
    t_inner = rng.uniform(0.0, np.pi, n_inner)
    outer = np.stack([np.cos(t_outer), np.sin(t_outer)])
    inner = np.stack([1.0 - np.cos(t_inner), 0.5 - np.sin(t_inner)])
    X = np.concatenate([outer, inner], axis=1)
    X = X + noise * rng.standard_normal(X.shape)
    y = np.concatenate([np.zeros(n_outer, dtype=np.int64), np.ones(n_inner, dtype=np.int64)])
    return Dataset(X=X, y_true=y, class_names=["0", "1"])


def make_blobs(n, c=3, spread=0.5, seed=0):
    """c isotropic Gaussian clusters with centers on a circle of radius 3."""
    if c < 1:
        raise InputError(f"need at least 1 class, got {c}")
    if n < 2 * c:
        raise InputError(f"need at least 2 samples per class (N >= {2 * c}), got {n}")
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * np.arange(c) / c
    centers = 3.0 * np.stack([np.cos(angles), np.sin(angles)])
    counts = [n // c + (1 if i < n % c else 0) for i in range(c)]
    cols = []
    labels = []
    for cls, cnt in enumerate(counts):
        cols.append(centers[:, [cls]] + spread * rng.standard_normal((2, cnt)))
        labels.extend([cls] * cnt)
    return Dataset(
        X=np.concatenate(cols, axis=1),
        y_true=np.asarray(labels, dtype=np.int64),
        class_names=[str(i) for i in range(c)],
    )


def normalize_features(X, mode):
    """Per-feature normalization: none, minmax (to [0,1]) or zscore.
    Constant features are left untouched by minmax and zeroed by zscore."""
    if mode == "none":
        return np.asarray(X, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64).copy()
    if mode == "minmax":
        lo = X.min(axis=1, keepdims=True)
        hi = X.max(axis=1, keepdims=True)
        span = hi - lo
        nz = span[:, 0] > 0
        X[nz] = (X[nz] - lo[nz]) / span[nz]
        return X
    if mode == "zscore":
        mean = X.mean(axis=1, keepdims=True)
        std = X.std(axis=1, keepdims=True)
        X -= mean
        nz = std[:, 0] > 0
        X[nz] /= std[nz]
        X[~nz] = 0.0
        return X
    raise InputError(f"unknown normalization mode {mode!r}")
