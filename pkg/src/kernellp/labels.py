"""Positive/negative label encoding and confidence weighting.

A labeled sample contributes a positive entry for its own class and,
under the complement rule, negative entries for every other class.
Confidence weights follow the "large for labeled, zero for unlabeled"
scheme with positives weighted far above negatives.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

UNLABELED = -1


@dataclass(frozen=True)
class LabelSet:
    """Per-sample class assignments with UNLABELED (-1) as the sentinel.

    ``negatives`` optionally maps a sample index to class indices the
    sample is known *not* to belong to, for samples without a positive
    assignment.
    """

    assignments: np.ndarray
    class_count: int
    negatives: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64)
        object.__setattr__(self, "assignments", a)
        if a.ndim != 1:
            raise InputError(f"assignments must be 1-D, got shape {a.shape}")
        if self.class_count < 1:
            raise InputError(f"class_count must be >= 1, got {self.class_count}")
        labeled = a[a != UNLABELED]
        if labeled.size and (labeled.min() < 0 or labeled.max() >= self.class_count):
            raise InputError(
                f"class index out of range: labels must lie in [0, {self.class_count}) or be {UNLABELED}"
            )
        for j, excluded in self.negatives.items():
            if not 0 <= j < a.size:
                raise InputError(f"negative annotation for out-of-range sample {j}")
            for cls in excluded:
                if not 0 <= cls < self.class_count:
                    raise InputError(f"negative annotation class {cls} out of range")
        missing = [c for c in range(self.class_count) if not np.any(labeled == c)]
        if missing and labeled.size:
            warnings.warn(f"classes without any labeled sample: {missing}", stacklevel=2)

    @property
    def n(self):
        return self.assignments.size

    @property
    def labeled_mask(self):
        return self.assignments != UNLABELED

    @property
    def n_labeled(self):
        return int(np.count_nonzero(self.labeled_mask))


@dataclass(frozen=True)
class LabelMatrices:
    """Binary c x N positive / negative label matrices (disjoint)."""

    y_pos: np.ndarray
    y_neg: np.ndarray


@dataclass(frozen=True)
class ConfidenceWeights:
    """Diagonals of the confidence matrices U1 (positive) and U2 (negative)."""

    u_pos: np.ndarray
    u_neg: np.ndarray


@dataclass(frozen=True)
class SoftLabels:
    """Real-valued c x N soft labels plus argmax hard assignments."""

    entries: np.ndarray
    hard: np.ndarray

    @classmethod
    def from_entries(cls, entries):
        entries = np.asarray(entries, dtype=np.float64)
        # np.argmax resolves ties to the lowest class index
        return cls(entries=entries, hard=np.argmax(entries, axis=0))


def encode_labels(labels):
    """Build Y+ / Y- from a LabelSet.

    Labeled sample of class l: column l of Y+ is 1 and every other class
    row of Y- is 1 (complement rule). Unlabeled samples are all-zero in
    both unless they carry explicit negative annotations.
    """
    c, n = labels.class_count, labels.n
    y_pos = np.zeros((c, n))
    y_neg = np.zeros((c, n))
    labeled = labels.labeled_mask
    idx = np.flatnonzero(labeled)
    cls = labels.assignments[idx]
    y_pos[cls, idx] = 1.0
    y_neg[:, idx] = 1.0
    y_neg[cls, idx] = 0.0
    for j, excluded in labels.negatives.items():
        if labels.assignments[j] == UNLABELED:
            for k in excluded:
                y_neg[k, j] = 1.0
    return LabelMatrices(y_pos=y_pos, y_neg=y_neg)


def build_confidence(labels, pos_labeled=1e10, neg_labeled=1.0):
    """Diagonal confidence weights: (pos_labeled, neg_labeled) for labeled
    samples, (0, 0) for unlabeled ones.

    1e10 stands in for +infinity on the positive side. Samples carrying
    only explicit negative annotations get the negative weight (their
    Y- rows would otherwise be inert).
    """
    if neg_labeled < 0 or pos_labeled < neg_labeled:
        raise InputError(
            f"confidence weights must satisfy pos >= neg >= 0, got ({pos_labeled}, {neg_labeled})"
        )
    labeled = labels.labeled_mask
    u_pos = np.where(labeled, float(pos_labeled), 0.0)
    u_neg = np.where(labeled, float(neg_labeled), 0.0)
    for j, excluded in labels.negatives.items():
        if excluded and not labeled[j]:
            u_neg[j] = float(neg_labeled)
    return ConfidenceWeights(u_pos=u_pos, u_neg=u_neg)
