import numpy as np
import pytest

from kernellp.datasets import make_blobs, normalize_features
from kernellp.kernels import KernelSpec
from kernellp.labels import UNLABELED, LabelSet, build_confidence, encode_labels
from kernellp.solver import SolverConfig


def blob_instance(seed, n=50, c=3, labels_per_class=3, spread=0.35, width=0.025,
                  alpha=1e3, beta=1e-3, pos_conf=1e4, max_iter=50):
    """Small well-posed transductive instance on Gaussian blobs.

    The narrow kernel / mild confidence settings keep the alternating
    solver contractive enough to reach the 1e-5 convergence threshold
    within the iteration budget (at image-scale defaults the projected
    weight update stalls the iteration well above that).
    """
    ds = make_blobs(n, c=c, spread=spread, seed=900 + seed)
    X = normalize_features(ds.X, "minmax")
    rng = np.random.default_rng([seed])
    assign = np.full(n, UNLABELED, dtype=np.int64)
    for cls in range(c):
        members = np.flatnonzero(ds.y_true == cls)
        assign[rng.choice(members, labels_per_class, replace=False)] = cls
    labels = LabelSet(assignments=assign, class_count=c)
    conf = build_confidence(labels, pos_labeled=pos_conf)
    cfg = SolverConfig(alpha=alpha, beta=beta, max_iter=max_iter)
    kernel = KernelSpec("rbf", width=width)
    return X, ds.y_true, labels, conf, cfg, kernel


def random_psd_gram(rng, n, width=0.5, dim=4):
    """Random rbf Gram matrix (PSD by construction)."""
    from kernellp.kernels import gram

    X = rng.standard_normal((dim, n))
    return gram(KernelSpec("rbf", width=width), X)


def random_label_setup(rng, n, c, n_labeled, pos_conf=10.0, neg_conf=1.0):
    assign = np.full(n, UNLABELED, dtype=np.int64)
    chosen = rng.choice(n, size=n_labeled, replace=False)
    assign[chosen] = rng.integers(0, c, size=n_labeled)
    labels = LabelSet(assignments=assign, class_count=c)
    return labels, encode_labels(labels), build_confidence(labels, pos_conf, neg_conf)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
