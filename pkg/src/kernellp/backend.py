"""Numba-accelerated hot kernels with a pure-numpy fallback.

The only hot inner loop in the package is pairwise squared-distance /
Gram-matrix assembly; everything downstream is dense BLAS/LAPACK where
numba has nothing to add.  The numba path is used when available unless
the environment variable ``KERNELLP_NUMBA`` is set to ``0``/``false``/
``off``.  Both paths take samples as *rows* (callers transpose from the
package-wide columns-are-samples layout once, at the boundary).

Contract for both implementations: deterministic output, independent of
any parallel schedule (rows are independent).
"""

import os

import numpy as np

_FLAG = os.environ.get("KERNELLP_NUMBA", "").strip().lower()

if _FLAG in ("0", "false", "off"):
    NUMBA_ENABLED = False
else:
    # workqueue avoids the TBB-version probing entirely; callers can still
    # override through NUMBA_THREADING_LAYER themselves
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        from ._numba_kernels import sq_dists_numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def sq_dists_numpy(a, b):
    """Squared Euclidean distances between rows of a (N,d) and b (M,d).

    Expanded form ||x||^2 + ||y||^2 - 2 x.y with a clamp at zero to kill
    negative round-off from the cancellation.
    """
    a2 = np.einsum("ij,ij->i", a, a)
    b2 = np.einsum("ij,ij->i", b, b)
    d = a2[:, None] + b2[None, :] - 2.0 * (a @ b.T)
    np.maximum(d, 0.0, out=d)
    return d


if NUMBA_ENABLED:
    def pairwise_sq_dists(a, b):
        return sq_dists_numba(np.ascontiguousarray(a), np.ascontiguousarray(b))
else:
    pairwise_sq_dists = sq_dists_numpy


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
