"""JIT-compiled distance kernels. Import fails cleanly when numba is absent."""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def sq_dists_numba(a, b):
    # direct (x-y)^2 accumulation: no cancellation, exactly symmetric
    # arithmetic for (i,j)/(j,i), rows independent so prange is safe
    n = a.shape[0]
    m = b.shape[0]
    d = a.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    for i in prange(n):
        for j in range(m):
            acc = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                acc += diff * diff
            out[i, j] = acc
    return out
