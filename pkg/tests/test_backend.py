import subprocess
import sys

import numpy as np

from kernellp.backend import pairwise_sq_dists, sq_dists_numpy


def test_backends_agree(rng):
    for n, m, d in ((10, 10, 3), (25, 7, 8), (1, 1, 1)):
        a = rng.standard_normal((n, d)) * 10
        b = rng.standard_normal((m, d)) * 10
        fast = pairwise_sq_dists(a, b)
        ref = sq_dists_numpy(a, b)
        assert fast.shape == (n, m)
        assert np.allclose(fast, ref, rtol=1e-10, atol=1e-10)
        assert np.all(fast >= 0.0)


def test_env_flag_forces_numpy_fallback():
    code = (
        "import os; os.environ['KERNELLP_NUMBA'] = '0';"
        "import kernellp.backend as b;"
        "assert not b.NUMBA_ENABLED;"
        "assert b.backend_name() == 'numpy';"
        "assert b.pairwise_sq_dists is b.sq_dists_numpy;"
        "import numpy as np;"
        "from kernellp.kernels import KernelSpec, gram;"
        "g = gram(KernelSpec('rbf', width=1.0), np.eye(3));"
        "assert np.array_equal(g.entries, g.entries.T);"
        "assert np.all(np.diag(g.entries) == 1.0);"
        "print('fallback ok')"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert "fallback ok" in out.stdout
