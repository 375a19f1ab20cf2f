"""Dense solves with condition estimates.

Every linear system in the package goes through one of these two
routines: a symmetric-indefinite LDL' solve (the Q-update matrix can
lose definiteness through the negative-label term) and an SPD inverse
for the W update. Both estimate the 1-norm condition number from the
factorization and refuse to return garbage past ``cond_limit``.
"""

from contextlib import nullcontext

import numpy as np
from scipy.linalg import lapack
from threadpoolctl import threadpool_limits

from .errors import SolverError

COND_LIMIT = 1e14

# below this problem size, multithreaded BLAS loses badly to a single
# thread on small boxes (worker wake-up and spin-wait dwarf the flops);
# above it the extra cores pay for themselves
BLAS_SINGLE_THREAD_MAX_N = 512


def blas_scope(n):
    """Thread-count context for dense work on n x n systems."""
    if n <= BLAS_SINGLE_THREAD_MAX_N:
        return threadpool_limits(limits=1, user_api="blas")
    return nullcontext()


def solve_sym(A, B, cond_limit=COND_LIMIT, context="", refine=True):
    """Solve A X = B for symmetric (possibly indefinite) A via LDL'.

    The system is symmetrically equilibrated (rows/columns scaled by the
    inverse square root of the row max) before factorization: confidence
    weights like 1e10 make these systems violently mis-scaled without
    being intrinsically singular, and the condition estimate is only
    meaningful after equilibration.  One step of iterative refinement
    against the original matrix is applied by default.  Raises
    SolverError on singular/ill-conditioned systems.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    squeeze = B.ndim == 1
    rhs = B[:, None] if squeeze else B

    row_max = np.abs(A).max(axis=1)
    if not np.all(np.isfinite(row_max)) or np.any(row_max == 0.0):
        raise SolverError(_solve_message(context, "system has an empty or non-finite row"))
    d = 1.0 / np.sqrt(row_max)
    a_s = (d[:, None] * d[None, :]) * A
    anorm = np.linalg.norm(a_s, 1)
    ldu, ipiv, info = lapack.dsytrf(a_s, lower=0)
    if info != 0:
        raise SolverError(_solve_message(context, "singular system (LDL factorization failed)"))
    rcond, _ = lapack.dsycon(ldu, ipiv, anorm, lower=0)
    if not np.isfinite(rcond) or rcond <= 0 or 1.0 / rcond > cond_limit:
        est = np.inf if rcond <= 0 else 1.0 / rcond
        raise SolverError(_solve_message(context, f"condition estimate {est:.2e} exceeds {cond_limit:.0e}"))
    xs, info = lapack.dsytrs(ldu, ipiv, d[:, None] * rhs, lower=0)
    if info != 0:
        raise SolverError(_solve_message(context, "triangular solve failed"))
    x = d[:, None] * xs
    if refine:
        r = rhs - A @ x
        dxs, info = lapack.dsytrs(ldu, ipiv, d[:, None] * r, lower=0)
        if info == 0:
            x = x + d[:, None] * dxs
    return x[:, 0] if squeeze else x


def spd_inverse(A, cond_limit=COND_LIMIT, context=""):
    """Inverse of a symmetric positive-definite matrix via Cholesky.

    Returns the full (mirrored) inverse. Falls back to SolverError if A
    is not numerically PD or too ill-conditioned.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    anorm = np.linalg.norm(A, 1)
    c, info = lapack.dpotrf(A, lower=0)
    if info != 0:
        raise SolverError(_solve_message(context, "matrix is not positive definite"))
    rcond, _ = lapack.dpocon(c, anorm)
    if not np.isfinite(rcond) or rcond <= 0 or 1.0 / rcond > cond_limit:
        est = np.inf if rcond <= 0 else 1.0 / rcond
        raise SolverError(_solve_message(context, f"condition estimate {est:.2e} exceeds {cond_limit:.0e}"))
    inv, info = lapack.dpotri(c, lower=0)
    if info != 0:
        raise SolverError(_solve_message(context, "Cholesky inversion failed"))
    return np.triu(inv) + np.triu(inv, 1).T


def _solve_message(context, detail):
    return f"{context}: {detail}" if context else detail
