"""Positive-and-negative label propagation baseline, closed form.

Minimizes  0.5 tr(F L F') + (mu/2) [ mu1 ||F - Y+||_F^2 - mu2 ||F - Y-||_F^2 ]
over the soft-label matrix F (c x N), where L = I - S and S is the
symmetric-normalized weight matrix.  Setting the gradient to zero gives

    F* = [ (mu mu1 - mu mu2) I + L ]^{-1} (mu mu1 Y+ - mu mu2 Y-)

applied row-wise (the N x N system is solved against F' with c right-hand
sides).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .labels import SoftLabels
from .linalg import solve_sym


@dataclass(frozen=True)
class PnlpConfig:
    mu: float = 0.99
    mu1: float = 1.0
    mu2: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ConfigError(f"mu must lie in (0, 1), got {self.mu}")
        if self.mu1 < 0 or self.mu2 < 0:
            raise ConfigError("mu1 and mu2 must be nonnegative")
        if self.mu * self.mu1 - self.mu * self.mu2 <= 0:
            raise ConfigError("mu*mu1 - mu*mu2 must be positive to keep the system well-posed")


def pnlp_solve(W, labels, cfg=None):
    """Closed-form PN-LP solution on a symmetric-normalized graph.

    W      : WeightMatrix from symmetrize_normalize (the S operator)
    labels : LabelMatrices (Y+ / Y-)
    """
    cfg = cfg or PnlpConfig()
    s = np.asarray(W.entries, dtype=np.float64)
    n = s.shape[0]
    a = cfg.mu * cfg.mu1
    b = cfg.mu * cfg.mu2
    system = -s + (1.0 + a - b) * np.eye(n)  # L + (a - b) I with L = I - S
    rhs = (a * labels.y_pos - b * labels.y_neg).T
    f_t = solve_sym(system, rhs, context="pnlp closed-form solve")
    return SoftLabels.from_entries(f_t.T)
