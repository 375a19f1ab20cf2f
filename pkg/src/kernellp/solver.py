"""Transductive kernel-space label propagation with adaptive weights.

The model learns a projection classifier Q (N x c) and a reconstruction
weight matrix W (N x N, nonnegative, zero diagonal) jointly, by
alternating closed-form updates:

    Q  <-  (K U1 K - K U2 K + alpha K L K + beta V)^{-1} (K U1 Y+' - K U2 Y-')
           with L = (I - W)(I - W)'
    V  <-  diag( 1 / (2 ||q^i||_2) )          (row-sparsity surrogate)
    W  <-  (K + K Q Q' K + I)^{-1} (K + K Q Q' K), then clip >= 0, zero diag

until ||Q_{t+1} - Q_t||_F <= eps or max_iter.  The minimized energy is

    tr((Q'K - Y+) U1 (Q'K - Y+)') - tr((Q'K - Y-) U2 (Q'K - Y-)')
    + alpha ( tr(K - KW - W'K + W'KW) + ||Q'K - Q'KW||_F^2 + ||W||_F^2 )
    + beta ||Q||_{2,1}

where the first alpha term is the kernel-space reconstruction error
expressed through the Gram matrix.  Soft labels are F = Q'K; the hard
label of a sample is the argmax of its soft-label column.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InputError
from .kernels import GramMatrix, KernelSpec, gram
from .labels import SoftLabels, build_confidence, encode_labels
from .linalg import COND_LIMIT, blas_scope, solve_sym, spd_inverse

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SolverConfig:
    """Alternating-solver knobs.

    alpha           : weight of the adaptive-reconstruction terms (> 0)
    beta            : weight of the row-sparsity term on Q (> 0)
    eps             : convergence threshold on ||Q_{t+1} - Q_t||_F
    max_iter        : iteration cap; hitting it flags the model non-converged
    row_norm_floor  : floor on ||q^i|| in the V update (the exact update is
                      undefined at zero rows)
    cond_limit      : condition-estimate ceiling for the inner solves
    track_objective : record energy histories and per-iteration monotonicity
                      diagnostics (costs ~2 extra Gram-sized products per
                      iteration; switch off for latency-critical fits)
    """

    alpha: float = 1e3
    beta: float = 1e-1
    eps: float = 1e-5
    max_iter: int = 50
    row_norm_floor: float = 1e-8
    cond_limit: float = COND_LIMIT
    track_objective: bool = True

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.row_norm_floor <= 0:
            raise ConfigError("row_norm_floor must be positive")

    def to_json(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "eps": self.eps,
            "max_iter": self.max_iter,
            "row_norm_floor": self.row_norm_floor,
            "cond_limit": self.cond_limit,
            "track_objective": self.track_objective,
        }

    @classmethod
    def from_json(cls, obj):
        known = {f: obj[f] for f in cls.__dataclass_fields__ if f in obj}
        return cls(**known)


@dataclass
class SolverState:
    """Mutable iterate bundle for the alternating loop.

    v is the diagonal of the N x N matrix V. surrogate_log holds, per
    iteration, the fixed-V energy (beta tr(Q'VQ) form, V = V_t) evaluated
    at (Q_t, W_t), at (Q_{t+1}, W_unprojected) and at (Q_{t+1}, W_{t+1});
    the middle value attributes any energy increase to the nonnegativity /
    zero-diagonal projection.
    """

    Q: np.ndarray
    v: np.ndarray
    W: np.ndarray
    iteration: int = 0
    objective_history: list = field(default_factory=list)
    q_delta_history: list = field(default_factory=list)
    surrogate_log: list = field(default_factory=list)


@dataclass(frozen=True)
class TrainedModel:
    """Converged classifier plus everything needed for prediction."""

    Q_star: np.ndarray
    kernel: KernelSpec
    X_train: np.ndarray
    K_train: np.ndarray
    F_train: SoftLabels
    class_count: int
    config: SolverConfig
    converged: bool
    iterations: int
    objective_history: list = field(default_factory=list)
    q_delta_history: list = field(default_factory=list)
    surrogate_log: list = field(default_factory=list)
    class_names: Optional[list] = None

    @property
    def n_train(self):
        return self.X_train.shape[1]

    def save(self, path):
        """Single-archive serialization: arrays plus a JSON metadata blob."""
        meta = {
            "format_version": MODEL_FORMAT_VERSION,
            "kernel": self.kernel.to_json(),
            "config": self.config.to_json(),
            "class_count": self.class_count,
            "n_features": int(self.X_train.shape[0]),
            "n_train": int(self.X_train.shape[1]),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "class_names": self.class_names,
        }
        np.savez_compressed(
            path,
            X_train=np.ascontiguousarray(self.X_train),
            Q_star=np.ascontiguousarray(self.Q_star),
            meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8),
        )

    @classmethod
    def load(cls, path):
        with np.load(path) as archive:
            meta = json.loads(bytes(archive["meta"]).decode("utf-8"))
            if meta.get("format_version") != MODEL_FORMAT_VERSION:
                raise InputError(f"unsupported model format version {meta.get('format_version')}")
            x_train = archive["X_train"]
            q_star = archive["Q_star"]
        kernel = KernelSpec.from_json(meta["kernel"])
        k_train = gram(kernel, x_train).entries
        f_train = SoftLabels.from_entries(q_star.T @ k_train)
        return cls(
            Q_star=q_star,
            kernel=kernel,
            X_train=x_train,
            K_train=k_train,
            F_train=f_train,
            class_count=int(meta["class_count"]),
            config=SolverConfig.from_json(meta["config"]),
            converged=bool(meta["converged"]),
            iterations=int(meta["iterations"]),
            class_names=meta.get("class_names"),
        )


def l21_norm(A):
    """Sum of row-wise Euclidean norms."""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.sqrt((A * A).sum(axis=1)).sum())


def _gram_entries(K):
    return K.entries if isinstance(K, GramMatrix) else np.asarray(K, dtype=np.float64)


def _project_weights(W):
    W = np.maximum(W, 0.0)
    np.fill_diagonal(W, 0.0)
    return W


class _WeightSolver:
    """Weight updates against one Gram matrix.

    The unconstrained update is I - (G + I)^{-1} with G = K + (KQ)(KQ)',
    a rank-c correction of the fixed matrix K + I.  When K + I admits a
    Cholesky inverse (PSD kernels), that inverse is computed once and
    every subsequent update costs two skinny products plus a c x c solve
    (Woodbury); otherwise each update falls back to a dense solve.
    """

    def __init__(self, K, cfg=None):
        self.k = _gram_entries(K)
        self.cond_limit = cfg.cond_limit if cfg is not None else COND_LIMIT
        n = self.k.shape[0]
        try:
            self.inv_base = spd_inverse(
                self.k + np.eye(n), cond_limit=self.cond_limit, context="weight update"
            )
        except SolverError:
            # non-PSD kernels: defer to a dense symmetric solve per update,
            # which raises if the system is genuinely singular
            self.inv_base = None

    def _fallback(self, Q):
        n = self.k.shape[0]
        b = self.k @ Q
        g = self.k + b @ b.T
        return solve_sym(
            g + np.eye(n), g, cond_limit=self.cond_limit, context="weight update"
        )

    def raw(self, Q):
        """Unprojected stationary point of the weight subproblem."""
        if self.inv_base is None:
            return self._fallback(Q)
        b = self.k @ Q
        u = self.inv_base @ b
        s = np.eye(Q.shape[1]) + b.T @ u
        w = u @ np.linalg.solve(s, u.T) - self.inv_base
        w[np.diag_indices_from(w)] += 1.0
        return w

    def initial(self):
        """Weight update at Q = 0: clip/zero-diag of (K + I)^{-1} K."""
        if self.inv_base is None:
            w0 = self._fallback(np.zeros((self.k.shape[0], 1)))
        else:
            w0 = np.eye(self.k.shape[0]) - self.inv_base
        return _project_weights(w0)


def init_state(K, cfg, class_count):
    """Q0 = 0, V0 = I, and W0 = clip/zero-diag of (K + I)^{-1} K, which is
    the weight update evaluated at Q = 0."""
    k = _gram_entries(K)
    n = k.shape[0]
    return SolverState(
        Q=np.zeros((n, class_count)),
        v=np.ones(n),
        W=_WeightSolver(K, cfg).initial(),
    )


def update_q(K, W, v, mats, conf, cfg, KW=None):
    """Closed-form Q given W and the fixed V diagonal.

    The label block K U K is assembled over the support of the confidence
    weights only (U is zero on unlabeled samples), which matters when few
    samples are labeled.
    """
    k = _gram_entries(K)
    n = k.shape[0]
    if KW is None:
        KW = k @ W
    m = k - KW
    u_delta = conf.u_pos - conf.u_neg
    support = np.flatnonzero(u_delta != 0.0)
    if support.size < n:
        ks = k[:, support]
        a_label = (ks * u_delta[support]) @ ks.T
    else:
        a_label = (k * u_delta) @ k
    a = a_label + cfg.alpha * (m @ m.T)
    a[np.diag_indices_from(a)] += cfg.beta * v
    rhs = k @ (conf.u_pos[:, None] * mats.y_pos.T - conf.u_neg[:, None] * mats.y_neg.T)
    return solve_sym(
        a,
        rhs,
        cond_limit=cfg.cond_limit,
        context="Q update (if the negative-label term destroyed definiteness, increase beta)",
    )


def update_v(Q, floor=1e-8):
    """Diagonal of V: 1 / (2 max(||q^i||, floor))."""
    norms = np.sqrt((Q * Q).sum(axis=1))
    return 1.0 / (2.0 * np.maximum(norms, floor))


def update_w_raw(K, Q, cfg=None):
    """Unconstrained stationary point of the weight subproblem:
    (K + K Q Q' K + I)^{-1} (K + K Q Q' K), computed as I - (G + I)^{-1}."""
    k = _gram_entries(K)
    n = k.shape[0]
    cond_limit = cfg.cond_limit if cfg is not None else COND_LIMIT
    b = k @ Q
    g = k + b @ b.T
    try:
        inv = spd_inverse(g + np.eye(n), cond_limit=cond_limit, context="W update")
        w = -inv
        w[np.diag_indices_from(w)] += 1.0
    except Exception:
        # non-PSD Gram matrices (exotic kernels) can defeat Cholesky
        w = solve_sym(g + np.eye(n), g, cond_limit=cond_limit, context="W update")
    return w


def update_w(K, Q, cfg=None):
    """Weight update followed by the nonnegativity / zero-diagonal projection."""
    return _project_weights(update_w_raw(K, Q, cfg))


def q_gradient(K, Q, W, v, mats, conf, cfg):
    """Stationarity residual of the Q subproblem (half the true gradient of
    the fixed-V energy; the factor cancels at zero)."""
    k = _gram_entries(K)
    f = k @ Q  # K'Q with symmetric K
    left = k @ (conf.u_pos[:, None] * (f - mats.y_pos.T)) - k @ (conf.u_neg[:, None] * (f - mats.y_neg.T))
    m = k - k @ W
    smooth = m @ (m.T @ Q)
    return left + cfg.alpha * smooth + cfg.beta * v[:, None] * Q


def w_gradient(K, Q, W):
    """Stationarity residual of the W subproblem (gradient / (2 alpha))."""
    k = _gram_entries(K)
    b = k @ Q
    g = k + b @ b.T
    return g @ W - g + W


class _EnergyParts:
    """Cached pieces of the energy at one (Q, W) iterate.

    full(beta) is the L2,1 objective; surrogate(beta, v) swaps the L2,1
    term for beta tr(Q'VQ) at an externally fixed V diagonal.
    """

    __slots__ = ("label_net", "alpha_part", "row_norms")

    def __init__(self, label_net, alpha_part, row_norms):
        self.label_net = label_net
        self.alpha_part = alpha_part
        self.row_norms = row_norms

    def full(self, beta):
        return self.label_net + self.alpha_part + beta * float(self.row_norms.sum())

    def surrogate(self, beta, v):
        return self.label_net + self.alpha_part + beta * float((v * self.row_norms**2).sum())


def _energy_parts(K, Q, W, mats, conf, cfg, KW=None):
    k = _gram_entries(K)
    if KW is None:
        KW = k @ W
    f = Q.T @ k
    r_pos = f - mats.y_pos
    r_neg = f - mats.y_neg
    label_net = float((conf.u_pos * (r_pos * r_pos).sum(axis=0)).sum()) - float(
        (conf.u_neg * (r_neg * r_neg).sum(axis=0)).sum()
    )
    recon = float(np.trace(k)) - float(np.trace(KW)) - float((W * k).sum()) + float((W * KW).sum())
    smooth_res = f - Q.T @ KW
    smooth = float((smooth_res * smooth_res).sum())
    wnorm = float((W * W).sum())
    row_norms = np.sqrt((Q * Q).sum(axis=1))
    return _EnergyParts(label_net, cfg.alpha * (recon + smooth + wnorm), row_norms)


def objective(K, Q, W, mats, conf, cfg, v_fixed=None):
    """Energy value at (Q, W).

    With v_fixed=None this is the L2,1-regularized objective; passing a V
    diagonal gives the fixed-V form used in the monotonicity analysis.
    """
    parts = _energy_parts(K, Q, W, mats, conf, cfg)
    if v_fixed is None:
        return parts.full(cfg.beta)
    return parts.surrogate(cfg.beta, np.asarray(v_fixed, dtype=np.float64))


def decode(F):
    """Hard labels from a c x N soft-label matrix (argmax per column,
    ties to the lowest class index)."""
    if isinstance(F, SoftLabels):
        return F
    return SoftLabels.from_entries(F)


def fit(X, labels, kernel=None, cfg=None, conf=None, class_names=None):
    """Train the transductive model on X (n x N) with a partial LabelSet.

    Returns a TrainedModel carrying the converged Q*, the Gram matrix,
    transductive soft labels F = Q*'K, and the recorded histories.
    Non-convergence at max_iter is flagged, not raised.
    """
    kernel = kernel or KernelSpec()
    cfg = cfg or SolverConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"X must be 2-D (features x samples), got shape {X.shape}")
    if labels.n != X.shape[1]:
        raise InputError(f"label set covers {labels.n} samples but X has {X.shape[1]} columns")
    if labels.n_labeled == 0 and not labels.negatives:
        raise InputError("at least one labeled sample is required")

    with blas_scope(X.shape[1]):
        k_mat = gram(kernel, X)
        k = k_mat.entries
        mats = encode_labels(labels)
        conf = conf or build_confidence(labels)

        weight_solver = _WeightSolver(k_mat, cfg)
        state = SolverState(
            Q=np.zeros((X.shape[1], labels.class_count)),
            v=np.ones(X.shape[1]),
            W=weight_solver.initial(),
        )
        kw = k @ state.W
        track = cfg.track_objective
        if track:
            prev_parts = _energy_parts(k, state.Q, state.W, mats, conf, cfg, KW=kw)
            state.objective_history.append(prev_parts.full(cfg.beta))

        converged = False
        for t in range(cfg.max_iter):
            q_new = update_q(k, state.W, state.v, mats, conf, cfg, KW=kw)
            v_new = update_v(q_new, cfg.row_norm_floor)
            w_raw = weight_solver.raw(q_new)
            w_new = _project_weights(w_raw)

            q_delta = float(np.linalg.norm(q_new - state.Q))
            kw = k @ w_new
            if track:
                parts_raw = _energy_parts(k, q_new, w_raw, mats, conf, cfg)
                parts_new = _energy_parts(k, q_new, w_new, mats, conf, cfg, KW=kw)
                state.surrogate_log.append(
                    (
                        prev_parts.surrogate(cfg.beta, state.v),
                        parts_raw.surrogate(cfg.beta, state.v),
                        parts_new.surrogate(cfg.beta, state.v),
                    )
                )
                state.objective_history.append(parts_new.full(cfg.beta))
                prev_parts = parts_new

            state.Q, state.v, state.W = q_new, v_new, w_new
            state.iteration = t + 1
            state.q_delta_history.append(q_delta)
            if q_delta <= cfg.eps:
                converged = True
                break

        f_train = SoftLabels.from_entries(state.Q.T @ k)
    return TrainedModel(
        Q_star=state.Q,
        kernel=kernel,
        X_train=X,
        K_train=k,
        F_train=f_train,
        class_count=labels.class_count,
        config=cfg,
        converged=converged,
        iterations=state.iteration,
        objective_history=state.objective_history,
        q_delta_history=state.q_delta_history,
        surrogate_log=state.surrogate_log,
        class_names=list(class_names) if class_names is not None else None,
    )


def adaptive_weights(model):
    """Reconstruction weight matrix at the converged classifier, for export
    and inspection (recomputed from K and Q*; not stored in the archive)."""
    return update_w(model.K_train, model.Q_star, model.config)
