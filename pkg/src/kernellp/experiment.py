"""Seeded experiment harness: splits, runs, metrics, reports, sweeps.

Everything except wall-clock timing is a pure function of (config,
dataset); reports serialize to JSON with timing isolated under "timing"
subtrees so byte-level comparisons can strip it.
"""

import json
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .datasets import Dataset, normalize_features
from .errors import ConfigError, SolverError
from .graphs import gaussian_weights, knn, symmetrize_normalize
from .inductive import InductiveConfig, predict_map, predict_recons
from .kernels import KernelSpec
from .labels import UNLABELED, LabelSet, encode_labels
from .pnlp import PnlpConfig, pnlp_solve
from .solver import SolverConfig, fit

REPORT_SCHEMA_VERSION = 1
METHODS = ("kernel_lp", "pnlp")
NORMALIZE_MODES = ("none", "minmax", "zscore")


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "kernel_lp"
    kernel: KernelSpec = field(default_factory=KernelSpec)
    solver: SolverConfig = field(default_factory=SolverConfig)
    inductive: InductiveConfig = field(default_factory=InductiveConfig)
    pnlp: PnlpConfig = field(default_factory=PnlpConfig)
    labels_per_class: int = 2
    unlabeled_per_class: Optional[int] = None
    test_fraction: float = 0.0
    runs: int = 15
    seed: int = 0
    normalize: str = "minmax"
    graph_k: int = 7
    best_k_of: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.labels_per_class < 1:
            raise ConfigError("labels_per_class must be >= 1")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in [0, 1)")
        if self.normalize not in NORMALIZE_MODES:
            raise ConfigError(f"unknown normalize mode {self.normalize!r}")
        if self.best_k_of is not None and self.best_k_of < 1:
            raise ConfigError("best_k_of must be >= 1")

    def to_json(self):
        return {
            "method": self.method,
            "kernel": self.kernel.to_json(),
            "solver": self.solver.to_json(),
            "inductive": {
                "scheme": self.inductive.scheme,
                "k": self.inductive.k,
                "kernel_width_override": self.inductive.kernel_width_override,
                "retrain": self.inductive.retrain,
            },
            "pnlp": {"mu": self.pnlp.mu, "mu1": self.pnlp.mu1, "mu2": self.pnlp.mu2},
            "labels_per_class": self.labels_per_class,
            "unlabeled_per_class": self.unlabeled_per_class,
            "test_fraction": self.test_fraction,
            "runs": self.runs,
            "seed": self.seed,
            "normalize": self.normalize,
            "graph_k": self.graph_k,
            "best_k_of": self.best_k_of,
        }

    @classmethod
    def from_json(cls, obj):
        kwargs = dict(obj)
        if "kernel" in kwargs:
            kwargs["kernel"] = KernelSpec.from_json(kwargs["kernel"])
        if "solver" in kwargs:
            kwargs["solver"] = SolverConfig.from_json(kwargs["solver"])
        if "inductive" in kwargs:
            kwargs["inductive"] = InductiveConfig(**kwargs["inductive"])
        if "pnlp" in kwargs:
            kwargs["pnlp"] = PnlpConfig(**kwargs["pnlp"])
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown experiment config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class Split:
    """One stratified labeled/unlabeled/test split of a dataset."""

    label_set: LabelSet
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    train_indices: np.ndarray
    test_indices: np.ndarray


def split(ds, cfg, run_index):
    """Deterministic split for (cfg.seed, run_index): carve off the test
    fraction, then stratify labels_per_class labeled samples per class
    inside the training part (optionally capping unlabeled per class)."""
    if ds.y_true is None or np.any(ds.y_true == UNLABELED):
        raise ConfigError("splitting requires a fully labeled dataset")
    n = ds.n_samples
    c = ds.class_count
    rng = np.random.default_rng([cfg.seed, run_index])
    perm = rng.permutation(n)
    n_test = int(np.floor(cfg.test_fraction * n))
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    y_train = ds.y_true[train_idx]

    labeled_local = []
    keep_local = []
    for cls in range(c):
        members = np.flatnonzero(y_train == cls)
        if members.size < cfg.labels_per_class:
            raise ConfigError(
                f"class {cls} has {members.size} training samples but labels_per_class={cfg.labels_per_class}"
            )
        chosen = rng.choice(members, size=cfg.labels_per_class, replace=False)
        labeled_local.append(chosen)
        if cfg.unlabeled_per_class is not None:
            rest = np.setdiff1d(members, chosen)
            cap = min(cfg.unlabeled_per_class, rest.size)
            kept = rng.choice(rest, size=cap, replace=False) if cap else np.empty(0, dtype=np.int64)
            keep_local.append(np.concatenate([chosen, kept]))

    labeled_local = np.concatenate(labeled_local)
    if cfg.unlabeled_per_class is not None:
        selection = np.sort(np.concatenate(keep_local).astype(np.int64))
        train_idx = train_idx[selection]
        y_train = ds.y_true[train_idx]
        labeled_local = np.searchsorted(selection, labeled_local)

    assignments = np.full(train_idx.size, UNLABELED, dtype=np.int64)
    assignments[labeled_local] = y_train[labeled_local]
    return Split(
        label_set=LabelSet(assignments=assignments, class_count=c),
        X_train=ds.X[:, train_idx],
        y_train=y_train,
        X_test=ds.X[:, test_idx],
        y_test=ds.y_true[test_idx],
        train_indices=train_idx,
        test_indices=test_idx,
    )


def accuracy(predicted, truth):
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    return float(np.mean(predicted == truth)) if truth.size else float("nan")


@dataclass
class RunRecord:
    run_index: int
    failed: bool = False
    error: Optional[str] = None
    transductive_accuracy: Optional[float] = None
    inductive_map_accuracy: Optional[float] = None
    inductive_recons_accuracy: Optional[float] = None
    iterations: Optional[int] = None
    converged: Optional[bool] = None
    fit_seconds: float = 0.0
    per_iteration_seconds: float = 0.0

    def to_json(self):
        return {
            "run_index": self.run_index,
            "failed": self.failed,
            "error": self.error,
            "transductive_accuracy": self.transductive_accuracy,
            "inductive_map_accuracy": self.inductive_map_accuracy,
            "inductive_recons_accuracy": self.inductive_recons_accuracy,
            "iterations": self.iterations,
            "converged": self.converged,
            "timing": {
                "fit_seconds": self.fit_seconds,
                "per_iteration_seconds": self.per_iteration_seconds,
            },
        }


@dataclass
class RunReport:
    config: ExperimentConfig
    records: list
    class_names: Optional[list] = None

    def _metric(self, name):
        return [getattr(r, name) for r in self._aggregation_records() if getattr(r, name) is not None]

    def _aggregation_records(self):
        ok = [r for r in sorted(self.records, key=lambda r: r.run_index) if not r.failed]
        if self.config.best_k_of is not None and ok:
            ok = sorted(ok, key=lambda r: -(r.transductive_accuracy or 0.0))[: self.config.best_k_of]
            ok = sorted(ok, key=lambda r: r.run_index)
        return ok

    def aggregates(self):
        out = {}
        for name in (
            "transductive_accuracy",
            "inductive_map_accuracy",
            "inductive_recons_accuracy",
        ):
            values = self._metric(name)
            out[name] = {
                "mean": float(np.mean(values)) if values else None,
                "std": float(np.std(values)) if values else None,
                "best": float(np.max(values)) if values else None,
                "count": len(values),
            }
        times = [r.fit_seconds for r in self._aggregation_records()]
        out["time"] = {"mean_fit_seconds": float(np.mean(times)) if times else None}
        out["failed_runs"] = sum(1 for r in self.records if r.failed)
        return out

    def to_json(self):
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "config": self.config.to_json(),
            "class_names": self.class_names,
            "records": [r.to_json() for r in sorted(self.records, key=lambda r: r.run_index)],
            "aggregates": self.aggregates(),
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def text_table(self):
        """Fixed-width Mean/Best/Time summary, one row per metric."""
        agg = self.aggregates()
        lines = [
            f"method: {self.config.method}   runs: {self.config.runs}   failed: {agg['failed_runs']}",
            f"{'metric':<28}{'Mean':>10}{'Std':>10}{'Best':>10}{'Time(s)':>10}",
        ]
        mean_time = agg["time"]["mean_fit_seconds"]
        for name, label in (
            ("transductive_accuracy", "transductive accuracy"),
            ("inductive_map_accuracy", "inductive accuracy (map)"),
            ("inductive_recons_accuracy", "inductive accuracy (recons)"),
        ):
            m = agg[name]
            if m["count"] == 0:
                continue
            lines.append(
                f"{label:<28}{m['mean']:>10.4f}{m['std']:>10.4f}{m['best']:>10.4f}"
                f"{(mean_time if mean_time is not None else float('nan')):>10.4f}"
            )
        return "\n".join(lines)


def _run_kernel_lp(cfg, spl):
    t0 = time.perf_counter()
    model = fit(spl.X_train, spl.label_set, cfg.kernel, cfg.solver)
    fit_seconds = time.perf_counter() - t0

    unlabeled = ~spl.label_set.labeled_mask
    eval_mask = unlabeled if unlabeled.any() else np.ones(spl.y_train.size, dtype=bool)
    trans_acc = accuracy(model.F_train.hard[eval_mask], spl.y_train[eval_mask])

    map_acc = recons_acc = None
    if spl.y_test.size:
        ind = cfg.inductive
        map_width = ind.kernel_width_override if ind.scheme == "map" else None
        recons_width = ind.kernel_width_override if ind.scheme == "recons" else None
        map_model = recons_model = model
        if ind.retrain and ind.kernel_width_override is not None:
            retrained = fit(
                spl.X_train,
                spl.label_set,
                cfg.kernel.with_width(ind.kernel_width_override),
                cfg.solver,
            )
            if ind.scheme == "map":
                map_model, map_width = retrained, None
            else:
                recons_model, recons_width = retrained, None
        map_acc = accuracy(predict_map(map_model, spl.X_test, width=map_width).hard, spl.y_test)
        k = min(ind.k, recons_model.n_train)
        recons_acc = accuracy(
            predict_recons(recons_model, spl.X_test, k=k, width=recons_width).hard, spl.y_test
        )
    return model, trans_acc, map_acc, recons_acc, fit_seconds


def _run_pnlp(cfg, spl):
    t0 = time.perf_counter()
    nbr = knn(spl.X_train, min(cfg.graph_k, spl.X_train.shape[1] - 1))
    weights = symmetrize_normalize(gaussian_weights(spl.X_train, nbr))
    soft = pnlp_solve(weights, encode_labels(spl.label_set), cfg.pnlp)
    fit_seconds = time.perf_counter() - t0
    unlabeled = ~spl.label_set.labeled_mask
    eval_mask = unlabeled if unlabeled.any() else np.ones(spl.y_train.size, dtype=bool)
    return accuracy(soft.hard[eval_mask], spl.y_train[eval_mask]), fit_seconds


def run_experiment(cfg, ds):
    """Execute cfg.runs seeded splits and aggregate Mean/Std/Best/Time.

    Solver failures are recorded per run (failed=True, error message) and
    excluded from the aggregates.
    """
    X = normalize_features(ds.X, cfg.normalize)
    work = Dataset(X=X, y_true=ds.y_true, names=ds.names, class_names=ds.class_names)
    records = []
    for run_index in range(cfg.runs):
        record = RunRecord(run_index=run_index)
        try:
            spl = split(work, cfg, run_index)
            if cfg.method == "kernel_lp":
                model, trans, map_acc, recons_acc, fit_seconds = _run_kernel_lp(cfg, spl)
                record.transductive_accuracy = trans
                record.inductive_map_accuracy = map_acc
                record.inductive_recons_accuracy = recons_acc
                record.iterations = model.iterations
                record.converged = model.converged
                record.fit_seconds = fit_seconds
                record.per_iteration_seconds = fit_seconds / max(model.iterations, 1)
            else:
                trans, fit_seconds = _run_pnlp(cfg, spl)
                record.transductive_accuracy = trans
                record.fit_seconds = fit_seconds
                record.per_iteration_seconds = fit_seconds
        except (SolverError, ConfigError) as exc:
            if isinstance(exc, ConfigError):
                raise
            record.failed = True
            record.error = str(exc)
        records.append(record)
    return RunReport(config=cfg, records=records, class_names=ds.class_names)


def sweep(cfg, ds, alphas=None, betas=None, widths=None):
    """Grid sweep over solver alpha/beta and kernel width.

    Returns a list of row dicts (one per grid point) with the aggregate
    accuracies, ready for CSV serialization.
    """
    alphas = list(alphas) if alphas else [cfg.solver.alpha]
    betas = list(betas) if betas else [cfg.solver.beta]
    widths = list(widths) if widths else [cfg.kernel.width]
    rows = []
    for alpha in alphas:
        for beta in betas:
            for width in widths:
                sub = replace(
                    cfg,
                    solver=replace(cfg.solver, alpha=alpha, beta=beta),
                    kernel=cfg.kernel.with_width(width),
                )
                agg = run_experiment(sub, ds).aggregates()
                rows.append(
                    {
                        "alpha": alpha,
                        "beta": beta,
                        "width": width,
                        "mean_transductive_accuracy": agg["transductive_accuracy"]["mean"],
                        "mean_inductive_map_accuracy": agg["inductive_map_accuracy"]["mean"],
                        "mean_inductive_recons_accuracy": agg["inductive_recons_accuracy"]["mean"],
                        "failed_runs": agg["failed_runs"],
                    }
                )
    return rows
