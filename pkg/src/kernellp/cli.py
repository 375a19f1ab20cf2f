"""Command-line interface.

Subcommands: gen (synthetic dataset -> CSV), fit (train + save model
archive), predict (model + CSV -> labels CSV), bench (experiment config ->
report JSON + table), sweep (alpha/beta/width grid -> CSV), graph-export
(model -> adaptive weights as CSV/PGM), serve (run the segmentation HTTP
service).  JSON config files provide defaults; CLI flags override them.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from .datasets import load_csv, make_blobs, make_two_moons, save_csv
from .errors import InputError
from .experiment import ExperimentConfig, run_experiment, sweep
from .graphs import write_weights_csv, write_weights_pgm
from .inductive import InductiveConfig, predict
from .solver import TrainedModel, adaptive_weights, fit


def _parse_floats(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _load_experiment_config(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json(json.load(fh))
    else:
        cfg = ExperimentConfig()
    solver_over = {
        name: getattr(args, name)
        for name in ("alpha", "beta", "eps", "max_iter")
        if getattr(args, name, None) is not None
    }
    if solver_over:
        cfg = replace(cfg, solver=replace(cfg.solver, **solver_over))
    if getattr(args, "width", None) is not None:
        cfg = replace(cfg, kernel=cfg.kernel.with_width(args.width))
    if getattr(args, "kernel_kind", None) is not None:
        cfg = replace(cfg, kernel=replace(cfg.kernel, kind=args.kernel_kind))
    for name in ("method", "runs", "seed", "labels_per_class", "test_fraction", "normalize"):
        value = getattr(args, name, None)
        if value is not None:
            cfg = replace(cfg, **{name: value})
    return cfg


def _cmd_gen(args):
    if args.kind == "two-moons":
        ds = make_two_moons(args.n, noise=args.noise, seed=args.seed)
    else:
        ds = make_blobs(args.n, c=args.classes, spread=args.spread, seed=args.seed)
    save_csv(ds, args.out)
    print(f"wrote {ds.n_samples} samples x {ds.n_features} features to {args.out}")
    return 0


def _cmd_fit(args):
    ds = load_csv(args.data)
    if ds.y_true is None:
        raise InputError("fit requires a CSV with a label column (empty cells = unlabeled)")
    cfg = _load_experiment_config(args)
    labels = ds.label_set()
    model = fit(ds.X, labels, cfg.kernel, cfg.solver, class_names=ds.class_names)
    model.save(args.out)
    status = "converged" if model.converged else "did NOT converge"
    print(f"trained on N={ds.n_samples} (c={labels.class_count}); {status} after {model.iterations} iterations")
    print(f"model archive written to {args.out}")
    return 0


def _cmd_predict(args):
    model = TrainedModel.load(args.model)
    ds = load_csv(args.data)
    cfg = InductiveConfig(
        scheme=args.scheme,
        k=args.k,
        kernel_width_override=args.width,
    )
    soft = predict(model, ds.X, cfg)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        c = soft.entries.shape[0]
        writer.writerow(["index", "label"] + [f"s{i}" for i in range(c)])
        for j in range(soft.entries.shape[1]):
            hard = int(soft.hard[j])
            name = model.class_names[hard] if model.class_names else str(hard)
            writer.writerow([j, name] + [repr(float(v)) for v in soft.entries[:, j]])
    print(f"wrote predictions for {soft.entries.shape[1]} samples to {args.out}")
    return 0


def _cmd_bench(args):
    ds = load_csv(args.data)
    cfg = _load_experiment_config(args)
    report = run_experiment(cfg, ds)
    payload = report.dumps()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(payload + "\n")
        print(f"report JSON written to {args.report}")
    print(report.text_table())
    return 0


def _cmd_sweep(args):
    ds = load_csv(args.data)
    cfg = _load_experiment_config(args)
    rows = sweep(
        cfg,
        ds,
        alphas=_parse_floats(args.alphas) if args.alphas else None,
        betas=_parse_floats(args.betas) if args.betas else None,
        widths=_parse_floats(args.widths) if args.widths else None,
    )
    fields = [
        "alpha",
        "beta",
        "width",
        "mean_transductive_accuracy",
        "mean_inductive_map_accuracy",
        "mean_inductive_recons_accuracy",
        "failed_runs",
    ]
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} grid points to {args.out}")
    return 0


def _cmd_graph_export(args):
    model = TrainedModel.load(args.model)
    weights = adaptive_weights(model)
    if args.csv:
        write_weights_csv(weights, args.csv)
        print(f"adaptive weights CSV written to {args.csv}")
    if args.pgm:
        write_weights_pgm(weights, args.pgm)
        print(f"adaptive weights PGM written to {args.pgm}")
    if not args.csv and not args.pgm:
        raise InputError("nothing to do: pass --csv and/or --pgm")
    return 0


def _cmd_serve(args):
    import uvicorn

    uvicorn.run("kernellp.service:app", host=args.host, port=args.port)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="kernellp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    p.add_argument("--kind", choices=["two-moons", "blobs"], default="two-moons")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--noise", type=float, default=0.08)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--spread", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    def add_solver_flags(p):
        p.add_argument("--config", help="experiment config JSON (flags override)")
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--width", type=float, help="kernel width")
        p.add_argument("--kernel-kind", dest="kernel_kind", choices=["rbf", "linear", "quadratic", "polynomial"])

    p = sub.add_parser("fit", help="train a model from a labeled/partially labeled CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="model archive path (.npz)")
    add_solver_flags(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="predict labels for a CSV with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", choices=["map", "recons"], default="map")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--width", type=float, help="kernel width override for the cross-Gram")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("bench", help="run a seeded experiment and report Mean/Best/Time")
    p.add_argument("--data", required=True)
    p.add_argument("--report", help="write report JSON here")
    add_solver_flags(p)
    p.add_argument("--method", choices=["kernel_lp", "pnlp"])
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--labels-per-class", dest="labels_per_class", type=int)
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p.add_argument("--normalize", choices=["none", "minmax", "zscore"])
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("sweep", help="grid sweep over alpha/beta/width")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    add_solver_flags(p)
    p.add_argument("--method", choices=["kernel_lp", "pnlp"])
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--labels-per-class", dest="labels_per_class", type=int)
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p.add_argument("--normalize", choices=["none", "minmax", "zscore"])
    p.add_argument("--alphas", help="comma-separated alpha grid")
    p.add_argument("--betas", help="comma-separated beta grid")
    p.add_argument("--widths", help="comma-separated width grid")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("graph-export", help="export a model's adaptive weights as CSV/PGM")
    p.add_argument("--model", required=True)
    p.add_argument("--csv")
    p.add_argument("--pgm")
    p.set_defaults(func=_cmd_graph_export)

    p = sub.add_parser("serve", help="run the segmentation HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
