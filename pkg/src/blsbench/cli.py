"""Command-line benchmark harness.

Subcommands: train, predict, cv, gridsearch, noise, stats. Every run is
deterministic given its flags; each artifact-producing command writes a
JSON manifest recording the resolved configuration, dataset content
hashes, and seeds next to its outputs.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, data, if_scores, network, stats, trainer
from .errors import BlsBenchError, DataFormatError

DATA_DIR_ENV = "BLSBENCH_DATA_DIR"


def _label_column(value: str):
    text = str(value).strip()
    if text.lstrip("-").isdigit():
        return int(text)
    return text


def _resolve_data_path(path: str) -> str:
    base = os.environ.get(DATA_DIR_ENV)
    if base and not os.path.isabs(path) and not os.path.exists(path):
        candidate = os.path.join(base, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path: str, command: str, config: dict, datasets: dict, seeds: dict):
    doc = {
        "tool": "blsbench",
        "version": __version__,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "datasets": {p: _sha256(p) for p in datasets.values()},
        "seeds": seeds,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _noise_level(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= v <= 100.0:
        raise argparse.ArgumentTypeError(f"noise level must be in [0, 100], got {v}")
    return v


def _load_config_file(path: str) -> dict:
    """Flat key-value config with per-module sections; values are strings."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise DataFormatError(f"config file not found: {path}")
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[key.replace("-", "_")] = value
    return flat


_MODEL_FLOAT_KEYS = {"c_reg", "mu", "delta", "epsilon"}
_MODEL_INT_KEYS = {"m", "p", "l", "q", "seed", "k", "fold_seed"}


def _merge_config(args: argparse.Namespace, keys) -> dict:
    """File values first, then CLI flags override."""
    resolved = {}
    if getattr(args, "config", None):
        file_vals = _load_config_file(args.config)
        for key in keys:
            if key in file_vals:
                raw = file_vals[key]
                if key in _MODEL_INT_KEYS:
                    resolved[key] = int(raw)
                elif key in _MODEL_FLOAT_KEYS:
                    resolved[key] = raw if raw == if_scores.MEDIAN_HEURISTIC else float(raw)
                else:
                    resolved[key] = raw
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    return resolved


_MODEL_KEYS = (
    "variant", "c_reg", "m", "p", "l", "q", "mu", "delta", "epsilon", "seed",
    "feature_activation", "enhancement_activation",
)


def _model_config(resolved: dict) -> trainer.ModelConfig:
    variant = resolved.get("variant")
    if variant is None:
        raise DataFormatError("variant is required (flag --variant or config file)")
    net = network.NetworkConfig(
        m=int(resolved.get("m", 5)),
        p=int(resolved.get("p", 10)),
        l=int(resolved.get("l", 1)),
        q=int(resolved.get("q", 25)),
        feature_activation=resolved.get("feature_activation", "linear"),
        enhancement_activation=resolved.get("enhancement_activation", "tanh"),
        seed=int(resolved.get("seed", 0)),
    )
    kernel = None
    delta = resolved.get("delta")
    if variant == "if-bls":
        kernel = if_scores.KernelParams(
            mu=float(resolved.get("mu", 1.0)),
            delta=float(delta) if delta is not None else fuzzy_default_delta(),
            epsilon=resolved.get("epsilon", if_scores.MEDIAN_HEURISTIC),
        )
        delta = None
    elif variant != "f-bls":
        delta = None
    return trainer.ModelConfig(
        variant=variant,
        network=net,
        c_reg=float(resolved.get("c_reg", 1.0)),
        delta=float(delta) if delta is not None else None,
        kernel=kernel,
    )


def fuzzy_default_delta() -> float:
    from .fuzzy import DEFAULT_DELTA

    return DEFAULT_DELTA


def _config_as_dict(cfg: trainer.ModelConfig) -> dict:
    doc = {
        "variant": cfg.variant,
        "c_reg": cfg.c_reg,
        "m": cfg.network.m,
        "p": cfg.network.p,
        "l": cfg.network.l,
        "q": cfg.network.q,
        "feature_activation": cfg.network.feature_activation,
        "enhancement_activation": cfg.network.enhancement_activation,
        "seed": cfg.network.seed,
    }
    if cfg.delta is not None:
        doc["delta"] = cfg.delta
    if cfg.kernel is not None:
        doc.update(
            mu=cfg.kernel.mu, kernel_delta=cfg.kernel.delta, epsilon=cfg.kernel.epsilon
        )
    return doc


# --- subcommands ----------------------------------------------------------


def cmd_train(args) -> int:
    path = _resolve_data_path(args.data)
    resolved = _merge_config(args, _MODEL_KEYS)
    cfg = _model_config(resolved)
    ds = data.load_csv(path, label_column=_label_column(args.label_column), header=not args.no_header)
    model = trainer.fit(ds.X, ds.labels, cfg)
    acc = trainer.accuracy(model, ds.X, ds.labels)
    trainer.save_model(model, args.out)
    _write_manifest(
        args.out, "train", _config_as_dict(cfg), {"train": path},
        {"model_seed": cfg.network.seed},
    )
    print(f"training accuracy: {acc:.4f}")
    print(f"model written to {args.out} (solve branch: {model.solve_branch_used})")
    return 0


def cmd_predict(args) -> int:
    model = trainer.load_model(args.model)
    path = _resolve_data_path(args.data)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and not args.no_header:
        rows = rows[1:]
    if not rows:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("prediction\n")
        print("empty test file; wrote empty predictions")
        return 0
    try:
        X = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise DataFormatError(f"{path}: non-numeric feature cell ({exc})") from None
    if X.shape[1] != model.layer.input_dim:
        raise DataFormatError(
            f"{path} has {X.shape[1]} feature columns, model expects {model.layer.input_dim}"
        )
    preds = trainer.predict(model, X)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("prediction\n")
        for p in preds:
            fh.write(p + "\n")
    print(f"wrote {len(preds)} predictions to {args.out}")
    return 0


def cmd_cv(args) -> int:
    path = _resolve_data_path(args.data)
    resolved = _merge_config(args, _MODEL_KEYS + ("k", "fold_seed"))
    cfg = _model_config(resolved)
    ds = data.load_csv(path, label_column=_label_column(args.label_column), header=not args.no_header)
    k = int(resolved.get("k", 5))
    fold_seed = int(resolved.get("fold_seed", 0))
    plan = data.make_folds(ds.n_samples, k, fold_seed)
    result = stats.cross_validate(ds, cfg, plan)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fold", "accuracy"])
        for i, acc in enumerate(result.per_fold_accuracy):
            writer.writerow([i, "" if acc is None else f"{acc:.10f}"])
        writer.writerow(["mean", f"{result.mean_accuracy:.10f}"])
        writer.writerow(["std", f"{result.std_dev:.10f}"])
    _write_manifest(
        args.out, "cv", _config_as_dict(cfg), {"data": path},
        {"model_seed": cfg.network.seed, "fold_seed": fold_seed},
    )
    print(f"mean accuracy: {result.mean_accuracy:.4f} (std {result.std_dev:.4f})")
    return 0


def _parse_grid(args) -> stats.GridSpec:
    if args.grid == "paper":
        return stats.GridSpec.benchmark_default()
    flat = _load_config_file(args.grid)

    def _list(key, cast, default=None):
        if key not in flat:
            if default is None:
                raise DataFormatError(f"grid file is missing {key!r}")
            return default
        return tuple(cast(v) for v in flat[key].replace(",", " ").split())

    return stats.GridSpec(
        c_reg=_list("c_reg", float),
        m=_list("m", int),
        p=_list("p", int),
        q=_list("q", int),
        mu=_list("mu", float, (1.0,)),
        delta=_list("delta", float, (1e-4,)),
        epsilon=_list(
            "epsilon",
            lambda v: v if v == if_scores.MEDIAN_HEURISTIC else float(v),
            (if_scores.MEDIAN_HEURISTIC,),
        ),
    )


def cmd_gridsearch(args) -> int:
    path = _resolve_data_path(args.data)
    ds = data.load_csv(path, label_column=_label_column(args.label_column), header=not args.no_header)
    grid = _parse_grid(args)
    plan = data.make_folds(ds.n_samples, args.k, args.fold_seed)
    best, results = stats.grid_search(
        ds, args.variant, grid, plan, seed=args.seed, jobs=args.jobs
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["c_reg", "m", "p", "q", "mu", "delta", "epsilon", "mean_accuracy", "std_dev"]
        writer.writerow(header)
        for r in results:
            cfg = r.best_config
            writer.writerow([
                repr(cfg.c_reg), cfg.network.m, cfg.network.p, cfg.network.q,
                "" if cfg.kernel is None else repr(cfg.kernel.mu),
                "" if cfg.delta is None and cfg.kernel is None
                else repr(cfg.delta if cfg.delta is not None else cfg.kernel.delta),
                "" if cfg.kernel is None else str(cfg.kernel.epsilon),
                f"{r.mean_accuracy:.10f}", f"{r.std_dev:.10f}",
            ])
    _write_manifest(
        args.out, "gridsearch", _config_as_dict(best.best_config), {"data": path},
        {"model_seed": args.seed, "fold_seed": args.fold_seed},
    )
    bc = best.best_config
    print(
        f"best mean accuracy {best.mean_accuracy:.4f} with "
        f"C={bc.c_reg:g} m={bc.network.m} p={bc.network.p} q={bc.network.q}"
        + (f" mu={bc.kernel.mu:g}" if bc.kernel else "")
    )
    return 0


def cmd_noise(args) -> int:
    path = _resolve_data_path(args.data)
    ds = data.load_csv(path, label_column=_label_column(args.label_column), header=not args.no_header)
    noisy = data.inject_gaussian_noise(ds, args.level, args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i}" for i in range(noisy.n_features)] + ["label"])
        for row, label in zip(noisy.X, noisy.labels):
            writer.writerow([repr(float(v)) for v in row] + [label])
    _write_manifest(
        args.out, "noise", {"level": args.level}, {"data": path},
        {"noise_seed": args.seed},
    )
    print(f"wrote corrupted dataset to {args.out}")
    return 0


def _read_accuracy_table(path: str):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) < 3:
        raise DataFormatError(
            f"{path}: expected a header of model names and at least one dataset row"
        )
    models = [c.strip() for c in rows[0][1:]]
    datasets, acc = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(models) + 1:
            raise DataFormatError(f"{path}: row {r} has {len(row)} cells")
        datasets.append(row[0].strip())
        try:
            acc.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise DataFormatError(f"{path}: row {r}: {exc}") from None
    return datasets, models, np.array(acc)


def cmd_stats(args) -> int:
    datasets, models, acc = _read_accuracy_table(args.table)
    table = stats.rank_models(acc, datasets, models)
    os.makedirs(args.out_dir, exist_ok=True)

    def _path(name):
        return os.path.join(args.out_dir, name)

    with open(_path("ranks.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dataset"] + list(table.models))
        for name, row in zip(table.datasets, table.ranks):
            writer.writerow([name] + [f"{v:g}" for v in row])
        writer.writerow(["average"] + [f"{v:.4f}" for v in table.average_rank])

    fried = stats.friedman_test(table)
    with open(_path("friedman.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["chi2", "f_stat", "chi2_dof", "f_dof1", "f_dof2"])
        writer.writerow([
            f"{fried.chi2:.4f}", f"{fried.f_stat:.4f}", fried.chi2_dof,
            fried.f_dof[0], fried.f_dof[1],
        ])

    with open(_path("wilcoxon.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model_a", "model_b", "p_value", "decision"])
        for i in range(len(models)):
            for j in range(i + 1, len(models)):
                try:
                    res = stats.wilcoxon_signed_rank(acc[:, i], acc[:, j], args.alpha)
                except BlsBenchError as exc:
                    writer.writerow([models[i], models[j], "", str(exc)])
                    continue
                writer.writerow([
                    models[i], models[j], f"{res.p_value:.6g}",
                    "rejected" if res.reject else "not-rejected",
                ])

    with open(_path("win_tie_loss.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model_a", "model_b", "wins_a", "ties", "wins_b", "threshold", "significant"])
        for i in range(len(models)):
            for j in range(i + 1, len(models)):
                wtl = stats.win_tie_loss(acc[:, i], acc[:, j], args.tie_tol)
                writer.writerow([
                    models[i], models[j], wtl.wins_a, wtl.ties, wtl.wins_b,
                    f"{wtl.threshold:.4f}", "yes" if wtl.significant else "no",
                ])

    _write_manifest(
        os.path.join(args.out_dir, "stats"), "stats",
        {"alpha": args.alpha, "tie_tol": args.tie_tol}, {"table": args.table}, {},
    )
    print(
        f"friedman chi2={fried.chi2:.4f} F={fried.f_stat:.4f}; "
        f"reports written to {args.out_dir}"
    )
    return 0


# --- parser ---------------------------------------------------------------


def _add_data_flags(p):
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--label-column", default="-1",
                   help="label column name or index (default: last column)")
    p.add_argument("--no-header", action="store_true",
                   help="the CSV has no header row")


def _add_model_flags(p):
    p.add_argument("--variant", choices=trainer.VARIANTS)
    p.add_argument("--config", help="INI config file; flags override file values")
    p.add_argument("--C", dest="c_reg", type=float, help="regularization parameter")
    p.add_argument("--m", type=int, help="number of feature groups")
    p.add_argument("--p", type=int, help="nodes per feature group")
    p.add_argument("--l", type=int, help="number of enhancement groups")
    p.add_argument("--q", type=int, help="nodes per enhancement group")
    p.add_argument("--mu", type=float, help="Gaussian kernel width (if-bls)")
    p.add_argument("--delta", type=float, help="radius offset (f-bls / if-bls)")
    p.add_argument("--epsilon", help="neighborhood size or 'median_heuristic' (if-bls)")
    p.add_argument("--seed", type=int, help="random layer seed")
    p.add_argument("--feature-activation", dest="feature_activation",
                   choices=sorted(network.FEATURE_ACTIVATIONS))
    p.add_argument("--enhancement-activation", dest="enhancement_activation",
                   choices=sorted(network.ENHANCEMENT_ACTIVATIONS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blsbench",
        description="Broad learning system classifiers and benchmark statistics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit one model and save it")
    _add_data_flags(p)
    _add_model_flags(p)
    p.add_argument("--out", required=True, help="model output path")
    p.set_defaults(func=cmd_train, required_flags=("variant",))

    p = sub.add_parser("predict", help="label a feature CSV with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="feature-only CSV")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", required=True, help="predictions CSV path")
    p.set_defaults(func=cmd_predict, required_flags=())

    p = sub.add_parser("cv", help="k-fold cross-validation of one configuration")
    _add_data_flags(p)
    _add_model_flags(p)
    p.add_argument("--k", type=int, help="fold count (default 5)")
    p.add_argument("--fold-seed", dest="fold_seed", type=int, help="fold shuffle seed")
    p.add_argument("--out", required=True, help="per-fold CSV path")
    p.set_defaults(func=cmd_cv, required_flags=("variant",))

    p = sub.add_parser("gridsearch", help="exhaustive hyperparameter sweep")
    _add_data_flags(p)
    p.add_argument("--variant", choices=trainer.VARIANTS, required=True)
    p.add_argument("--grid", required=True,
                   help="'paper' for the built-in sweep, or an INI grid file")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--fold-seed", dest="fold_seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=0, help="model seed shared by all configs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="per-config CSV path")
    p.set_defaults(func=cmd_gridsearch, required_flags=())

    p = sub.add_parser("noise", help="write a Gaussian-corrupted copy of a dataset")
    _add_data_flags(p)
    p.add_argument("--level", type=_noise_level, required=True,
                   help="percent of samples to corrupt, 0-100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise, required_flags=())

    p = sub.add_parser("stats", help="rank/Friedman/Wilcoxon/win-tie-loss reports")
    p.add_argument("--table", required=True,
                   help="accuracy CSV: header of model names, first column dataset names")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tie-tol", dest="tie_tol", type=float, default=stats.DEFAULT_TIE_TOL)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_stats, required_flags=())

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in args.required_flags:
        if getattr(args, flag, None) is None and not getattr(args, "config", None):
            parser.error(f"--{flag} is required (directly or via --config)")
    try:
        return args.func(args)
    except BlsBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
