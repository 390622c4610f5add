"""Command line front end: fit, predict, importance, bench.

Exit codes: 0 success, 1 unusable data (bad CSV, missing or corrupt model,
arity mismatch), 2 bad arguments.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import (
    elimination_importance,
    gain_importance,
    individual_importance,
    roc_auc,
)
from .bench import SWEEP_KEYS, run_sweep
from .boosting import FitConfig, fit_forest, predict_batch
from .dataset import DataError, load_csv, load_matrix
from .model_io import ModelParseError, load_forest, save_forest

__all__ = ["main", "entrypoint"]


def _config_from(args: argparse.Namespace) -> FitConfig:
    return FitConfig(
        n_trees=args.trees,
        depth=args.depth,
        shrinkage=args.shrinkage,
        subsample=args.subsample,
        binning_levels=args.binning_levels,
        seed=args.seed,
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trees", type=int, default=100, help="number of boosting iterations")
    p.add_argument("--depth", type=int, default=3, help="tree depth")
    p.add_argument("--shrinkage", type=float, default=0.1, help="learning rate in (0, 1]")
    p.add_argument("--subsample", type=float, default=0.5, help="per-class sampling rate in (0, 1]")
    p.add_argument("--binning-levels", type=int, default=8, help="feature bins = 2**levels")
    p.add_argument("--seed", type=int, default=0, help="random seed")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_fit(args: argparse.Namespace) -> int:
    try:
        config = _config_from(args)
    except ValueError as e:
        return _fail(str(e), 2)
    try:
        data = load_csv(args.data, args.label, args.weight)
        forest = fit_forest(data.X, data.y, data.weights, config)
        save_forest(forest, args.model_out)
        probs = predict_batch(forest, data.X)
        auc = roc_auc(probs, data.y, data.weights)
    except (DataError, ValueError, OSError) as e:
        return _fail(str(e), 1)
    print(f"training AUC: {auc:.6f}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    if args.threads < 1:
        return _fail("--threads must be >= 1", 2)
    try:
        forest = load_forest(args.model)
        _, X = load_matrix(args.data, exclude=[c for c in (args.label, args.weight) if c])
        probs = predict_batch(forest, X, threads=args.threads)
    except (DataError, ModelParseError, ValueError, OSError) as e:
        return _fail(str(e), 1)
    _write_text(args.out, "".join(f"{p:.17g}\n" for p in probs))
    return 0


def _importance_csv(names: list[str], scores: np.ndarray) -> str:
    lines = ["feature,score"]
    lines += [f"{name},{score:.17g}" for name, score in zip(names, scores)]
    return "\n".join(lines) + "\n"


def cmd_importance(args: argparse.Namespace) -> int:
    if args.method in ("gain", "individual") and not args.model:
        return _fail(f"--model is required for method '{args.method}'", 2)
    if args.method in ("individual", "elimination") and not args.data:
        return _fail(f"--data is required for method '{args.method}'", 2)
    if args.method == "individual" and args.row is None:
        return _fail("--row is required for method 'individual'", 2)

    try:
        if args.method == "gain":
            forest = load_forest(args.model)
            names = [f"f{j}" for j in range(forest.n_features)]
            report = gain_importance(forest)
        elif args.method == "individual":
            forest = load_forest(args.model)
            names, X = load_matrix(
                args.data, exclude=[c for c in (args.label, args.weight) if c]
            )
            if not 0 <= args.row < X.shape[0]:
                return _fail(f"--row must be in [0, {X.shape[0] - 1}]", 2)
            report = individual_importance(forest, X[args.row])
        else:
            data = load_csv(args.data, args.label, args.weight)
            names = data.feature_names
            if data.X.shape[1] < 2:
                return _fail("elimination needs at least 2 feature columns", 2)
            try:
                config = _config_from(args)
            except ValueError as e:
                return _fail(str(e), 2)
            report = elimination_importance(data.X, data.y, data.weights, config)
            print(
                f"elimination: {report.n_fits} fits over {len(names)} features, "
                f"removal order {[names[j] for j in report.order]}",
                file=sys.stderr,
            )
    except (DataError, ModelParseError, ValueError, OSError) as e:
        return _fail(str(e), 1)

    _write_text(args.out, _importance_csv(names, report.scores))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        config = _config_from(args)
    except ValueError as e:
        return _fail(str(e), 2)
    raw = [v for v in args.values.split(",") if v.strip()]
    try:
        values = [float(v) for v in raw]
    except ValueError:
        return _fail(f"--values must be a comma-separated number list, got {args.values!r}", 2)
    if not values:
        return _fail("--values must name at least one value", 2)
    if args.repeats < 1:
        return _fail("--repeats must be >= 1", 2)

    try:
        records, lines = run_sweep(
            args.sweep,
            values,
            repeats=args.repeats,
            base_config=config,
            n_events=args.events,
            n_features=args.features,
            seed=args.seed,
        )
    except ValueError as e:
        return _fail(str(e), 1)

    out = ["parameter,value,phase,seconds_best,seconds_mean,auc"]
    out += [
        f"{r.parameter},{r.value:.17g},{r.phase},{r.seconds_best:.17g},"
        f"{r.seconds_mean:.17g},{r.auc:.17g}"
        for r in records
    ]
    _write_text(args.out, "\n".join(out) + "\n")
    for phase in ("fit", "apply"):
        line = lines[phase]
        print(
            f"{phase} regression: a={line.slope:.6g} c={line.intercept:.6g} "
            f"r2={line.r_squared:.6f}",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binboost",
        description="Gradient-boosted decision trees over equal-frequency binned features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model from a CSV table")
    p_fit.add_argument("--data", required=True, help="training CSV")
    p_fit.add_argument("--label", required=True, help="label column name")
    p_fit.add_argument("--weight", default=None, help="weight column name")
    p_fit.add_argument("--model-out", required=True, help="where to write the model JSON")
    _add_config_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_pred = sub.add_parser("predict", help="signal probabilities for CSV rows")
    p_pred.add_argument("--model", required=True, help="model JSON path")
    p_pred.add_argument("--data", required=True, help="feature CSV")
    p_pred.add_argument("--label", default=None, help="label column to ignore, if present")
    p_pred.add_argument("--weight", default=None, help="weight column to ignore, if present")
    p_pred.add_argument("--out", default=None, help="output path (default stdout)")
    p_pred.add_argument("--threads", type=int, default=1, help="row-chunk parallelism")
    p_pred.set_defaults(func=cmd_predict)

    p_imp = sub.add_parser("importance", help="feature importance reports")
    p_imp.add_argument("--method", required=True, choices=("gain", "individual", "elimination"))
    p_imp.add_argument("--model", default=None, help="model JSON (gain, individual)")
    p_imp.add_argument("--data", default=None, help="CSV table (individual, elimination)")
    p_imp.add_argument("--label", default=None, help="label column name")
    p_imp.add_argument("--weight", default=None, help="weight column name")
    p_imp.add_argument("--row", type=int, default=None, help="0-based row for method individual")
    p_imp.add_argument("--out", default=None, help="output path (default stdout)")
    _add_config_flags(p_imp)
    p_imp.set_defaults(func=cmd_importance)

    p_bench = sub.add_parser("bench", help="scaling benchmark on synthetic data")
    p_bench.add_argument("--sweep", required=True, choices=SWEEP_KEYS)
    p_bench.add_argument("--values", required=True, help="comma-separated sweep values")
    p_bench.add_argument("--repeats", type=int, default=5, help="timing repeats per value")
    p_bench.add_argument("--events", type=int, default=50_000, help="training events")
    p_bench.add_argument("--features", type=int, default=10, help="feature count")
    p_bench.add_argument("--out", default=None, help="CSV output path (default stdout)")
    _add_config_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())
